#pragma once
// Nonbinary parity-check codes: text-format parsing/serialization, syndrome
// evaluation, and a systematic encoder derived by Gaussian elimination.
//
// File format (UTF-8 text, whitespace separated):
//   line 1:    n m q
//   lines 2..: one line per check:  deg  i1 h1  i2 h2 ... ideg hdeg
// with 1-based column indices and coefficients as plain integers.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nbqp/field.hpp"

namespace nbqp {

struct ParityCheckCode {
    int m = 0; // checks
    int n = 0; // variables
    int q = 0; // field exponent
    // rows[j] holds the 0-based (column, coefficient) pairs of check j, in
    // file order.  Coefficients are nonzero and < 2^q.
    std::vector<std::vector<std::pair<int, gf_t>>> rows;
};

struct Codeword {
    std::vector<gf_t> symbols;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind {
        MalformedHeader,
        MalformedCheck,
        IndexOutOfRange,
        CoefficientOutOfField,
        ZeroCoefficient,
        DuplicateEntry,
        DegreeTooSmall,
    };
    ParseError(Kind k, int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), kind(k), line(line) {}
    Kind kind;
    int line;
};

ParityCheckCode parse_code(std::istream& in);
ParityCheckCode parse_code(const std::string& text);
ParityCheckCode load_code_file(const std::string& path);
std::string serialize(const ParityCheckCode& code);

// True iff every check row XOR-sums to zero under the field product.
// Throws std::invalid_argument on word length mismatch.
bool check_syndrome(const ParityCheckCode& code, const Codeword& word, const FieldContext& ctx);

// Systematic encoder: Gaussian elimination over GF(2^q) selects rank pivot
// columns (scanning from the right so information symbols come first); each
// pivot symbol is a fixed linear combination of the free symbols.
struct Encoder {
    int n = 0;
    int k = 0;        // information symbols = n - rank
    int rank = 0;
    int dropped_rows = 0; // rank-deficient rows removed (linearly dependent)
    std::vector<int> free_cols;  // ascending, length k (message positions)
    std::vector<int> pivot_cols; // length rank
    // dep[r][t]: coefficient of free symbol t in pivot symbol r, so that
    // u[pivot_cols[r]] = XOR_t dep[r][t] * u[free_cols[t]].
    std::vector<std::vector<gf_t>> dep;

    // Throws std::invalid_argument when message length != k.
    Codeword encode(const std::vector<gf_t>& message, const FieldContext& ctx) const;
};

Encoder derive_encoder(const ParityCheckCode& code, const FieldContext& ctx);

} // namespace nbqp
