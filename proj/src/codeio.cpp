#include "nbqp/codeio.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace nbqp {

namespace {

// Pull the next whitespace-separated integer from a line stream.
bool next_int(std::istringstream& ls, long& out) {
    return static_cast<bool>(ls >> out);
}

} // namespace

ParityCheckCode parse_code(std::istream& in) {
    std::string lt;
    int lineno = 0;

    // Header line (skip blank lines before it).
    long n = 0, m = 0, q = 0;
    for (;;) {
        if (!std::getline(in, lt))
            throw ParseError(ParseError::Kind::MalformedHeader, lineno + 1, "missing header 'n m q'");
        ++lineno;
        std::istringstream ls(lt);
        if (!(ls >> n)) continue; // blank line
        long extra;
        if (!(ls >> m >> q) || (ls >> extra))
            throw ParseError(ParseError::Kind::MalformedHeader, lineno, "header must be exactly 'n m q'");
        break;
    }
    if (n < 1 || m < 1 || q < 1 || q > 8)
        throw ParseError(ParseError::Kind::MalformedHeader, lineno,
                         "header out of range (need n,m >= 1 and 1 <= q <= 8)");

    ParityCheckCode code;
    code.n = static_cast<int>(n);
    code.m = static_cast<int>(m);
    code.q = static_cast<int>(q);
    const long qmax = 1L << q;

    std::set<std::pair<int, int>> seen; // (row, col) duplicates
    while (static_cast<int>(code.rows.size()) < code.m) {
        if (!std::getline(in, lt))
            throw ParseError(ParseError::Kind::MalformedCheck, lineno + 1,
                             "expected " + std::to_string(code.m) + " check lines, got " +
                                 std::to_string(code.rows.size()));
        ++lineno;
        std::istringstream ls(lt);
        long deg;
        if (!next_int(ls, deg)) continue; // blank line
        if (deg < 2)
            throw ParseError(ParseError::Kind::DegreeTooSmall, lineno,
                             "check must touch at least 2 columns");
        std::vector<std::pair<int, gf_t>> row;
        for (long t = 0; t < deg; ++t) {
            long col, h;
            if (!next_int(ls, col) || !next_int(ls, h))
                throw ParseError(ParseError::Kind::MalformedCheck, lineno,
                                 "check line truncated (need deg index/coefficient pairs)");
            if (col < 1 || col > code.n)
                throw ParseError(ParseError::Kind::IndexOutOfRange, lineno,
                                 "column index " + std::to_string(col) + " out of range");
            if (h >= qmax || h < 0)
                throw ParseError(ParseError::Kind::CoefficientOutOfField, lineno,
                                 "coefficient out of field: " + std::to_string(h));
            if (h == 0)
                throw ParseError(ParseError::Kind::ZeroCoefficient, lineno,
                                 "zero coefficient not allowed");
            const int row_idx = static_cast<int>(code.rows.size());
            if (!seen.insert({row_idx, static_cast<int>(col)}).second)
                throw ParseError(ParseError::Kind::DuplicateEntry, lineno,
                                 "duplicate entry for column " + std::to_string(col));
            row.emplace_back(static_cast<int>(col) - 1, static_cast<gf_t>(h));
        }
        long extra;
        if (next_int(ls, extra))
            throw ParseError(ParseError::Kind::MalformedCheck, lineno,
                             "trailing tokens after declared degree");
        code.rows.push_back(std::move(row));
    }
    return code;
}

ParityCheckCode parse_code(const std::string& text) {
    std::istringstream in(text);
    return parse_code(in);
}

ParityCheckCode load_code_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open code file: " + path);
    return parse_code(in);
}

std::string serialize(const ParityCheckCode& code) {
    std::ostringstream out;
    out << code.n << ' ' << code.m << ' ' << code.q << '\n';
    for (const auto& row : code.rows) {
        out << row.size();
        for (const auto& [col, h] : row) out << ' ' << col + 1 << ' ' << int(h);
        out << '\n';
    }
    return out.str();
}

bool check_syndrome(const ParityCheckCode& code, const Codeword& word, const FieldContext& ctx) {
    if (static_cast<int>(word.symbols.size()) != code.n)
        throw std::invalid_argument("codeword length does not match code");
    for (const auto& row : code.rows) {
        gf_t s = 0;
        for (const auto& [col, h] : row) s = gf_add(s, gf_mul(h, word.symbols[col], ctx));
        if (s != 0) return false;
    }
    return true;
}

Encoder derive_encoder(const ParityCheckCode& code, const FieldContext& ctx) {
    const int m = code.m, n = code.n;
    // Dense working copy of H.
    std::vector<std::vector<gf_t>> H(m, std::vector<gf_t>(n, 0));
    for (int j = 0; j < m; ++j)
        for (const auto& [col, h] : code.rows[j]) H[j][col] = h;

    // Row-reduce, scanning candidate pivot columns right-to-left so that the
    // free (message) columns end up at the low indices.
    std::vector<int> pivot_cols;
    std::vector<int> pivot_row_of; // parallel to pivot_cols
    int r = 0;
    for (int c = n - 1; c >= 0 && r < m; --c) {
        int pr = -1;
        for (int j = r; j < m; ++j)
            if (H[j][c] != 0) { pr = j; break; }
        if (pr < 0) continue;
        std::swap(H[r], H[pr]);
        const gf_t inv = gf_inv(H[r][c], ctx);
        for (int cc = 0; cc < n; ++cc) H[r][cc] = gf_mul(H[r][cc], inv, ctx);
        for (int j = 0; j < m; ++j) {
            if (j == r || H[j][c] == 0) continue;
            const gf_t f = H[j][c];
            for (int cc = 0; cc < n; ++cc)
                H[j][cc] = gf_add(H[j][cc], gf_mul(f, H[r][cc], ctx));
        }
        pivot_cols.push_back(c);
        pivot_row_of.push_back(r);
        ++r;
    }

    Encoder enc;
    enc.n = n;
    enc.rank = r;
    enc.k = n - r;
    enc.dropped_rows = m - r;
    enc.pivot_cols = pivot_cols;
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_cols) is_pivot[c] = true;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) enc.free_cols.push_back(c);

    // u[pivot] = XOR over free columns of H[pivot_row][free] * u[free]
    // (H row reads pivot + sum = 0; over characteristic two the move across
    // the equals sign is a no-op).
    enc.dep.assign(r, std::vector<gf_t>(enc.k, 0));
    for (int pi = 0; pi < r; ++pi)
        for (int t = 0; t < enc.k; ++t)
            enc.dep[pi][t] = H[pivot_row_of[pi]][enc.free_cols[t]];
    return enc;
}

Codeword Encoder::encode(const std::vector<gf_t>& message, const FieldContext& ctx) const {
    if (static_cast<int>(message.size()) != k)
        throw std::invalid_argument("message length must equal n - rank");
    Codeword w;
    w.symbols.assign(n, 0);
    for (int t = 0; t < k; ++t) w.symbols[free_cols[t]] = message[t];
    for (int pi = 0; pi < rank; ++pi) {
        gf_t s = 0;
        for (int t = 0; t < k; ++t) s = gf_add(s, gf_mul(dep[pi][t], message[t], ctx));
        w.symbols[pivot_cols[pi]] = s;
    }
    return w;
}

} // namespace nbqp
