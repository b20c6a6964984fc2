#pragma once
// Arithmetic over GF(2^q), 1 <= q <= 8, plus the small 0/1 matrices built
// from field structure (one-hot symbol embedding, symbol permutations, and
// the parity rows used by the constraint builder).
//
// Addition is bitwise XOR (characteristic two).  Multiplication goes through
// log/antilog tables built from a fixed primitive polynomial per q; see
// src/field.cpp for the polynomial list.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace nbqp {

using gf_t = std::uint8_t; // field element, value < 2^q

struct FieldContext {
    int q = 0;                      // field exponent
    unsigned primitive_poly = 0;    // bitmask incl. the x^q term
    std::vector<gf_t> log_table;    // length 2^q; log_table[0] unused
    std::vector<gf_t> antilog_table;// length 2^q; antilog_table[i] = x^i, i < 2^q-1

    int order() const { return 1 << q; }       // 2^q
    int nonzero() const { return (1 << q) - 1; } // 2^q - 1, the one-hot block size
};

// Build the context for a given exponent.  Throws std::invalid_argument for
// q outside [1,8].
FieldContext make_field(int q);

inline gf_t gf_add(gf_t a, gf_t b) { return static_cast<gf_t>(a ^ b); }

// Product in GF(2^q); 0 absorbs, 1 is the identity.
gf_t gf_mul(gf_t a, gf_t b, const FieldContext& ctx);

// Multiplicative inverse of a nonzero element.
gf_t gf_inv(gf_t a, const FieldContext& ctx);

// One-hot embedding of a symbol: length 2^q-1, a single 1 at position u
// (array index u-1) for nonzero u, all-zeros for u = 0.
std::vector<std::uint8_t> symbol_to_binary(gf_t u, const FieldContext& ctx);

// The permutation induced on one-hot positions by multiplication with a
// nonzero h: position j maps to position h*j.  Stored as an index map, never
// as a dense matrix; dense() materializes the 0/1 matrix for cross-checks.
struct SymbolPermutation {
    int size = 0;                // 2^q - 1
    std::vector<gf_t> image;     // image[j-1] = h*j, for j = 1..2^q-1

    // y[h*j - 1] = x[j - 1]; applying to symbol_to_binary(u) yields
    // symbol_to_binary(h*u).
    std::vector<std::uint8_t> apply(const std::vector<std::uint8_t>& x) const;
    // Dense 0/1 matrix D with D[i][j] = 1 iff (i+1) = h*(j+1).
    std::vector<std::vector<std::uint8_t>> dense() const;
};

// Throws std::invalid_argument for h = 0 (not a permutation).
SymbolPermutation permutation_matrix(gf_t h, const FieldContext& ctx);

// q x (2^q-1) matrix whose column j (1-based) is the binary expansion of j;
// row(i) picks out bit i (value 2^i) of the column index.
struct BitMatrix {
    int rows = 0; // q
    int cols = 0; // 2^q - 1
    std::vector<std::vector<std::uint8_t>> data; // data[i][j-1] = bit i of j

    const std::vector<std::uint8_t>& row(int i) const { return data.at(i); }
    std::uint8_t at(int i, int j0) const { return data.at(i).at(j0); }
};

BitMatrix bit_matrix(const FieldContext& ctx);

// Row r with r[j-1] = popcount(l & (j*h)) mod 2 for j = 1..2^q-1: the parity
// of the bit combination selected by l, evaluated after the h-permutation.
// Every such row has exactly 2^{q-1} ones.  Throws for l = 0 or h = 0.
std::vector<std::uint8_t> bit_row_after_permutation(gf_t l, gf_t h, const FieldContext& ctx);

} // namespace nbqp
