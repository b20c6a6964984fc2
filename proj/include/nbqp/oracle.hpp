#pragma once
// Independent reference implementations used to arbitrate closed-form
// identities and small-instance decoding claims.  These deliberately avoid
// the solver and constraint-builder modules: brute-force enumeration and
// plain Gaussian elimination only.

#include <array>
#include <set>
#include <vector>

#include "nbqp/codeio.hpp"
#include "nbqp/field.hpp"

namespace nbqp {

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a; // row-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

// Inverse by Gaussian elimination with partial pivoting; pivots smaller than
// 1e-12 in magnitude raise std::runtime_error ("singular matrix").
DenseMatrix dense_inverse(const DenseMatrix& mat);

// All (u1,u2,u3) with h1*u1 XOR h2*u2 XOR h3*u3 = 0; always 2^{2q} triples
// (any two symbols determine the third).
std::set<std::array<gf_t, 3>> enumerate_three_var_solutions(gf_t h1, gf_t h2, gf_t h3,
                                                            const FieldContext& ctx);

// Cost of a codeword under the block cost vector gamma (length n*(2^q-1),
// entry for symbol s of position i at gamma[i*(2^q-1) + s - 1]; the zero
// symbol costs nothing).
double codeword_cost(const Codeword& word, const std::vector<double>& gamma, int q);

// Exhaustive maximum-likelihood decoding: enumerate the encoder's message
// space (hard 2^20 codebook bound), return the gamma-cost minimizer, ties
// broken by the lexicographically smallest codeword.  `reverse_order` flips
// the enumeration direction; results must not depend on it.
Codeword ml_decode_bruteforce(const ParityCheckCode& code, const FieldContext& ctx,
                              const std::vector<double>& gamma, bool reverse_order = false);

} // namespace nbqp
