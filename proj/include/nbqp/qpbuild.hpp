#pragma once
// Check decomposition and the QP decoding model: every parity check becomes a
// chain of three-variable checks; each three-variable check contributes
// 4(2^q-1) signed parity-box rows; one simplex row per extended variable caps
// its one-hot block at 1.
//
// The constraint matrix A has entries in {-1,0,+1} only.  It is never stored
// densely: rows live as per-(check, l) support lists plus the fixed 4x3 sign
// pattern, so A*v and A^T*y are pure add/subtract gathers.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nbqp/codeio.hpp"
#include "nbqp/field.hpp"

namespace nbqp {

struct ThreeVarCheck {
    struct Slot {
        int var = 0;   // extended variable index in 0..n+gamma_a-1
        gf_t coeff = 1; // nonzero; always 1 for auxiliary slots
    };
    std::array<Slot, 3> slots;
    int origin_row = 0; // originating check row of the parity-check matrix
};

struct Decomposition {
    std::vector<ThreeVarCheck> checks;
    int gamma_a = 0; // auxiliaries introduced; they follow the n originals
};

// Chain a degree-d check (d >= 3) into d-2 three-variable checks with d-3
// fresh auxiliaries: (h1u1, h2u2, g1), then (g_t, h_{t+2}u_{t+2}, g_{t+1})
// for t = 1..d-4, then (g_{d-3}, h_{d-1}u_{d-1}, h_d u_d).
// Throws std::invalid_argument ("unsupported check degree") below degree 3.
Decomposition decompose(const ParityCheckCode& code);

// One local constraint row of a check block: (column, sign) pairs over the
// 3(2^q-1) local columns plus its right-hand side.
struct LocalRow {
    std::vector<std::pair<int, std::int8_t>> cols;
    int rhs = 0;
};

// The 4(2^q-1) rows of one three-variable check: for every nonzero l, the
// parity rows r_k = bit_row_after_permutation(l, h_k) combined under the sign
// pattern P = [+,-,-; -,+,-; -,-,+; +,+,+] with right-hand sides (0,0,0,2).
std::vector<LocalRow> build_check_block(const ThreeVarCheck& chk, const FieldContext& ctx);

// theta/omega of the closed-form inverse of one diagonal block
// A_i^T A_i + eps*I  (size 2^q-1, diagonal 4d*2^{q-1}+1+eps, off-diagonal
// 4d*2^{q-2}+1):
//   theta - omega = 1/(2^q d + eps)
//   omega = -(2^q d + 1) / ((2^q d + eps) * ((2^q d + eps) + (2^q d + 1)(2^q - 1)))
// The numerator is the block's off-diagonal entry (its "+1" comes from the
// simplex-row Gram term); variants that drop the "+1" fail the inverse
// identity, which the tests arbitrate by dense inversion.  Requires eps > 0.
std::pair<double, double> compute_theta_omega(int d, double eps, int q);

struct QpModel {
    FieldContext ctx;
    int q = 0;
    int K = 0;          // 2^q - 1, one-hot block size
    int n_orig = 0;
    int gamma_a = 0;
    int gamma_c = 0;
    int n_ext = 0;      // n_orig + gamma_a
    long M = 0;         // 4*K*gamma_c + n_ext
    long N = 0;         // K * n_ext
    std::vector<ThreeVarCheck> checks;
    std::vector<int> degrees;   // per extended variable
    std::vector<double> theta, omega;
    double epsilon = 0.0;
    Eigen::VectorXd b;          // (0,0,0,2) per (check, l) group; 1 per simplex row

    // supp[h][l] lists the 1-based block offsets j with parity
    // popcount(l & (j*h)) odd; shared by all slots with coefficient h.
    std::vector<std::vector<std::vector<int>>> supp;

    long check_row_base(int tau) const { return static_cast<long>(tau) * 4 * K; }
    long simplex_row_base() const { return static_cast<long>(gamma_c) * 4 * K; }
};

// Decompose `code` and materialize the model.  epsilon = 1 + rho/mu - alpha/mu
// must come out positive (guaranteed by rho > alpha).
QpModel assemble_model(const ParityCheckCode& code, const FieldContext& ctx,
                       double alpha, double rho, double mu);

// y = A v  (y has length M).  Signed gathers only.
void multiply_A(const QpModel& model, const Eigen::VectorXd& v, Eigen::VectorXd& y);
// x = A^T y  (x has length N).  Signed scatters only.
void multiply_At(const QpModel& model, const Eigen::VectorXd& y, Eigen::VectorXd& x);

// Stream every structurally nonzero entry of A as (row, col, value) with
// value in {-1,+1}; the authoritative definition of A for cross-checks,
// validation, and the debug dump.
void for_each_entry(const QpModel& model,
                    const std::function<void(long row, long col, int value)>& fn);

// Matrix-Market-style coordinate dump (`row col value`, 1-based).
void dump_model(const QpModel& model, std::ostream& out);

} // namespace nbqp
