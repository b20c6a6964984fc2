#pragma once
// Proximal-ADMM iteration for the QP decoding model: closed-form per-block
// v-update, projected e1/e2 updates, relaxed (p, z) tracking, dual ascent,
// stopping on both squared residuals, and the one-hot hard decision.
//
// Dual vectors are stored scaled (y/mu), so every update in the loop is an
// addition/subtraction; unscaled multipliers are reconstructed only for
// diagnostics.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nbqp/channel.hpp"
#include "nbqp/codeio.hpp"
#include "nbqp/qpbuild.hpp"

namespace nbqp {

struct DecoderConfig {
    double mu = 0.8;
    double alpha = 0.5;
    double rho = 0.52;
    double beta = 0.9;
    double tol = 1e-5; // threshold on the SQUARED residual norms
    int max_iter = 500;
    bool early_stop_on_syndrome = false; // opt-in; off to match the plain iteration

    // mu = 0.8 for q <= 2, 0.6 for larger fields; everything else fixed.
    static DecoderConfig defaults_for(int q);
    // Throws std::invalid_argument on rho <= alpha, nonpositive mu/alpha/tol,
    // beta outside (0,1], or max_iter < 1.
    void validate() const;
};

struct DecoderState {
    Eigen::VectorXd v, e2, p, z2, y2; // length N  (y2 holds y2/mu)
    Eigen::VectorXd e1, z1, y1;       // length M  (y1 holds y1/mu)
    long iter = 0;
    double r1sq = 0.0; // ||A v + e1 - b||^2
    double r2sq = 0.0; // ||v - e2||^2
    double mu = 1.0;   // scale of the stored duals (set by decode)
};

// All eight vectors zero; residuals evaluated at that point.
DecoderState init_state(const QpModel& model);

// [gamma; 0]: cost entries for original symbols, zeros for auxiliaries.
Eigen::VectorXd extend_cost(const CostVector& cost, const QpModel& model);

// phi = A^T(b - e1 - y1/mu) + (e2 - y2/mu) + (rho/mu) p - (lambda + alpha/2)/mu
Eigen::VectorXd phi_vector(const DecoderState& state, const QpModel& model,
                           const Eigen::VectorXd& lambda, const DecoderConfig& cfg);

// v <- (A^T A + eps I)^{-1} phi via the per-block closed form
// v_i = (theta_i - omega_i) phi_i + omega_i * sum(phi_i) * 1.
void v_update(DecoderState& state, const QpModel& model, const Eigen::VectorXd& phi);

// e1_j <- max(0, mu/(rho+mu) * (b_j - (Av)_j - y1_j/mu + (rho/mu) z1_j)).
// Av is the product for the already-updated v (recomputed by the convenience
// overload).
void e1_update(DecoderState& state, const QpModel& model, const DecoderConfig& cfg,
               const Eigen::VectorXd& Av);
void e1_update(DecoderState& state, const QpModel& model, const DecoderConfig& cfg);

// e2_l <- clamp_[0,1]( mu/(rho+mu) * (v_l + y2_l/mu + (rho/mu) z2_l) ).
void e2_update(DecoderState& state, const QpModel& model, const DecoderConfig& cfg);

// p += beta (v - p); z1 += beta (e1 - z1); z2 += beta (e2 - z2);
// y1/mu += Av + e1 - b; y2/mu += v - e2; refresh r1sq/r2sq from the same Av.
void relax_and_dual_update(DecoderState& state, const QpModel& model, const DecoderConfig& cfg,
                           const Eigen::VectorXd& Av);
void relax_and_dual_update(DecoderState& state, const QpModel& model, const DecoderConfig& cfg);

// Per original symbol block: argmax position sigma* (ties toward the smaller
// index), emitted as sigma* when its value >= 0.5, else the zero symbol.
Codeword hard_decision(const Eigen::VectorXd& v, const QpModel& model);

struct DecodeResult {
    Codeword word;
    int iterations = 0;
    bool converged = false;
    bool syndrome_valid = false;
    double r1sq = 0.0;
    double r2sq = 0.0;
};

struct DecodeOptions {
    // When set, receives (iteration, r1sq, r2sq) after every iteration.
    std::vector<std::array<double, 3>>* trajectory = nullptr;
    // When set, receives the final iterate (for diagnostics).
    DecoderState* final_state = nullptr;
};

// Run the full iteration until both squared residuals fall to cfg.tol or
// max_iter is hit; non-convergence is a result, not an error.
DecodeResult decode(const QpModel& model, const ParityCheckCode& code,
                    const Eigen::VectorXd& lambda, const DecoderConfig& cfg,
                    const DecodeOptions& opts = {});

// Max first-order violation over the box-coordinate directions at the final
// iterate clipped to [0,1]^N, with multipliers reconstructed from the scaled
// duals.  G = grad f + A^T y1 prices the polytope rows into the gradient; at
// each coordinate the feasible directions require G >= 0 / y2 <= 0 at the
// lower bound, G <= 0 / y2 >= 0 at the upper bound, and G = y2 = 0 in the
// interior (bounds classified with a small margin).  Zero at an exact
// stationary point; smaller is better.
double stationarity_residual(const DecoderState& state, const QpModel& model,
                             const Eigen::VectorXd& lambda, double alpha);

} // namespace nbqp
