#include "nbqp/qpbuild.hpp"

#include <ostream>
#include <stdexcept>

namespace nbqp {

namespace {

// Sign pattern P of the four parity-box rows and their right-hand sides.
constexpr int kP[4][3] = {{+1, -1, -1}, {-1, +1, -1}, {-1, -1, +1}, {+1, +1, +1}};
constexpr int kT[4] = {0, 0, 0, 2};

} // namespace

Decomposition decompose(const ParityCheckCode& code) {
    Decomposition out;
    int next_aux = code.n;
    for (int j = 0; j < code.m; ++j) {
        const auto& row = code.rows[j];
        const int d = static_cast<int>(row.size());
        if (d < 3) throw std::invalid_argument("unsupported check degree");
        auto orig = [&](int t) { return ThreeVarCheck::Slot{row[t].first, row[t].second}; };
        auto aux = [&](int g) { return ThreeVarCheck::Slot{next_aux + g - 1, gf_t{1}}; };
        if (d == 3) {
            out.checks.push_back({{orig(0), orig(1), orig(2)}, j});
            continue;
        }
        // g_1 = h1 u1 + h2 u2; g_{t+1} = g_t + h_{t+2} u_{t+2};
        // final check closes the chain over the last two originals.
        out.checks.push_back({{orig(0), orig(1), aux(1)}, j});
        for (int t = 1; t <= d - 4; ++t)
            out.checks.push_back({{aux(t), orig(t + 1), aux(t + 1)}, j});
        out.checks.push_back({{aux(d - 3), orig(d - 2), orig(d - 1)}, j});
        next_aux += d - 3;
    }
    out.gamma_a = next_aux - code.n;
    return out;
}

std::vector<LocalRow> build_check_block(const ThreeVarCheck& chk, const FieldContext& ctx) {
    const int K = ctx.nonzero();
    std::vector<LocalRow> rows;
    rows.reserve(4 * K);
    for (int l = 1; l <= K; ++l) {
        std::array<std::vector<std::uint8_t>, 3> r;
        for (int k = 0; k < 3; ++k)
            r[k] = bit_row_after_permutation(static_cast<gf_t>(l), chk.slots[k].coeff, ctx);
        for (int p = 0; p < 4; ++p) {
            LocalRow lr;
            lr.rhs = kT[p];
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < K; ++j)
                    if (r[k][j])
                        lr.cols.emplace_back(k * K + j, static_cast<std::int8_t>(kP[p][k]));
            rows.push_back(std::move(lr));
        }
    }
    return rows;
}

std::pair<double, double> compute_theta_omega(int d, double eps, int q) {
    if (eps <= 0.0) throw std::invalid_argument("theta/omega require eps > 0");
    const double twoq = static_cast<double>(1 << q);
    const double gap = twoq * d + eps;        // diagonal minus off-diagonal
    const double off = twoq * d + 1.0;        // block off-diagonal entry
    const double omega = -off / (gap * (gap + off * (twoq - 1.0)));
    const double theta = omega + 1.0 / gap;
    return {theta, omega};
}

QpModel assemble_model(const ParityCheckCode& code, const FieldContext& ctx,
                       double alpha, double rho, double mu) {
    if (mu <= 0.0) throw std::invalid_argument("mu must be positive");
    QpModel model;
    model.ctx = ctx;
    model.q = ctx.q;
    model.K = ctx.nonzero();
    model.n_orig = code.n;
    model.epsilon = 1.0 + rho / mu - alpha / mu;
    if (model.epsilon <= 0.0)
        throw std::invalid_argument("model requires eps = 1 + (rho - alpha)/mu > 0");

    Decomposition dec = decompose(code);
    model.checks = std::move(dec.checks);
    model.gamma_a = dec.gamma_a;
    model.gamma_c = static_cast<int>(model.checks.size());
    model.n_ext = model.n_orig + model.gamma_a;
    model.M = static_cast<long>(4) * model.K * model.gamma_c + model.n_ext;
    model.N = static_cast<long>(model.K) * model.n_ext;

    model.degrees.assign(model.n_ext, 0);
    for (const auto& chk : model.checks)
        for (const auto& slot : chk.slots) ++model.degrees[slot.var];

    model.theta.resize(model.n_ext);
    model.omega.resize(model.n_ext);
    for (int i = 0; i < model.n_ext; ++i) {
        auto [th, om] = compute_theta_omega(model.degrees[i], model.epsilon, model.q);
        model.theta[i] = th;
        model.omega[i] = om;
    }

    model.b = Eigen::VectorXd::Zero(model.M);
    for (int tau = 0; tau < model.gamma_c; ++tau)
        for (int l = 1; l <= model.K; ++l)
            for (int p = 0; p < 4; ++p)
                model.b[model.check_row_base(tau) + 4 * (l - 1) + p] = kT[p];
    for (int i = 0; i < model.n_ext; ++i) model.b[model.simplex_row_base() + i] = 1.0;

    // Parity supports per coefficient value; shared across checks.
    model.supp.assign(model.K + 1, {});
    for (int h = 1; h <= model.K; ++h) {
        auto& per_l = model.supp[h];
        per_l.assign(model.K + 1, {});
        for (int l = 1; l <= model.K; ++l) {
            auto row = bit_row_after_permutation(static_cast<gf_t>(l), static_cast<gf_t>(h), ctx);
            for (int j = 1; j <= model.K; ++j)
                if (row[j - 1]) per_l[l].push_back(j);
        }
    }
    return model;
}

void multiply_A(const QpModel& model, const Eigen::VectorXd& v, Eigen::VectorXd& y) {
    const int K = model.K;
    y.setZero(model.M);
    for (int tau = 0; tau < model.gamma_c; ++tau) {
        const auto& chk = model.checks[tau];
        const long base_row = model.check_row_base(tau);
        for (int l = 1; l <= K; ++l) {
            double s[3];
            for (int k = 0; k < 3; ++k) {
                const long col0 = static_cast<long>(chk.slots[k].var) * K - 1;
                double acc = 0.0;
                for (int j : model.supp[chk.slots[k].coeff][l]) acc += v[col0 + j];
                s[k] = acc;
            }
            double* out = y.data() + base_row + 4 * (l - 1);
            out[0] = s[0] - s[1] - s[2];
            out[1] = -s[0] + s[1] - s[2];
            out[2] = -s[0] - s[1] + s[2];
            out[3] = s[0] + s[1] + s[2];
        }
    }
    const long srow = model.simplex_row_base();
    for (int i = 0; i < model.n_ext; ++i) {
        const long col0 = static_cast<long>(i) * K;
        double acc = 0.0;
        for (int j = 0; j < K; ++j) acc += v[col0 + j];
        y[srow + i] = acc;
    }
}

void multiply_At(const QpModel& model, const Eigen::VectorXd& y, Eigen::VectorXd& x) {
    const int K = model.K;
    x.setZero(model.N);
    for (int tau = 0; tau < model.gamma_c; ++tau) {
        const auto& chk = model.checks[tau];
        const long base_row = model.check_row_base(tau);
        for (int l = 1; l <= K; ++l) {
            const double* yr = y.data() + base_row + 4 * (l - 1);
            // Columns of the sign pattern P applied to the four row values.
            const double g[3] = {yr[0] - yr[1] - yr[2] + yr[3],
                                 -yr[0] + yr[1] - yr[2] + yr[3],
                                 -yr[0] - yr[1] + yr[2] + yr[3]};
            for (int k = 0; k < 3; ++k) {
                const long col0 = static_cast<long>(chk.slots[k].var) * K - 1;
                for (int j : model.supp[chk.slots[k].coeff][l]) x[col0 + j] += g[k];
            }
        }
    }
    const long srow = model.simplex_row_base();
    for (int i = 0; i < model.n_ext; ++i) {
        const double yi = y[srow + i];
        const long col0 = static_cast<long>(i) * K;
        for (int j = 0; j < K; ++j) x[col0 + j] += yi;
    }
}

void for_each_entry(const QpModel& model,
                    const std::function<void(long row, long col, int value)>& fn) {
    const int K = model.K;
    for (int tau = 0; tau < model.gamma_c; ++tau) {
        const auto& chk = model.checks[tau];
        const long base_row = model.check_row_base(tau);
        for (int l = 1; l <= K; ++l)
            for (int p = 0; p < 4; ++p) {
                const long row = base_row + 4 * (l - 1) + p;
                for (int k = 0; k < 3; ++k) {
                    const long col0 = static_cast<long>(chk.slots[k].var) * K - 1;
                    for (int j : model.supp[chk.slots[k].coeff][l])
                        fn(row, col0 + j, kP[p][k]);
                }
            }
    }
    const long srow = model.simplex_row_base();
    for (int i = 0; i < model.n_ext; ++i)
        for (int j = 0; j < K; ++j)
            fn(srow + i, static_cast<long>(i) * K + j, 1);
}

void dump_model(const QpModel& model, std::ostream& out) {
    long nnz = 0;
    for_each_entry(model, [&](long, long, int) { ++nnz; });
    out << "%%MatrixMarket matrix coordinate integer general\n";
    out << model.M << ' ' << model.N << ' ' << nnz << '\n';
    for_each_entry(model,
                   [&](long r, long c, int v) { out << r + 1 << ' ' << c + 1 << ' ' << v << '\n'; });
}

} // namespace nbqp
