#include "nbqp/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace nbqp {

DenseMatrix dense_inverse(const DenseMatrix& mat) {
    if (mat.rows != mat.cols) throw std::runtime_error("dense_inverse: matrix not square");
    const int n = mat.rows;
    // Augmented [M | I], eliminate in place.
    DenseMatrix w(n, 2 * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) w.at(r, c) = mat.at(r, c);
        w.at(r, n + r) = 1.0;
    }
    for (int c = 0; c < n; ++c) {
        int pr = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(w.at(r, c)) > std::fabs(w.at(pr, c))) pr = r;
        if (std::fabs(w.at(pr, c)) <= 1e-12) throw std::runtime_error("singular matrix");
        if (pr != c)
            for (int cc = 0; cc < 2 * n; ++cc) std::swap(w.at(pr, cc), w.at(c, cc));
        const double inv = 1.0 / w.at(c, c);
        for (int cc = 0; cc < 2 * n; ++cc) w.at(c, cc) *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = w.at(r, c);
            if (f == 0.0) continue;
            for (int cc = 0; cc < 2 * n; ++cc) w.at(r, cc) -= f * w.at(c, cc);
        }
    }
    DenseMatrix inv(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) inv.at(r, c) = w.at(r, n + c);
    return inv;
}

std::set<std::array<gf_t, 3>> enumerate_three_var_solutions(gf_t h1, gf_t h2, gf_t h3,
                                                            const FieldContext& ctx) {
    if (h1 == 0 || h2 == 0 || h3 == 0)
        throw std::invalid_argument("three-variable check needs nonzero coefficients");
    std::set<std::array<gf_t, 3>> out;
    const int sz = ctx.order();
    for (int u1 = 0; u1 < sz; ++u1)
        for (int u2 = 0; u2 < sz; ++u2)
            for (int u3 = 0; u3 < sz; ++u3) {
                gf_t s = gf_add(gf_mul(h1, static_cast<gf_t>(u1), ctx),
                                gf_add(gf_mul(h2, static_cast<gf_t>(u2), ctx),
                                       gf_mul(h3, static_cast<gf_t>(u3), ctx)));
                if (s == 0)
                    out.insert({static_cast<gf_t>(u1), static_cast<gf_t>(u2), static_cast<gf_t>(u3)});
            }
    return out;
}

double codeword_cost(const Codeword& word, const std::vector<double>& gamma, int q) {
    const int K = (1 << q) - 1;
    double c = 0.0;
    for (size_t i = 0; i < word.symbols.size(); ++i)
        if (word.symbols[i] != 0) c += gamma[i * K + word.symbols[i] - 1];
    return c;
}

Codeword ml_decode_bruteforce(const ParityCheckCode& code, const FieldContext& ctx,
                              const std::vector<double>& gamma, bool reverse_order) {
    const Encoder enc = derive_encoder(code, ctx);
    const int sz = ctx.order();
    // Codebook size 2^(q*k); refuse beyond 2^20.
    if (static_cast<long>(code.q) * enc.k > 20)
        throw std::runtime_error("codebook too large for brute-force enumeration");
    const long count = 1L << (static_cast<long>(code.q) * enc.k);

    Codeword best;
    double best_cost = 0.0;
    bool have = false;
    std::vector<gf_t> msg(enc.k, 0);
    for (long t = 0; t < count; ++t) {
        long idx = reverse_order ? (count - 1 - t) : t;
        for (int s = 0; s < enc.k; ++s) {
            msg[s] = static_cast<gf_t>(idx % sz);
            idx /= sz;
        }
        Codeword w = enc.encode(msg, ctx);
        const double c = codeword_cost(w, gamma, code.q);
        if (!have || c < best_cost || (c == best_cost && w.symbols < best.symbols)) {
            best = w;
            best_cost = c;
            have = true;
        }
    }
    return best;
}

} // namespace nbqp
