#include "nbqp/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace nbqp {

const char* mod_name(ModKind kind) {
    switch (kind) {
        case ModKind::BPSK: return "bpsk";
        case ModKind::QPSK: return "qpsk";
        case ModKind::QAM16: return "qam16";
    }
    return "?";
}

namespace {

// Gray-ordered 4-PAM axis: bit pairs 00,01,11,10 sweep -3,-1,+1,+3.
double pam4_gray(unsigned two_bits) {
    switch (two_bits) {
        case 0: return -3.0;
        case 1: return -1.0;
        case 3: return +1.0;
        default: return +3.0; // 2
    }
}

} // namespace

ModulationScheme make_scheme(ModKind kind, int q) {
    const int size = 1 << q;
    ModulationScheme s;
    s.name = kind;
    s.q = q;
    switch (kind) {
        case ModKind::BPSK:
            if (size != 2) throw std::invalid_argument("bpsk carries 1 bit per symbol; need q=1");
            s.constellation = {{+1.0, 0.0}, {-1.0, 0.0}};
            break;
        case ModKind::QPSK: {
            if (size != 4) throw std::invalid_argument("qpsk carries 2 bits per symbol; need q=2");
            const double a = 1.0 / std::sqrt(2.0);
            // bit0 flips I, bit1 flips Q (independent per-axis Gray labeling)
            for (unsigned u = 0; u < 4; ++u)
                s.constellation.push_back({a * (1.0 - 2.0 * (u & 1)), a * (1.0 - 2.0 * ((u >> 1) & 1))});
            break;
        }
        case ModKind::QAM16: {
            if (size != 16) throw std::invalid_argument("16qam carries 4 bits per symbol; need q=4");
            const double a = 1.0 / std::sqrt(10.0);
            // high bit pair -> I axis, low pair -> Q axis, Gray per axis
            for (unsigned u = 0; u < 16; ++u)
                s.constellation.push_back({a * pam4_gray((u >> 2) & 3), a * pam4_gray(u & 3)});
            break;
        }
    }
    s.symbol_map.resize(size);
    for (int u = 0; u < size; ++u) s.symbol_map[u] = u;
    return s;
}

std::vector<std::complex<double>> modulate(const Codeword& word, const ModulationScheme& scheme) {
    std::vector<std::complex<double>> out;
    out.reserve(word.symbols.size());
    for (gf_t u : word.symbols) {
        if (u >= scheme.constellation.size())
            throw std::invalid_argument("symbol exceeds constellation size");
        out.push_back(scheme.point(u));
    }
    return out;
}

std::vector<std::complex<double>> awgn(const std::vector<std::complex<double>>& samples,
                                       double esn0_db, std::uint64_t seed) {
    const double n0 = std::pow(10.0, -esn0_db / 10.0);
    const double sigma = std::sqrt(n0 / 2.0); // per real dimension
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> out;
    out.reserve(samples.size());
    for (auto s : samples) {
        const double nr = g(rng), ni = g(rng);
        out.push_back({s.real() + sigma * nr, s.imag() + sigma * ni});
    }
    return out;
}

gf_t hard_demap(std::complex<double> r, const ModulationScheme& scheme) {
    int best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (size_t u = 0; u < scheme.constellation.size(); ++u) {
        const double d = std::norm(r - scheme.point(static_cast<gf_t>(u)));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(u);
        }
    }
    return static_cast<gf_t>(best);
}

CostVector cost_vector(const std::vector<std::complex<double>>& received,
                       const ModulationScheme& scheme, double esn0_db, bool clip_llr) {
    const double n0 = std::pow(10.0, -esn0_db / 10.0); // = 2 sigma_n^2
    const int K = (1 << scheme.q) - 1;
    CostVector cv;
    cv.n = static_cast<int>(received.size());
    cv.q = scheme.q;
    cv.gamma.resize(static_cast<size_t>(cv.n) * K);
    for (int i = 0; i < cv.n; ++i) {
        const double d0 = std::norm(received[i] - scheme.point(0));
        for (int sigma = 1; sigma <= K; ++sigma) {
            double g = (std::norm(received[i] - scheme.point(static_cast<gf_t>(sigma))) - d0) / n0;
            if (clip_llr) g = std::max(-50.0, std::min(50.0, g));
            cv.gamma[static_cast<size_t>(i) * K + sigma - 1] = g;
        }
    }
    return cv;
}

namespace {

constexpr char kMagic[8] = {'N', 'B', 'Q', 'P', 'C', 'S', 'T', '1'};

void put_u32le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void dump_cost(const CostVector& cost, std::ostream& out) {
    out.write(kMagic, 8);
    put_u32le(out, static_cast<std::uint32_t>(cost.n));
    put_u32le(out, static_cast<std::uint32_t>(cost.q));
    for (double g : cost.gamma) {
        std::uint64_t bits;
        std::memcpy(&bits, &g, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 8);
    }
}

CostVector load_cost(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("cost-vector file: bad magic");
    CostVector cv;
    cv.n = static_cast<int>(get_u32le(in));
    cv.q = static_cast<int>(get_u32le(in));
    if (!in || cv.n < 1 || cv.q < 1 || cv.q > 8)
        throw std::runtime_error("cost-vector file: bad header");
    const size_t count = static_cast<size_t>(cv.n) * ((1 << cv.q) - 1);
    cv.gamma.resize(count);
    for (size_t t = 0; t < count; ++t) {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        if (!in) throw std::runtime_error("cost-vector file: truncated payload");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        std::memcpy(&cv.gamma[t], &bits, 8);
    }
    return cv;
}

void save_cost_file(const CostVector& cost, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    dump_cost(cost, out);
}

CostVector load_cost_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open cost-vector file: " + path);
    return load_cost(in);
}

} // namespace nbqp
