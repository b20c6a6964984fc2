#pragma once
// Modulation, AWGN sampling, and the log-likelihood cost vector that defines
// the decoding objective.
//
// Conventions: Es = 1 (unit average constellation energy), N0 = 10^(-EsN0/10),
// noise variance N0/2 per real dimension.  BPSK maps 0 -> +1, 1 -> -1; QPSK
// and 16QAM use Gray labelings of the integer symbol value (see make_scheme).

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nbqp/codeio.hpp"
#include "nbqp/field.hpp"

namespace nbqp {

enum class ModKind { BPSK, QPSK, QAM16 };

const char* mod_name(ModKind kind);

struct ModulationScheme {
    ModKind name = ModKind::BPSK;
    int q = 0;
    std::vector<std::complex<double>> constellation; // size 2^q, unit mean energy
    std::vector<int> symbol_map;                     // field element -> point index (bijection)

    std::complex<double> point(gf_t u) const { return constellation[symbol_map[u]]; }
};

// Throws std::invalid_argument when the constellation size is not 2^q.
ModulationScheme make_scheme(ModKind kind, int q);

std::vector<std::complex<double>> modulate(const Codeword& word, const ModulationScheme& scheme);

// Adds circular complex Gaussian noise of total variance N0 = 10^(-esn0_db/10)
// (N0/2 per real dimension).  Deterministic for a given seed.
std::vector<std::complex<double>> awgn(const std::vector<std::complex<double>>& samples,
                                       double esn0_db, std::uint64_t seed);

// Nearest-constellation-point hard demap.
gf_t hard_demap(std::complex<double> r, const ModulationScheme& scheme);

struct CostVector {
    int n = 0;
    int q = 0;
    // Blocks of 2^q-1 per position; entry sigma (index sigma-1) is
    // log p(r_i | u_i = 0) - log p(r_i | u_i = sigma).
    std::vector<double> gamma;
};

// gamma_{i,sigma} = (|r_i - s_sigma|^2 - |r_i - s_0|^2) / (2 sigma_n^2) with
// sigma_n^2 = N0/2, i.e. the exact log density ratio.  clip_llr caps entries
// at +/-50 (off by default).
CostVector cost_vector(const std::vector<std::complex<double>>& received,
                       const ModulationScheme& scheme, double esn0_db, bool clip_llr = false);

// Binary serialization: 16-byte header (8-byte magic "NBQPCST1", uint32 n,
// uint32 q, little-endian) followed by n*(2^q-1) little-endian doubles.
void dump_cost(const CostVector& cost, std::ostream& out);
CostVector load_cost(std::istream& in);
void save_cost_file(const CostVector& cost, const std::string& path);
CostVector load_cost_file(const std::string& path);

} // namespace nbqp
