#pragma once
// Monte Carlo frame-error simulation and the command-line front end.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nbqp/channel.hpp"
#include "nbqp/codeio.hpp"
#include "nbqp/padmm.hpp"

namespace nbqp {

struct FrameResult {
    std::uint64_t frame_index = 0;
    int iterations = 0;
    bool converged = false;
    bool syndrome_valid = false;
    int symbol_errors = 0;
    bool frame_error = false; // symbol_errors > 0
};

struct RunSummary {
    std::vector<FrameResult> frames;
    std::uint64_t frame_count = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t symbol_error_total = 0;
    std::uint64_t converged_frames = 0;
    double fer = 0.0;             // frame_errors / frame_count
    double ser = 0.0;             // symbol_error_total / (frame_count * n)
    double mean_iterations = 0.0;
    DecoderConfig config;         // snapshot of the decoder parameters used
    std::string code_id;          // "n<n>_m<m>_q<q>"
    std::string modulation;
    double esn0_db = 0.0;
    std::uint64_t seed = 0;
};

enum class Source { AllZeros, RandomCodeword };

// Counter-based per-frame seeding: the stream for a frame depends only on
// (master_seed, frame_index), never on thread scheduling or worker count.
std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t frame_index);

// Runs `frames` independent transmissions of `code` over AWGN at esn0_db and
// decodes each one.  `workers` threads share an atomic frame counter; results
// are merged by frame index, so output is identical for any worker count.
// When frame0_trajectory is non-null it receives the (iteration, r1sq, r2sq)
// trace of frame 0.
RunSummary run_trials(const ParityCheckCode& code, const ModulationScheme& scheme,
                      double esn0_db, std::uint64_t frames, const DecoderConfig& config,
                      std::uint64_t master_seed, Source source, int workers = 1,
                      std::vector<std::array<double, 3>>* frame0_trajectory = nullptr);

// Fixed columns frame,iterations,converged,syndrome_valid,symbol_errors,
// frame_error, then a trailing commented summary block (# fer=...).
// Byte-identical for identical summaries.
void write_csv(std::ostream& os, const RunSummary& summary);

// Small GF(4) code used by self-tests and as the oracle-compare default.
std::string builtin_tiny_code_text();

// Subcommands: validate, decode, simulate, oracle-compare.
// Exit 0 on success, 1 on validation/processing failure, 2 on usage error.
int cli_main(int argc, char** argv);

} // namespace nbqp
