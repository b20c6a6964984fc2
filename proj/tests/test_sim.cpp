#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nbqp/sim.hpp"

using namespace nbqp;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// Runs cli_main with a synthetic argv; argv[0] is the program name.
int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> store;
    store.emplace_back("nbqpdec");
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(store.size());
    for (auto& s : store) argv.push_back(s.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

// Redirects the process stdout to a file for the lifetime of the object so
// subcommand output can be inspected without spawning a child process.
class StdoutToFile {
  public:
    explicit StdoutToFile(const std::string& path) {
        std::fflush(stdout);
        saved_ = dup(fileno(stdout));
        REQUIRE(saved_ >= 0);
        FILE* f = std::freopen(path.c_str(), "w", stdout);
        REQUIRE(f != nullptr);
    }
    ~StdoutToFile() { restore(); }
    void restore() {
        if (saved_ < 0) return;
        std::fflush(stdout);
        dup2(saved_, fileno(stdout));
        close(saved_);
        saved_ = -1;
    }

  private:
    int saved_ = -1;
};

std::string csv_of(const RunSummary& s) {
    std::ostringstream ss;
    write_csv(ss, s);
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("frame seeds are deterministic and collision-free across frames") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t f = 0; f < 2000; ++f) {
        const std::uint64_t s = frame_seed(42, f);
        CHECK(s == frame_seed(42, f));
        seen.insert(s);
    }
    CHECK(seen.size() == 2000);
    // different master seeds give unrelated streams
    CHECK(frame_seed(42, 0) != frame_seed(43, 0));
    CHECK(frame_seed(0, 0) != frame_seed(0, 1));
}

TEST_CASE("bundled tiny code parses to the expected shape") {
    auto code = parse_code(builtin_tiny_code_text());
    CHECK(code.n == 6);
    CHECK(code.m == 3);
    CHECK(code.q == 2);
    CHECK(serialize(code) == builtin_tiny_code_text());
    auto enc = derive_encoder(code, make_field(code.q));
    CHECK(enc.k == 3);
    CHECK(enc.rank == 3);
}

TEST_CASE("noiseless run decodes every frame with zero errors") {
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto s = run_trials(code, scheme, 200.0, 100, cfg, 5, Source::AllZeros);
    CHECK(s.frame_count == 100);
    CHECK(s.frames.size() == 100);
    CHECK(s.fer == 0.0);
    CHECK(s.ser == 0.0);
    CHECK(s.frame_errors == 0);
    CHECK(s.symbol_error_total == 0);
    CHECK(s.converged_frames == 100);
    CHECK(s.mean_iterations > 0.0);
    CHECK(s.code_id == "n6_m3_q2");
    CHECK(s.modulation == "qpsk");
    CHECK(s.esn0_db == 200.0);
    CHECK(s.seed == 5);
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
        const auto& fr = s.frames[i];
        CHECK(fr.frame_index == i);
        CHECK(fr.symbol_errors == 0);
        CHECK_FALSE(fr.frame_error);
        CHECK(fr.syndrome_valid);
    }
}

TEST_CASE("random codewords decode error-free at high SNR below the clip range") {
    // Past ~14 dB the +/-50 cost clip saturates QPSK blocks and collapses the
    // margin between the sent symbol and its equidistant neighbour (whose
    // unclipped cost is noise-dominated with random sign), so genuinely
    // ambiguous maximum-likelihood ties appear.  12 dB is effectively
    // noiseless while every cost still sits inside the clip range.
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto s = run_trials(code, scheme, 12.0, 200, cfg, 5, Source::RandomCodeword);
    CHECK(s.fer == 0.0);
    CHECK(s.ser == 0.0);
    CHECK(s.converged_frames == 200);
}

TEST_CASE("per-frame records satisfy their invariants at moderate SNR") {
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto s = run_trials(code, scheme, 4.0, 120, cfg, 11, Source::RandomCodeword);
    for (const auto& fr : s.frames) {
        CHECK(fr.frame_error == (fr.symbol_errors > 0));
        CHECK(fr.iterations >= 1);
        CHECK(fr.iterations <= cfg.max_iter);
        CHECK(fr.symbol_errors <= code.n);
        if (fr.converged) CHECK(fr.iterations <= cfg.max_iter);
        if (!fr.converged) CHECK(fr.iterations == cfg.max_iter);
    }
}

TEST_CASE("summary statistics cross-foot against the per-frame rows") {
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto s = run_trials(code, scheme, 3.0, 150, cfg, 77, Source::RandomCodeword);
    std::uint64_t fe = 0, se = 0, cv = 0, it = 0;
    for (const auto& fr : s.frames) {
        fe += fr.frame_error ? 1 : 0;
        se += static_cast<std::uint64_t>(fr.symbol_errors);
        cv += fr.converged ? 1 : 0;
        it += static_cast<std::uint64_t>(fr.iterations);
    }
    CHECK(s.frame_errors == fe);
    CHECK(s.symbol_error_total == se);
    CHECK(s.converged_frames == cv);
    CHECK(s.fer == doctest::Approx(double(fe) / 150.0).epsilon(1e-15));
    CHECK(s.ser == doctest::Approx(double(se) / (150.0 * code.n)).epsilon(1e-15));
    CHECK(s.mean_iterations == doctest::Approx(double(it) / 150.0).epsilon(1e-15));
}

TEST_CASE("identical seeds give byte-identical CSV, different seeds differ") {
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto a = run_trials(code, scheme, 6.0, 40, cfg, 123, Source::RandomCodeword);
    auto b = run_trials(code, scheme, 6.0, 40, cfg, 123, Source::RandomCodeword);
    auto c = run_trials(code, scheme, 6.0, 40, cfg, 124, Source::RandomCodeword);
    CHECK(csv_of(a) == csv_of(b));
    CHECK(csv_of(a) != csv_of(c));
}

TEST_CASE("worker count does not change the results") {
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto w1 = run_trials(code, scheme, 5.0, 60, cfg, 9, Source::RandomCodeword, 1);
    auto w4 = run_trials(code, scheme, 5.0, 60, cfg, 9, Source::RandomCodeword, 4);
    auto w7 = run_trials(code, scheme, 5.0, 60, cfg, 9, Source::RandomCodeword, 7);
    CHECK(csv_of(w1) == csv_of(w4));
    CHECK(csv_of(w1) == csv_of(w7));
}

TEST_CASE("frame 0 trajectory records one row per iteration") {
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    std::vector<std::array<double, 3>> traj;
    auto s = run_trials(code, scheme, 6.0, 3, cfg, 21, Source::RandomCodeword, 1, &traj);
    REQUIRE(!traj.empty());
    CHECK(traj.size() == static_cast<std::size_t>(s.frames[0].iterations));
    CHECK(traj.front()[0] == 1.0);
    CHECK(traj.back()[0] == double(s.frames[0].iterations));
    // residuals on the last recorded sweep are below tolerance when converged
    if (s.frames[0].converged) {
        CHECK(traj.back()[1] <= cfg.tol);
        CHECK(traj.back()[2] <= cfg.tol);
    }
}

TEST_CASE("run_trials rejects bad arguments") {
    auto code = parse_code(builtin_tiny_code_text());
    auto qpsk = make_scheme(ModKind::QPSK, 2);
    auto bpsk = make_scheme(ModKind::BPSK, 1);
    auto cfg = DecoderConfig::defaults_for(code.q);
    CHECK_THROWS_AS(run_trials(code, qpsk, 6.0, 0, cfg, 1, Source::AllZeros),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_trials(code, qpsk, 6.0, 1, cfg, 1, Source::AllZeros, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_trials(code, bpsk, 6.0, 1, cfg, 1, Source::AllZeros),
                    std::invalid_argument);
    auto bad = cfg;
    bad.rho = bad.alpha; // step contraction requires rho > alpha
    CHECK_THROWS_AS(run_trials(code, qpsk, 6.0, 1, bad, 1, Source::AllZeros),
                    std::invalid_argument);
}

TEST_CASE("CSV layout is pinned") {
    RunSummary s;
    s.frames.resize(2);
    s.frames[0] = FrameResult{0, 17, true, true, 0, false};
    s.frames[1] = FrameResult{1, 500, false, false, 3, true};
    s.frame_count = 2;
    s.frame_errors = 1;
    s.symbol_error_total = 3;
    s.converged_frames = 1;
    s.fer = 0.5;
    s.ser = 0.25;
    s.mean_iterations = 258.5;
    s.config = DecoderConfig::defaults_for(2);
    s.code_id = "n6_m3_q2";
    s.modulation = "qpsk";
    s.esn0_db = 6.0;
    s.seed = 99;
    const std::string want =
        "frame,iterations,converged,syndrome_valid,symbol_errors,frame_error\n"
        "0,17,1,1,0,0\n"
        "1,500,0,0,3,1\n"
        "# code=n6_m3_q2 mod=qpsk esn0_db=6 frames=2 seed=99\n"
        "# mu=0.8 alpha=0.5 rho=0.52 beta=0.9 tol=1e-05 max_iter=500\n"
        "# fer=0.5 ser=0.25 frame_errors=1 symbol_errors=3 mean_iterations=258.5 "
        "converged_frames=1\n";
    CHECK(csv_of(s) == want);
}

TEST_CASE("cli usage errors exit with 2 and help exits with 0") {
    StdoutToFile cap("tmp_sim_help.txt");
    const int none = run_cli({});
    const int unknown = run_cli({"simulate", "--no-such-flag"});
    const int badsub = run_cli({"frobnicate"});
    const int help = run_cli({"--help"});
    cap.restore();
    CHECK(none == 2);
    CHECK(unknown == 2);
    CHECK(badsub == 2);
    CHECK(help == 0);
    CHECK(read_file("tmp_sim_help.txt").find("simulate") != std::string::npos);
    std::remove("tmp_sim_help.txt");
}

TEST_CASE("cli validate accepts the tiny code and rejects an injected corruption") {
    write_file("tmp_sim_code.nbc", builtin_tiny_code_text());
    {
        StdoutToFile cap("tmp_sim_validate.txt");
        CHECK(run_cli({"validate", "--code", "tmp_sim_code.nbc"}) == 0);
    }
    const std::string report = read_file("tmp_sim_validate.txt");
    CHECK(report.find("ok: tmp_sim_code.nbc") != std::string::npos);
    {
        StdoutToFile cap("tmp_sim_validate2.txt");
        CHECK(run_cli({"validate", "--code", "tmp_sim_code.nbc", "--inject-corruption"}) == 1);
        CHECK(run_cli({"validate", "--code", "tmp_sim_missing.nbc"}) == 1);
    }
    std::remove("tmp_sim_code.nbc");
    std::remove("tmp_sim_validate.txt");
    std::remove("tmp_sim_validate2.txt");
}

TEST_CASE("cli decode reproduces a noiseless transmission") {
    auto code = parse_code(builtin_tiny_code_text());
    auto ctx = make_field(code.q);
    auto enc = derive_encoder(code, ctx);
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    const Codeword sent = enc.encode({1, 2, 3}, ctx);
    const CostVector cost = cost_vector(modulate(sent, scheme), scheme, 8.0);
    write_file("tmp_sim_code.nbc", builtin_tiny_code_text());
    save_cost_file(cost, "tmp_sim_cost.bin");
    {
        StdoutToFile cap("tmp_sim_decode.txt");
        CHECK(run_cli({"decode", "--code", "tmp_sim_code.nbc", "--gamma",
                       "tmp_sim_cost.bin"}) == 0);
    }
    std::istringstream out(read_file("tmp_sim_decode.txt"));
    std::vector<int> got;
    int s;
    while (out >> s) got.push_back(s);
    REQUIRE(got.size() == static_cast<std::size_t>(code.n));
    for (int t = 0; t < code.n; ++t) CHECK(got[t] == int(sent.symbols[t]));
    std::remove("tmp_sim_code.nbc");
    std::remove("tmp_sim_cost.bin");
    std::remove("tmp_sim_decode.txt");
}

TEST_CASE("cli simulate writes the same CSV the library produces") {
    write_file("tmp_sim_code.nbc", builtin_tiny_code_text());
    CHECK(run_cli({"simulate", "--code", "tmp_sim_code.nbc", "--mod", "qpsk", "--esn0", "6",
                   "--frames", "25", "--seed", "7", "--out", "tmp_sim_run.csv"}) == 0);
    auto code = parse_code(builtin_tiny_code_text());
    auto scheme = make_scheme(ModKind::QPSK, code.q);
    auto cfg = DecoderConfig::defaults_for(code.q);
    auto want = run_trials(code, scheme, 6.0, 25, cfg, 7, Source::RandomCodeword, 1);
    CHECK(read_file("tmp_sim_run.csv") == csv_of(want));

    const auto lines = lines_of(read_file("tmp_sim_run.csv"));
    REQUIRE(lines.size() == 1 + 25 + 3); // header, rows, summary block
    CHECK(lines[0] == "frame,iterations,converged,syndrome_valid,symbol_errors,frame_error");
    CHECK(lines[26].substr(0, 2) == "# ");
    std::remove("tmp_sim_code.nbc");
    std::remove("tmp_sim_run.csv");
}

TEST_CASE("cli simulate honors worker count without changing output") {
    write_file("tmp_sim_code.nbc", builtin_tiny_code_text());
    CHECK(run_cli({"simulate", "--code", "tmp_sim_code.nbc", "--mod", "qpsk", "--esn0", "5",
                   "--frames", "30", "--seed", "3", "--workers", "1", "--out",
                   "tmp_sim_w1.csv"}) == 0);
    CHECK(run_cli({"simulate", "--code", "tmp_sim_code.nbc", "--mod", "qpsk", "--esn0", "5",
                   "--frames", "30", "--seed", "3", "--workers", "4", "--out",
                   "tmp_sim_w4.csv"}) == 0);
    CHECK(read_file("tmp_sim_w1.csv") == read_file("tmp_sim_w4.csv"));
    std::remove("tmp_sim_code.nbc");
    std::remove("tmp_sim_w1.csv");
    std::remove("tmp_sim_w4.csv");
}

TEST_CASE("cli simulate dumps the frame 0 residual trace on request") {
    write_file("tmp_sim_code.nbc", builtin_tiny_code_text());
    CHECK(run_cli({"simulate", "--code", "tmp_sim_code.nbc", "--mod", "qpsk", "--esn0", "6",
                   "--frames", "3", "--seed", "2", "--out", "tmp_sim_run.csv",
                   "--dump-trajectory", "tmp_sim_traj.csv"}) == 0);
    const auto traj = lines_of(read_file("tmp_sim_traj.csv"));
    REQUIRE(traj.size() >= 2);
    CHECK(traj[0] == "iteration,r1sq,r2sq");
    // row count matches the iteration count reported for frame 0
    const auto rows = lines_of(read_file("tmp_sim_run.csv"));
    std::istringstream row0(rows.at(1));
    std::string cell;
    std::getline(row0, cell, ','); // frame index
    std::getline(row0, cell, ','); // iterations
    CHECK(traj.size() - 1 == static_cast<std::size_t>(std::stoi(cell)));
    std::remove("tmp_sim_code.nbc");
    std::remove("tmp_sim_run.csv");
    std::remove("tmp_sim_traj.csv");
}

TEST_CASE("cli simulate reports processing failures with exit 1") {
    write_file("tmp_sim_code.nbc", builtin_tiny_code_text());
    // modulation/field mismatch: bpsk carries 1 bit, the code is over GF(4)
    CHECK(run_cli({"simulate", "--code", "tmp_sim_code.nbc", "--mod", "bpsk", "--esn0", "6",
                   "--frames", "5", "--out", "tmp_sim_bad.csv"}) == 1);
    CHECK(run_cli({"simulate", "--code", "tmp_sim_missing.nbc", "--mod", "qpsk", "--esn0",
                   "6", "--frames", "5", "--out", "tmp_sim_bad.csv"}) == 1);
    std::remove("tmp_sim_code.nbc");
    std::remove("tmp_sim_bad.csv");
}

TEST_CASE("cli oracle-compare reports near-perfect agreement on the tiny code") {
    {
        StdoutToFile cap("tmp_sim_oracle.txt");
        CHECK(run_cli({"oracle-compare", "--esn0", "8", "--frames", "40", "--seed", "1"}) ==
              0);
    }
    const std::string out = read_file("tmp_sim_oracle.txt");
    CHECK(out.find("frames=40") != std::string::npos);
    const auto pos = out.find("agreement=");
    REQUIRE(pos != std::string::npos);
    const double agreement = std::stod(out.substr(pos + 10));
    CHECK(agreement >= 0.95);
    std::remove("tmp_sim_oracle.txt");
}
