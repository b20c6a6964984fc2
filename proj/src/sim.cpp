#include "nbqp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"

#include "nbqp/oracle.hpp"
#include "nbqp/qpbuild.hpp"

namespace nbqp {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<gf_t> random_message(const Encoder& enc, const FieldContext& ctx,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, ctx.order() - 1);
    std::vector<gf_t> msg(static_cast<std::size_t>(enc.k));
    for (auto& s : msg) s = static_cast<gf_t>(dist(rng));
    return msg;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t frame_index) {
    std::uint64_t state = master_seed ^ (0x9e3779b97f4a7c15ULL * (frame_index + 1));
    return splitmix64(state);
}

RunSummary run_trials(const ParityCheckCode& code, const ModulationScheme& scheme,
                      double esn0_db, std::uint64_t frames, const DecoderConfig& config,
                      std::uint64_t master_seed, Source source, int workers,
                      std::vector<std::array<double, 3>>* frame0_trajectory) {
    if (frames < 1) throw std::invalid_argument("frames must be at least 1");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (scheme.q != code.q)
        throw std::invalid_argument("modulation carries " + std::to_string(scheme.q) +
                                    " bits but the code is over GF(2^" +
                                    std::to_string(code.q) + ")");
    config.validate();

    const FieldContext ctx = make_field(code.q);
    const QpModel model = assemble_model(code, ctx, config.alpha, config.rho, config.mu);
    const Encoder enc = derive_encoder(code, ctx);

    RunSummary summary;
    summary.frames.resize(frames);
    summary.frame_count = frames;
    summary.config = config;
    summary.code_id = "n" + std::to_string(code.n) + "_m" + std::to_string(code.m) + "_q" +
                      std::to_string(code.q);
    summary.modulation = mod_name(scheme.name);
    summary.esn0_db = esn0_db;
    summary.seed = master_seed;

    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto run_one = [&](std::uint64_t i) {
        std::uint64_t chain = frame_seed(master_seed, i);
        const std::uint64_t word_seed = splitmix64(chain);
        const std::uint64_t noise_seed = splitmix64(chain);

        Codeword sent;
        if (source == Source::RandomCodeword)
            sent = enc.encode(random_message(enc, ctx, word_seed), ctx);
        else
            sent.symbols.assign(static_cast<std::size_t>(code.n), gf_t{0});

        const auto received = awgn(modulate(sent, scheme), esn0_db, noise_seed);
        // Clip costs at +/-50: extreme operating points (near-noiseless runs)
        // otherwise produce costs far outside the range the iteration can
        // contract in double precision.  The cap is monotone per entry, so
        // per-block preferences are unchanged.
        const CostVector cost = cost_vector(received, scheme, esn0_db, /*clip=*/true);
        const Eigen::VectorXd lambda = extend_cost(cost, model);

        DecodeOptions opts;
        if (i == 0 && frame0_trajectory) opts.trajectory = frame0_trajectory;
        const DecodeResult res = decode(model, code, lambda, config, opts);

        int errs = 0;
        for (int t = 0; t < code.n; ++t)
            if (res.word.symbols[t] != sent.symbols[t]) ++errs;

        FrameResult& fr = summary.frames[i];
        fr.frame_index = i;
        fr.iterations = res.iterations;
        fr.converged = res.converged;
        fr.syndrome_valid = res.syndrome_valid;
        fr.symbol_errors = errs;
        fr.frame_error = errs > 0;
    };

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= frames) return;
            try {
                run_one(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::uint64_t iter_total = 0;
    for (const FrameResult& fr : summary.frames) {
        summary.frame_errors += fr.frame_error ? 1 : 0;
        summary.symbol_error_total += static_cast<std::uint64_t>(fr.symbol_errors);
        summary.converged_frames += fr.converged ? 1 : 0;
        iter_total += static_cast<std::uint64_t>(fr.iterations);
    }
    const double fd = static_cast<double>(frames);
    summary.fer = static_cast<double>(summary.frame_errors) / fd;
    summary.ser = static_cast<double>(summary.symbol_error_total) / (fd * code.n);
    summary.mean_iterations = static_cast<double>(iter_total) / fd;
    return summary;
}

void write_csv(std::ostream& os, const RunSummary& summary) {
    os << "frame,iterations,converged,syndrome_valid,symbol_errors,frame_error\n";
    for (const FrameResult& fr : summary.frames)
        os << fr.frame_index << ',' << fr.iterations << ',' << (fr.converged ? 1 : 0) << ','
           << (fr.syndrome_valid ? 1 : 0) << ',' << fr.symbol_errors << ','
           << (fr.frame_error ? 1 : 0) << '\n';
    os << "# code=" << summary.code_id << " mod=" << summary.modulation
       << " esn0_db=" << format_double(summary.esn0_db) << " frames=" << summary.frame_count
       << " seed=" << summary.seed << '\n';
    os << "# mu=" << format_double(summary.config.mu)
       << " alpha=" << format_double(summary.config.alpha)
       << " rho=" << format_double(summary.config.rho)
       << " beta=" << format_double(summary.config.beta)
       << " tol=" << format_double(summary.config.tol) << " max_iter=" << summary.config.max_iter
       << '\n';
    os << "# fer=" << format_double(summary.fer) << " ser=" << format_double(summary.ser)
       << " frame_errors=" << summary.frame_errors
       << " symbol_errors=" << summary.symbol_error_total
       << " mean_iterations=" << format_double(summary.mean_iterations)
       << " converged_frames=" << summary.converged_frames << '\n';
}

std::string builtin_tiny_code_text() {
    return "6 3 2\n"
           "3 1 1 2 2 3 3\n"
           "4 2 1 3 3 4 1 5 2\n"
           "3 4 1 5 1 6 3\n";
}

// ---------------------------------------------------------------------------
// Command-line front end
// ---------------------------------------------------------------------------

namespace {

struct Entry {
    long row;
    long col;
    int val;
};

ModKind mod_for_q(int q) {
    switch (q) {
    case 1: return ModKind::BPSK;
    case 2: return ModKind::QPSK;
    case 4: return ModKind::QAM16;
    default:
        throw std::invalid_argument("no default modulation for q=" + std::to_string(q) +
                                    "; supported field sizes are q=1 (bpsk), q=2 (qpsk), "
                                    "q=4 (qam16)");
    }
}

ModKind parse_mod(const std::string& name) {
    if (name == "bpsk") return ModKind::BPSK;
    if (name == "qpsk") return ModKind::QPSK;
    if (name == "qam16") return ModKind::QAM16;
    throw std::invalid_argument("unknown modulation '" + name + "'");
}

void add_decoder_flags(CLI::App* cmd, DecoderConfig& cfg, bool& mu_given) {
    cmd->add_option("--mu", cfg.mu, "penalty parameter (default 0.8 for q<=2, 0.6 for q>=3)")
        ->each([&mu_given](const std::string&) { mu_given = true; });
    cmd->add_option("--alpha", cfg.alpha, "concave penalty weight");
    cmd->add_option("--rho", cfg.rho, "proximal weight (must exceed alpha)");
    cmd->add_option("--beta", cfg.beta, "relaxation step in (0,1]");
    cmd->add_option("--tol", cfg.tol, "squared-residual stopping tolerance");
    cmd->add_option("--max-iter", cfg.max_iter, "iteration cap");
}

// Structural checks over the streamed entries of A plus field spot checks.
// Returns true when everything holds; reports the first failure to `err`.
bool validate_code(const ParityCheckCode& code, bool inject_corruption, std::ostream& out,
                   std::ostream& err) {
    const FieldContext ctx = make_field(code.q);
    const DecoderConfig cfg = DecoderConfig::defaults_for(code.q);
    const QpModel model = assemble_model(code, ctx, cfg.alpha, cfg.rho, cfg.mu);
    const int K = model.K;

    std::vector<Entry> entries;
    for_each_entry(model, [&entries](long r, long c, int v) { entries.push_back({r, c, v}); });
    if (inject_corruption && !entries.empty()) entries.front().val = 2;

    // Entry range and duplicate positions.
    std::set<std::pair<long, long>> seen;
    for (const Entry& e : entries) {
        if (e.val != 1 && e.val != -1) {
            err << "invariant violated: A entry out of {-1,+1} at (" << e.row << "," << e.col
                << ") value " << e.val << "\n";
            return false;
        }
        if (!seen.insert({e.row, e.col}).second) {
            err << "invariant violated: duplicate A entry at (" << e.row << "," << e.col
                << ")\n";
            return false;
        }
    }
    out << "entries: " << entries.size() << " values all in {-1,+1}, no duplicates\n";

    // Row sums: each parity row selects 2^{q-1} positions per slot; simplex
    // rows are all-ones over one block.
    std::vector<long> row_count(static_cast<std::size_t>(model.M), 0);
    std::vector<long> row_sum(static_cast<std::size_t>(model.M), 0);
    for (const Entry& e : entries) {
        ++row_count[static_cast<std::size_t>(e.row)];
        row_sum[static_cast<std::size_t>(e.row)] += e.val;
    }
    const long srow = model.simplex_row_base();
    const long half = 1L << (code.q - 1);
    for (long r = 0; r < model.M; ++r) {
        const bool simplex = r >= srow;
        const long want_count = simplex ? K : 3 * half;
        const long want_sum = simplex ? K : ((r % 4 == 3) ? 3 * half : -half);
        if (row_count[static_cast<std::size_t>(r)] != want_count ||
            row_sum[static_cast<std::size_t>(r)] != want_sum) {
            err << "invariant violated: row " << r << " has " << row_count[r]
                << " entries summing to " << row_sum[r] << " (expected " << want_count
                << " summing to " << want_sum << ")\n";
            return false;
        }
    }
    out << "row sums: " << model.M << " rows match the parity/simplex pattern\n";

    // Permutation spot checks: multiplying a one-hot vector by the
    // h-permutation must land on the one-hot of the product.
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> nz(1, ctx.nonzero());
    for (int trial = 0; trial < 32; ++trial) {
        const gf_t h = static_cast<gf_t>(nz(rng));
        const gf_t u = static_cast<gf_t>(nz(rng));
        const auto y = permutation_matrix(h, ctx).apply(symbol_to_binary(u, ctx));
        if (y != symbol_to_binary(gf_mul(h, u, ctx), ctx)) {
            err << "invariant violated: permutation by " << int(h)
                << " does not map one-hot " << int(u) << " to the product\n";
            return false;
        }
    }
    out << "permutations: 32 one-hot spot checks ok\n";

    // Inverse-block spot checks: the Gram block of one variable per distinct
    // degree, inverted densely, must reproduce the closed-form theta/omega.
    std::set<int> degrees_done;
    for (int i = 0; i < model.n_ext; ++i) {
        if (!degrees_done.insert(model.degrees[i]).second) continue;
        const long c0 = static_cast<long>(i) * K;
        std::map<long, std::vector<double>> rows_touching;
        for (const Entry& e : entries)
            if (e.col >= c0 && e.col < c0 + K) {
                auto& v = rows_touching[e.row];
                if (v.empty()) v.assign(static_cast<std::size_t>(K), 0.0);
                v[static_cast<std::size_t>(e.col - c0)] += e.val;
            }
        DenseMatrix g;
        g.rows = g.cols = K;
        g.a.assign(static_cast<std::size_t>(K) * K, 0.0);
        for (const auto& [r, v] : rows_touching)
            for (int a = 0; a < K; ++a)
                for (int b = 0; b < K; ++b) g.at(a, b) += v[a] * v[b];
        for (int a = 0; a < K; ++a) g.at(a, a) += model.epsilon;
        const DenseMatrix inv = dense_inverse(g);
        for (int a = 0; a < K; ++a)
            for (int b = 0; b < K; ++b) {
                const double want = (a == b) ? model.theta[i] : model.omega[i];
                if (std::fabs(inv.at(a, b) - want) > 1e-8) {
                    err << "invariant violated: inverse block of degree " << model.degrees[i]
                        << " deviates from closed form at (" << a << "," << b << ")\n";
                    return false;
                }
            }
    }
    out << "inverse blocks: closed form matches dense inversion for "
        << degrees_done.size() << " distinct degrees\n";
    return true;
}

int cmd_validate(const std::string& path, bool inject) {
    const ParityCheckCode code = load_code_file(path);
    std::ostringstream report;
    if (!validate_code(code, inject, report, std::cerr)) return 1;
    std::cout << report.str() << "ok: " << path << "\n";
    return 0;
}

int cmd_decode(const std::string& code_path, const std::string& gamma_path, DecoderConfig cfg,
               bool mu_given) {
    const ParityCheckCode code = load_code_file(code_path);
    if (!mu_given) cfg.mu = DecoderConfig::defaults_for(code.q).mu;
    const FieldContext ctx = make_field(code.q);
    const CostVector cost = load_cost_file(gamma_path);
    const QpModel model = assemble_model(code, ctx, cfg.alpha, cfg.rho, cfg.mu);
    const Eigen::VectorXd lambda = extend_cost(cost, model);
    const DecodeResult res = decode(model, code, lambda, cfg);
    for (int t = 0; t < code.n; ++t) std::cout << (t ? " " : "") << int(res.word.symbols[t]);
    std::cout << "\n";
    std::cerr << "iterations=" << res.iterations << " converged=" << (res.converged ? 1 : 0)
              << " syndrome_valid=" << (res.syndrome_valid ? 1 : 0) << "\n";
    return 0;
}

struct SimulateArgs {
    std::string code_path;
    std::string mod_name;
    double esn0_db = 0.0;
    std::uint64_t frames = 100;
    std::uint64_t seed = 1;
    std::string source = "random";
    std::string out_path;
    std::string trajectory_path;
    int workers = 1;
};

int cmd_simulate(const SimulateArgs& args, DecoderConfig cfg, bool mu_given) {
    const ParityCheckCode code = load_code_file(args.code_path);
    if (!mu_given) cfg.mu = DecoderConfig::defaults_for(code.q).mu;
    const ModKind kind = args.mod_name.empty() ? mod_for_q(code.q) : parse_mod(args.mod_name);
    const ModulationScheme scheme = make_scheme(kind, code.q);
    const Source source = args.source == "zeros" ? Source::AllZeros : Source::RandomCodeword;

    std::vector<std::array<double, 3>> trajectory;
    std::vector<std::array<double, 3>>* traj_ptr =
        args.trajectory_path.empty() ? nullptr : &trajectory;

    const RunSummary summary = run_trials(code, scheme, args.esn0_db, args.frames, cfg,
                                          args.seed, source, args.workers, traj_ptr);

    if (!args.out_path.empty() && args.out_path != "-") {
        std::ofstream os(args.out_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file " + args.out_path);
        write_csv(os, summary);
    } else {
        write_csv(std::cout, summary);
    }

    if (traj_ptr) {
        std::ofstream ts(args.trajectory_path, std::ios::binary);
        if (!ts) throw std::runtime_error("cannot open trajectory file " + args.trajectory_path);
        ts << "iteration,r1sq,r2sq\n";
        for (const auto& row : trajectory)
            ts << static_cast<long>(row[0]) << ',' << format_double(row[1]) << ','
               << format_double(row[2]) << '\n';
    }
    return 0;
}

int cmd_oracle_compare(const std::string& code_path, double esn0_db, std::uint64_t frames,
                       std::uint64_t seed, DecoderConfig cfg, bool mu_given) {
    ParityCheckCode code;
    if (code_path.empty()) {
        code = parse_code(builtin_tiny_code_text());
    } else {
        code = load_code_file(code_path);
    }
    if (!mu_given) cfg.mu = DecoderConfig::defaults_for(code.q).mu;
    const FieldContext ctx = make_field(code.q);
    const ModulationScheme scheme = make_scheme(mod_for_q(code.q), code.q);
    const QpModel model = assemble_model(code, ctx, cfg.alpha, cfg.rho, cfg.mu);
    const Encoder enc = derive_encoder(code, ctx);

    std::uint64_t agree = 0;
    for (std::uint64_t i = 0; i < frames; ++i) {
        std::uint64_t chain = frame_seed(seed, i);
        const std::uint64_t word_seed = splitmix64(chain);
        const std::uint64_t noise_seed = splitmix64(chain);
        const Codeword sent = enc.encode(random_message(enc, ctx, word_seed), ctx);
        const auto received = awgn(modulate(sent, scheme), esn0_db, noise_seed);
        // Same clipped costs for both decoders so the comparison is apples to
        // apples (see run_trials).
        const CostVector cost = cost_vector(received, scheme, esn0_db, /*clip=*/true);
        const Eigen::VectorXd lambda = extend_cost(cost, model);
        const DecodeResult res = decode(model, code, lambda, cfg);
        const Codeword ml = ml_decode_bruteforce(code, ctx, cost.gamma);
        if (res.word.symbols == ml.symbols) ++agree;
    }
    const double rate = static_cast<double>(agree) / static_cast<double>(frames);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", rate);
    std::cout << "frames=" << frames << " matches=" << agree << " agreement=" << buf << "\n";
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"proximal-ADMM QP decoder for nonbinary LDPC codes over GF(2^q)"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "structural checks on a code file");
    std::string v_code;
    bool v_inject = false;
    validate->add_option("--code", v_code, "code file (.nbc)")->required();
    validate->add_flag("--inject-corruption", v_inject,
                       "testing aid: corrupt one constraint entry before checking");

    // decode
    auto* dec = app.add_subcommand("decode", "decode a dumped cost vector");
    std::string d_code, d_gamma;
    DecoderConfig d_cfg;
    bool d_mu_given = false;
    dec->add_option("--code", d_code, "code file (.nbc)")->required();
    dec->add_option("--gamma", d_gamma, "cost vector file")->required();
    add_decoder_flags(dec, d_cfg, d_mu_given);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo FER/SER run");
    SimulateArgs s_args;
    DecoderConfig s_cfg;
    bool s_mu_given = false;
    sim->add_option("--code", s_args.code_path, "code file (.nbc)")->required();
    sim->add_option("--mod", s_args.mod_name, "bpsk|qpsk|qam16 (default: inferred from q)");
    sim->add_option("--esn0", s_args.esn0_db, "Es/N0 in dB")->required();
    sim->add_option("--frames", s_args.frames, "number of frames");
    sim->add_option("--seed", s_args.seed, "master seed");
    sim->add_option("--source", s_args.source, "zeros|random codeword source")
        ->check(CLI::IsMember({"zeros", "random"}));
    sim->add_option("--out", s_args.out_path, "CSV output path (default stdout)");
    sim->add_option("--dump-trajectory", s_args.trajectory_path,
                    "write frame 0's residual trace to this CSV path");
    sim->add_option("--workers", s_args.workers, "worker threads")
        ->check(CLI::PositiveNumber);
    add_decoder_flags(sim, s_cfg, s_mu_given);

    // oracle-compare
    auto* cmp = app.add_subcommand("oracle-compare",
                                   "decoder vs. exhaustive maximum likelihood");
    std::string c_code;
    double c_esn0 = 8.0;
    std::uint64_t c_frames = 1000, c_seed = 1;
    DecoderConfig c_cfg;
    bool c_mu_given = false;
    cmp->add_option("--code", c_code, "code file (default: bundled tiny GF(4) code)");
    cmp->add_option("--esn0", c_esn0, "Es/N0 in dB");
    cmp->add_option("--frames", c_frames, "number of frames");
    cmp->add_option("--seed", c_seed, "master seed");
    add_decoder_flags(cmp, c_cfg, c_mu_given);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(v_code, v_inject);
        if (dec->parsed()) return cmd_decode(d_code, d_gamma, d_cfg, d_mu_given);
        if (sim->parsed()) return cmd_simulate(s_args, s_cfg, s_mu_given);
        if (cmp->parsed())
            return cmd_oracle_compare(c_code, c_esn0, c_frames, c_seed, c_cfg, c_mu_given);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace nbqp
