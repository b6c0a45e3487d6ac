// tfpr: phase-retrieval benchmark and parameter-search driver. Talks to the library only
// through the C interface.

#include <tfpr/tfpr.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace
{
    enum Exit
    {
        kOk = 0,
        kUsage = 1,
        kData = 2,
        kNumerical = 3,
    };

    int exit_code(tfpr_status s)
    {
        switch (s)
        {
            case TFPR_OK:
                return kOk;
            case TFPR_INVALID_ARGUMENT:
                return kUsage;
            case TFPR_DIMENSION:
            case TFPR_IO:
            case TFPR_FORMAT:
                return kData;
            default:
                return kNumerical;
        }
    }

    struct Failure : std::runtime_error
    {
        int code;
        Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
    };

    void check(tfpr_status s, const std::string& context)
    {
        if (s != TFPR_OK)
            throw Failure(exit_code(s), context + ": " + tfpr_status_string(s) + ": " + tfpr_last_error());
    }

    template <class T, void (*Destroy)(T*)>
    struct Deleter
    {
        void operator()(T* p) const { Destroy(p); }
    };
    using SignalPtr = std::unique_ptr<tfpr_signal, Deleter<tfpr_signal, tfpr_signal_destroy>>;
    using FramePtr = std::unique_ptr<tfpr_frame, Deleter<tfpr_frame, tfpr_frame_destroy>>;
    using CoeffsPtr = std::unique_ptr<tfpr_coeffs, Deleter<tfpr_coeffs, tfpr_coeffs_destroy>>;
    using ExperimentPtr = std::unique_ptr<tfpr_experiment, Deleter<tfpr_experiment, tfpr_experiment_destroy>>;
    using ResultsPtr = std::unique_ptr<tfpr_results, Deleter<tfpr_results, tfpr_results_destroy>>;

    // "lo:hi:n" is a log-spaced range; anything else is passed through as a list.
    std::string lambda_arg(const std::string& v)
    {
        if (v.find(':') != std::string::npos && v.rfind("logspace:", 0) != 0)
            return "logspace:" + v;
        return v;
    }

    std::string join_path(const std::string& dir, const std::string& name)
    {
        return (std::filesystem::path(dir) / name).string();
    }

    // ---- single-file commands -----------------------------------------------------------

    struct GridArgs
    {
        double lambda = 3.34;
        std::size_t redundancy = 8;
        std::string window = "gauss";
        std::size_t length = 122880;

        void add(CLI::App* app)
        {
            app->add_option("--lambda", lambda, "Time-frequency ratio (lattice follows from it and D)")
                ->capture_default_str();
            app->add_option("--redundancy", redundancy, "Redundancy D = M / a")->capture_default_str();
            app->add_option("--window", window, "gauss, hann, blackman or bartlett")->capture_default_str();
            app->add_option("--length", length, "Samples after resampling to 22050 Hz")->capture_default_str();
        }

        FramePtr frame() const
        {
            tfpr_frame* f = nullptr;
            check(tfpr_frame_create_for_lambda(window.c_str(), lambda, redundancy, length, 22050, &f), "frame");
            return FramePtr(f);
        }
    };

    SignalPtr load(const std::string& path, std::size_t length)
    {
        tfpr_signal* s = nullptr;
        check(tfpr_signal_read_wav(path.c_str(), 22050, length, &s), path);
        return SignalPtr(s);
    }

    int cmd_stft(const std::string& in, const GridArgs& g, const std::string& out)
    {
        const SignalPtr s = load(in, g.length);
        const FramePtr f = g.frame();
        tfpr_coeffs* raw = nullptr;
        check(tfpr_stft(f.get(), s.get(), &raw), "stft");
        const CoeffsPtr c(raw);
        const std::size_t bins = tfpr_coeffs_channels(c.get()), frames = tfpr_coeffs_frames(c.get());
        std::vector<double> re(bins * frames), im(bins * frames);
        tfpr_coeffs_copy(c.get(), re.data(), im.data());

        if (!out.empty() && std::filesystem::path(out).has_parent_path())
            std::filesystem::create_directories(std::filesystem::path(out).parent_path());
        std::FILE* fp = out.empty() ? stdout : std::fopen(out.c_str(), "w");
        if (!fp)
            throw Failure(kData, "cannot write " + out);
        std::fprintf(fp, "# a=%zu M=%zu L=%zu lambda=%.10g window=%s\n", tfpr_frame_hop(f.get()),
                     tfpr_frame_channels(f.get()), tfpr_frame_length(f.get()), tfpr_frame_lambda(f.get()),
                     g.window.c_str());
        std::fprintf(fp, "frame,channel,re,im\n");
        for (std::size_t n = 0; n < frames; ++n)
            for (std::size_t m = 0; m < bins; ++m)
                std::fprintf(fp, "%zu,%zu,%.17g,%.17g\n", n, m, re[n * bins + m], im[n * bins + m]);
        if (fp != stdout)
            std::fclose(fp);
        return kOk;
    }

    int cmd_reconstruct(const std::string& in, const GridArgs& g, const std::string& algo, std::size_t iterations,
                        std::uint64_t seed, bool trim, const std::string& out)
    {
        const SignalPtr s = load(in, g.length);
        const FramePtr f = g.frame();
        tfpr_coeffs* raw = nullptr;
        check(tfpr_stft(f.get(), s.get(), &raw), "stft");
        const CoeffsPtr c(raw);
        tfpr_pr_options opts;
        tfpr_pr_options_default(&opts);
        opts.fgla_iterations = iterations;
        opts.seed = seed;
        tfpr_signal* rec = nullptr;
        check(tfpr_reconstruct(f.get(), c.get(), algo.c_str(), &opts, &rec), algo);
        const SignalPtr r(rec);
        check(tfpr_signal_write_wav(r.get(), out.c_str(), 1), out);
        double snr = 0.0;
        check(tfpr_snr_ms(s.get(), r.get(), trim ? tfpr_frame_channels(f.get()) : 0, &snr), "snr_ms");
        std::printf("%s a=%zu M=%zu lambda=%.6g snr_ms_db=%.4f -> %s\n", algo.c_str(), tfpr_frame_hop(f.get()),
                    tfpr_frame_channels(f.get()), tfpr_frame_lambda(f.get()), snr, out.c_str());
        return kOk;
    }

    int cmd_synth(const std::string& kind, std::size_t count, std::size_t length, std::uint64_t seed,
                  const std::string& out, bool pcm16)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            tfpr_signal* raw = nullptr;
            check(tfpr_signal_synth(kind.c_str(), length, 22050, seed + i, &raw), "synth");
            const SignalPtr s(raw);
            char name[64];
            std::snprintf(name, sizeof name, "%s%02zu.wav", kind.c_str(), i);
            const std::string path = join_path(out, name);
            check(tfpr_signal_write_wav(s.get(), path.c_str(), pcm16 ? 0 : 1), path);
            std::printf("%s\n", path.c_str());
        }
        return kOk;
    }

    // ---- experiments ----------------------------------------------------------------------

    // Flag values as strings, forwarded verbatim to the experiment's key=value setter.
    struct ExperimentArgs
    {
        std::map<std::string, std::string> values;
        std::vector<std::string> corpus_dirs;
        std::vector<std::string> synthetic;
        std::size_t length = 122880;
        std::string out = "results";
        std::string format = "csv";

        std::string config_path;

        CLI::Option* option(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
        {
            return app->add_option_function<std::string>(
                flag, [this, key](const std::string& v) { values[key] = v; }, help);
        }

        void add(CLI::App* app, const std::string& algo_default)
        {
            option(app, "--algo", "algorithms", "Comma list: pghi, fgla(K), spsi, zerophase, phasenoise(s) [" + algo_default + "]");
            option(app, "--lambda", "lambdas", "Comma list, or lo:hi:n log range");
            option(app, "--redundancy", "redundancies", "Comma list of D");
            option(app, "--window", "windows", "Comma list: gauss, hann, blackman, bartlett [gauss]");
            option(app, "--seed", "seed", "Master seed [1]");
            option(app, "--iterations", "iterations", "FGLA iteration count");
            option(app, "--threads", "threads", "Worker threads [1]");
            option(app, "--trim", "trim", "on|off: drop M samples at each end before scoring [on]")
                ->check(CLI::IsMember({"on", "off"}));
            option(app, "--timing", "timing", "on|off: record wall time (off gives reproducible bytes) [on]")
                ->check(CLI::IsMember({"on", "off"}));
            option(app, "--alpha", "alpha", "FGLA momentum [0.99]");
            option(app, "--pghi-tolerance", "pghi_tolerance", "PGHI relative magnitude tolerance [1e-6]");
            app->add_option("--corpus", corpus_dirs, "Directory of WAV files (repeatable)")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            app->add_option("--synthetic", synthetic, "kind:count[:seed] synthetic signals (repeatable)")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            app->add_option("--length", length, "Signal length L")->capture_default_str();
            app->add_option("--out", out, "Output directory")->capture_default_str();
            app->add_option("--format", format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"}))
                ->capture_default_str();
            app->add_option("--config", config_path, "key = value file mirroring the long flags (command line wins)");
        }

        ExperimentPtr build() const
        {
            tfpr_experiment* raw = nullptr;
            check(tfpr_experiment_create(&raw), "experiment");
            ExperimentPtr e(raw);
            for (const auto& [key, value] : values)
            {
                const std::string v = key == "lambdas" ? lambda_arg(value) : value;
                check(tfpr_experiment_set(e.get(), key.c_str(), v.c_str()), "--" + key);
            }
            for (const auto& dir : corpus_dirs)
                check(tfpr_experiment_add_corpus_dir(e.get(), dir.c_str(), length), dir);
            for (const auto& spec : synthetic)
            {
                std::string kind = spec, count = "8", seed = "1";
                if (const auto p = spec.find(':'); p != std::string::npos)
                {
                    kind = spec.substr(0, p);
                    count = spec.substr(p + 1);
                    if (const auto q = count.find(':'); q != std::string::npos)
                    {
                        seed = count.substr(q + 1);
                        count = count.substr(0, q);
                    }
                }
                std::size_t n = 0;
                std::uint64_t s = 0;
                try
                {
                    n = std::stoul(count);
                    s = std::stoull(seed);
                }
                catch (const std::exception&)
                {
                    throw Failure(kUsage, "--synthetic expects kind:count[:seed], got '" + spec + "'");
                }
                check(tfpr_experiment_add_synthetic(e.get(), kind.c_str(), n, length, s), "--synthetic " + spec);
            }
            if (tfpr_experiment_corpus_size(e.get()) == 0)
                throw Failure(kUsage, "no signals: give --corpus <dir> and/or --synthetic kind:count");
            return e;
        }
    };

    int report(const ResultsPtr& r, const ExperimentArgs& args, const std::string& stem, bool optimizer)
    {
        std::filesystem::create_directories(args.out);
        const std::string main = join_path(args.out, stem + "." + args.format);
        check(tfpr_results_write(r.get(), main.c_str(), args.format.c_str()), main);
        const std::string spec = join_path(args.out, stem + ".spec.json");
        check(tfpr_results_write_spec(r.get(), spec.c_str()), spec);
        std::printf("%s\n%s\n", main.c_str(), spec.c_str());
        if (optimizer)
        {
            const std::string cells = join_path(args.out, stem + ".cells.csv");
            check(tfpr_results_write_cells(r.get(), cells.c_str()), cells);
            std::printf("%s\n", cells.c_str());
        }

        std::size_t failed = 0;
        const std::size_t n = tfpr_results_count(r.get());
        for (std::size_t i = 0; i < n; ++i)
        {
            tfpr_row row;
            check(tfpr_results_row(r.get(), i, &row), "row");
            if (std::string(row.status).rfind("error", 0) == 0)
            {
                ++failed;
                std::fprintf(stderr, "cell %s/%s lambda=%g D=%zu %s: %s\n", row.algorithm, row.window,
                             row.lambda_requested, row.D, row.signal_id, row.status);
            }
        }
        if (optimizer && tfpr_results_below_threshold(r.get()))
            std::fprintf(stderr, "no cell met the SNR threshold; best-effort ranges are flagged below_threshold\n");
        if (failed)
        {
            std::fprintf(stderr, "%zu of %zu cells failed\n", failed, n);
            return kNumerical;
        }
        return kOk;
    }

    int cmd_experiment(const ExperimentArgs& args, const std::string& kind)
    {
        const ExperimentPtr e = args.build();
        tfpr_results* raw = nullptr;
        if (kind == "sweep")
            check(tfpr_run_sweep(e.get(), &raw), kind);
        else if (kind == "noise")
            check(tfpr_run_noise(e.get(), &raw), kind);
        else if (kind == "filter")
            check(tfpr_run_filter(e.get(), &raw), kind);
        else
            check(tfpr_run_optimize(e.get(), &raw), kind);
        return report(ResultsPtr(raw), args, kind, kind == "optimize");
    }
    std::string trim_ws(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    }

    // Expands "--config FILE" into "--key value" pairs placed right after the subcommand, so
    // flags given on the command line (which come later) take precedence.
    std::vector<std::string> expand_config(std::vector<std::string> args)
    {
        for (std::size_t i = 1; i < args.size(); ++i)
        {
            std::string path;
            std::size_t consumed = 0;
            if (args[i] == "--config" && i + 1 < args.size())
            {
                path = args[i + 1];
                consumed = 2;
            }
            else if (args[i].rfind("--config=", 0) == 0)
            {
                path = args[i].substr(9);
                consumed = 1;
            }
            else
            {
                continue;
            }
            std::ifstream in(path);
            if (!in)
                throw Failure(kUsage, "cannot read config file " + path);
            std::vector<std::string> expanded;
            std::string line;
            for (std::size_t lineno = 1; std::getline(in, line); ++lineno)
            {
                line = trim_ws(line.substr(0, line.find('#')));
                if (line.empty() || line.front() == '[')
                    continue;
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw Failure(kUsage, path + ":" + std::to_string(lineno) + ": expected key = value");
                std::string key = trim_ws(line.substr(0, eq)), value = trim_ws(line.substr(eq + 1));
                if (key.rfind("--", 0) == 0)
                    key = key.substr(2);
                for (char& ch : key)
                    if (ch == '_')
                        ch = '-';
                if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                    value = value.substr(1, value.size() - 2);
                expanded.push_back("--" + key);
                expanded.push_back(value);
            }
            args.erase(args.begin() + std::ptrdiff_t(i), args.begin() + std::ptrdiff_t(i + consumed));
            const std::size_t at = args.size() > 1 ? 2 : 1;
            args.insert(args.begin() + std::ptrdiff_t(std::min(at, args.size())), expanded.begin(), expanded.end());
            break;
        }
        return args;
    }
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phase retrieval from STFT magnitudes: reconstruction, sweeps and parameter search"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(tfpr_version()));

    // stft
    auto* stft = app.add_subcommand("stft", "Write the STFT of one WAV file as CSV");
    std::string stft_in, stft_out;
    GridArgs stft_grid;
    stft->add_option("input", stft_in, "WAV file")->required()->check(CLI::ExistingFile);
    stft_grid.add(stft);
    stft->add_option("--out", stft_out, "CSV path (stdout if omitted)");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "Rebuild one WAV file from its STFT magnitude");
    std::string rec_in, rec_out = "reconstructed.wav", rec_algo = "pghi";
    GridArgs rec_grid;
    std::size_t rec_iterations = 100;
    std::uint64_t rec_seed = 1;
    std::string rec_trim = "on";
    rec->add_option("input", rec_in, "WAV file")->required()->check(CLI::ExistingFile);
    rec_grid.add(rec);
    rec->add_option("--algo", rec_algo, "pghi, fgla, spsi, zerophase or phasenoise(s)")->capture_default_str();
    rec->add_option("--iterations", rec_iterations, "FGLA iterations")->capture_default_str();
    rec->add_option("--seed", rec_seed, "Seed for random phase")->capture_default_str();
    rec->add_option("--trim", rec_trim, "on|off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    rec->add_option("--out", rec_out, "Output WAV (float32)")->capture_default_str();

    // synth
    auto* syn = app.add_subcommand("synth", "Write synthetic probe signals as WAV files");
    std::string syn_kind = "speech", syn_out = "fixtures";
    std::size_t syn_count = 8, syn_length = 122880;
    std::uint64_t syn_seed = 1;
    bool syn_pcm16 = false;
    syn->add_option("--kind", syn_kind, "harmonic, bursts, pulses or speech")
        ->check(CLI::IsMember({"harmonic", "bursts", "pulses", "speech"}))
        ->capture_default_str();
    syn->add_option("--count", syn_count, "Number of signals")->capture_default_str();
    syn->add_option("--length", syn_length, "Samples at 22050 Hz")->capture_default_str();
    syn->add_option("--seed", syn_seed, "Seed of the first signal")->capture_default_str();
    syn->add_option("--out", syn_out, "Output directory")->capture_default_str();
    syn->add_flag("--pcm16", syn_pcm16, "Write 16-bit PCM instead of float32");

    // experiments
    ExperimentArgs sweep_args, noise_args, filter_args, opt_args;
    auto* sweep = app.add_subcommand("sweep", "Reconstruct every (window, lambda, D, signal, algorithm) cell");
    sweep_args.add(sweep, "pghi,fgla(100),spsi");
    auto* noise = app.add_subcommand("noise-exp", "Phase-noise sensitivity: STFT, perturbed phase, inverse");
    noise_args.add(noise, "unused");
    noise->add_option_function<std::string>(
        "--sigma", [&](const std::string& v) { noise_args.values["sigmas"] = v; }, "Comma list of sigmas [0.1,0.5,1.0]");
    auto* filt = app.add_subcommand("filter-exp", "Reconstruct channel-weighted (inconsistent) spectrograms");
    filter_args.add(filt, "pghi,fgla(100)");
    filt->add_option_function<std::string>(
        "--filter-periods", [&](const std::string& v) { filter_args.values["filter_periods"] = v; },
        "Cosine periods from DC to Nyquist [7]");
    auto* opt = app.add_subcommand("optimize", "Search (lambda, D) ranges meeting an SNR_MS threshold");
    opt_args.add(opt, "pghi");
    opt_args.values["snr_threshold_db"] = "15";
    opt->add_option_function<std::string>(
        "--snr-threshold-db", [&](const std::string& v) { opt_args.values["snr_threshold_db"] = v; },
        "Mean SNR_MS a cell must reach [15]");
    for (const auto& [flag, key, help] : std::vector<std::tuple<std::string, std::string, std::string>>{
             {"--lambda-seed", "lambda_seed", "Starting lambda [3.34]"},
             {"--lambda-min", "lambda_min", "Lower search bound [1e-3]"},
             {"--lambda-max", "lambda_max", "Upper search bound [1e4]"},
             {"--min-gain-db", "min_gain_db", "Stop raising D below this gain [0.5]"},
             {"--time-budget", "time_budget_s", "Seconds, 0 = unlimited [0]"},
             {"--screen-iterations", "screen_iterations", "FGLA screening iterations [5]"}})
    {
        const std::string k = key;
        opt->add_option_function<std::string>(flag, [&opt_args, k](const std::string& v) { opt_args.values[k] = v; },
                                               help);
    }

    std::vector<std::string> args(argv, argv + argc);
    try
    {
        args = expand_config(std::move(args));
    }
    catch (const Failure& f)
    {
        std::fprintf(stderr, "tfpr: %s\n", f.what());
        return f.code;
    }
    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try
    {
        if (*stft)
            return cmd_stft(stft_in, stft_grid, stft_out);
        if (*rec)
            return cmd_reconstruct(rec_in, rec_grid, rec_algo, rec_iterations, rec_seed, rec_trim == "on", rec_out);
        if (*syn)
            return cmd_synth(syn_kind, syn_count, syn_length, syn_seed, syn_out, syn_pcm16);
        if (*sweep)
            return cmd_experiment(sweep_args, "sweep");
        if (*noise)
            return cmd_experiment(noise_args, "noise");
        if (*filt)
            return cmd_experiment(filter_args, "filter");
        if (*opt)
            return cmd_experiment(opt_args, "optimize");
    }
    catch (const Failure& f)
    {
        std::fprintf(stderr, "tfpr: %s\n", f.what());
        return f.code;
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "tfpr: %s\n", e.what());
        return kData;
    }
    return kUsage;
}
