#include "tfpr/tfpr.h"

#include "error.hpp"
#include "harness.hpp"
#include "metrics.hpp"
#include "phase_retrieval.hpp"
#include "report.hpp"
#include "resample.hpp"
#include "stft.hpp"
#include "synth.hpp"
#include "wav.hpp"
#include "windows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace tfpr;
using namespace tfpr::harness;

struct tfpr_signal
{
    Signal signal;
};

struct tfpr_frame
{
    Frame frame;
    double lambda = 0.0;
};

struct tfpr_coeffs
{
    Spectrum spectrum;
};

enum class ExperimentKind
{
    Sweep,
    Noise,
    Filter,
    Optimize,
};

struct tfpr_experiment
{
    SweepSpec sweep;
    std::vector<double> sigmas{0.1, 0.5, 1.0};
    FilterSpec filter;
    OptimizeSpec optimize;
    bool algorithms_set = false;
    /// Overrides the FGLA iteration count of every algorithm entry.
    std::optional<std::size_t> iterations;
};

struct tfpr_results
{
    ExperimentKind kind = ExperimentKind::Sweep;
    std::vector<CellResult> rows;
    OptimizeResult optimized;
    nlohmann::json spec;
};

namespace
{
    thread_local std::string t_last_error;

    tfpr_status to_status(ErrorKind k)
    {
        switch (k)
        {
            case ErrorKind::InvalidArgument:
                return TFPR_INVALID_ARGUMENT;
            case ErrorKind::Dimension:
                return TFPR_DIMENSION;
            case ErrorKind::NotAFrame:
                return TFPR_NOT_A_FRAME;
            case ErrorKind::Io:
                return TFPR_IO;
            case ErrorKind::Format:
                return TFPR_FORMAT;
            case ErrorKind::Numerical:
                return TFPR_NUMERICAL;
        }
        return TFPR_INTERNAL;
    }

    template <class F>
    tfpr_status guarded(F&& body)
    {
        try
        {
            body();
            t_last_error.clear();
            return TFPR_OK;
        }
        catch (const Error& e)
        {
            t_last_error = e.what();
            return to_status(e.kind());
        }
        catch (const std::bad_alloc&)
        {
            t_last_error = "out of memory";
            return TFPR_INTERNAL;
        }
        catch (const std::exception& e)
        {
            t_last_error = e.what();
            return TFPR_INTERNAL;
        }
        catch (...)
        {
            t_last_error = "unknown failure";
            return TFPR_INTERNAL;
        }
    }

    void need(const void* p, const char* what)
    {
        require(p != nullptr, ErrorKind::InvalidArgument, std::string(what) + " is null");
    }

    WindowFamily parse_family(const std::string& name)
    {
        const auto f = family_from_name(name);
        require(f.has_value() && *f != WindowFamily::Custom, ErrorKind::InvalidArgument,
                "unknown window family '" + name + "'");
        return *f;
    }

    Window window_for(WindowFamily family, double lambda, std::size_t L, unsigned rate)
    {
        return family == WindowFamily::Gaussian ? periodized_gaussian(lambda, L, rate)
                                                : window_for_lambda(family, lambda, rate, L);
    }

    std::string trim_ws(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::vector<std::string> split_list(const std::string& s)
    {
        std::vector<std::string> out;
        std::string item;
        int depth = 0;
        for (char ch : s)
        {
            if (ch == '(')
                ++depth;
            else if (ch == ')')
                --depth;
            if (ch == ',' && depth == 0)
            {
                out.push_back(trim_ws(item));
                item.clear();
            }
            else
            {
                item += ch;
            }
        }
        out.push_back(trim_ws(item));
        out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
        require(!out.empty(), ErrorKind::InvalidArgument, "empty list");
        return out;
    }

    double parse_double(const std::string& s)
    {
        const std::string t = trim_ws(s);
        if (t == "inf" || t == "+inf")
            return std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(t, &used);
        }
        catch (const std::exception&)
        {
            fail(ErrorKind::InvalidArgument, "not a number: '" + s + "'");
        }
        require(used == t.size(), ErrorKind::InvalidArgument, "not a number: '" + s + "'");
        return v;
    }

    std::uint64_t parse_uint(const std::string& s)
    {
        const std::string t = trim_ws(s);
        require(!t.empty() && t.find_first_not_of("0123456789") == std::string::npos, ErrorKind::InvalidArgument,
                "not a non-negative integer: '" + s + "'");
        try
        {
            return std::stoull(t);
        }
        catch (const std::exception&)
        {
            fail(ErrorKind::InvalidArgument, "integer out of range: '" + s + "'");
        }
    }

    bool parse_bool(const std::string& s)
    {
        const std::string t = trim_ws(s);
        if (t == "on" || t == "true" || t == "1" || t == "yes")
            return true;
        if (t == "off" || t == "false" || t == "0" || t == "no")
            return false;
        fail(ErrorKind::InvalidArgument, "not a boolean: '" + s + "'");
    }

    // "0.01,3.34,1000" or "logspace:lo:hi:n"
    std::vector<double> parse_lambdas(const std::string& s)
    {
        const std::string t = trim_ws(s);
        if (t.rfind("logspace:", 0) == 0)
        {
            std::vector<std::string> parts;
            std::stringstream ss(t.substr(9));
            for (std::string p; std::getline(ss, p, ':');)
                parts.push_back(p);
            require(parts.size() == 3, ErrorKind::InvalidArgument, "logspace needs lo:hi:n");
            const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
            const std::size_t n = parse_uint(parts[2]);
            require(lo > 0 && hi >= lo && n >= 1, ErrorKind::InvalidArgument, "logspace needs 0 < lo <= hi, n >= 1");
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * double(i) / double(n - 1));
            out.front() = lo;
            if (n > 1)
                out.back() = hi;
            return out;
        }
        std::vector<double> out;
        for (const auto& item : split_list(t))
            out.push_back(parse_double(item));
        return out;
    }

    void set_key(tfpr_experiment& e, const std::string& key, const std::string& value)
    {
        SweepSpec& s = e.sweep;
        OptimizeSpec& o = e.optimize;
        if (key == "algorithms" || key == "algo")
        {
            s.algorithms.clear();
            for (const auto& item : split_list(value))
                s.algorithms.push_back(AlgorithmSpec::parse(item));
            e.algorithms_set = true;
        }
        else if (key == "lambdas" || key == "lambda")
            s.lambdas = parse_lambdas(value);
        else if (key == "redundancies" || key == "redundancy")
        {
            s.redundancies.clear();
            for (const auto& item : split_list(value))
                s.redundancies.push_back(parse_uint(item));
        }
        else if (key == "windows" || key == "window")
        {
            s.windows.clear();
            for (const auto& item : split_list(value))
                s.windows.push_back(parse_family(item));
        }
        else if (key == "sigmas" || key == "sigma")
        {
            e.sigmas.clear();
            for (const auto& item : split_list(value))
                e.sigmas.push_back(parse_double(item));
        }
        else if (key == "seed")
            s.seed = parse_uint(value);
        else if (key == "threads")
            s.threads = unsigned(std::max<std::uint64_t>(1, parse_uint(value)));
        else if (key == "trim")
            s.trim = parse_bool(value);
        else if (key == "timing")
            s.record_timing = parse_bool(value);
        else if (key == "iterations")
        {
            const std::size_t it = parse_uint(value);
            require(it >= 1, ErrorKind::InvalidArgument, "iterations must be >= 1");
            e.iterations = it;
        }
        else if (key == "alpha")
            s.fgla_alpha = parse_double(value);
        else if (key == "pghi_tolerance")
            s.pghi.rel_tolerance = parse_double(value);
        else if (key == "filter_periods")
            e.filter.periods = parse_double(value);
        else if (key == "snr_threshold_db")
            o.snr_threshold_db = parse_double(value);
        else if (key == "lambda_seed")
            o.lambda_seed = parse_double(value);
        else if (key == "lambda_min")
            o.lambda_min = parse_double(value);
        else if (key == "lambda_max")
            o.lambda_max = parse_double(value);
        else if (key == "min_gain_db")
            o.min_gain_db = parse_double(value);
        else if (key == "time_budget_s")
            o.time_budget_s = parse_double(value);
        else if (key == "screen_iterations")
            o.screen_iterations = parse_uint(value);
        else
            fail(ErrorKind::InvalidArgument, "unknown experiment key '" + key + "'");
    }

    void apply_iterations(const tfpr_experiment& e, std::vector<AlgorithmSpec>& algorithms)
    {
        if (e.iterations)
            for (auto& a : algorithms)
                if (a.kind == Algorithm::Fgla)
                    a.iterations = *e.iterations;
    }

    SweepSpec sweep_spec(const tfpr_experiment& e)
    {
        SweepSpec s = e.sweep;
        if (!e.algorithms_set)
            s.algorithms = {AlgorithmSpec::parse("pghi"), AlgorithmSpec::parse("fgla(100)"), AlgorithmSpec::parse("spsi")};
        apply_iterations(e, s.algorithms);
        return s;
    }

    tfpr_status run(const tfpr_experiment* e, tfpr_results** out, ExperimentKind kind)
    {
        return guarded([&] {
            need(e, "experiment");
            need(out, "output pointer");
            auto r = std::make_unique<tfpr_results>();
            r->kind = kind;
            const SweepSpec s = sweep_spec(*e);
            switch (kind)
            {
                case ExperimentKind::Sweep:
                    r->rows = run_sweep(s);
                    r->spec = to_json(s);
                    r->spec["experiment"] = "sweep";
                    break;
                case ExperimentKind::Noise:
                {
                    r->rows = run_noise_sensitivity(e->sigmas, s);
                    r->spec = to_json(s);
                    r->spec.erase("algorithms");
                    r->spec["experiment"] = "noise";
                    r->spec["sigmas"] = e->sigmas;
                    break;
                }
                case ExperimentKind::Filter:
                {
                    SweepSpec fs = s;
                    if (!e->algorithms_set)
                        fs.algorithms = {AlgorithmSpec::parse("pghi"), AlgorithmSpec::parse("fgla(100)")};
                    apply_iterations(*e, fs.algorithms);
                    r->rows = run_filter_experiment(fs, e->filter);
                    r->spec = to_json(fs);
                    r->spec["experiment"] = "filter";
                    r->spec["filter"] = {{"periods", e->filter.periods}, {"floor", e->filter.floor}};
                    break;
                }
                case ExperimentKind::Optimize:
                {
                    require(!e->algorithms_set || s.algorithms.size() == 1, ErrorKind::InvalidArgument,
                            "optimize takes exactly one algorithm");
                    OptimizeSpec o = e->optimize;
                    o.algorithm = s.algorithms.front();
                    o.corpus = s.corpus;
                    o.window = s.windows.front();
                    if (e->sweep.redundancies.size() > 0)
                        o.redundancies = e->sweep.redundancies;
                    o.seed = s.seed;
                    o.trim = s.trim;
                    o.threads = s.threads;
                    o.pghi = s.pghi;
                    o.fgla_alpha = s.fgla_alpha;
                    r->optimized = optimize_parameters(o);
                    r->rows = r->optimized.cells;
                    if (!s.record_timing)
                        for (auto& c : r->rows)
                            c.wall_time_s = 0.0;
                    r->optimized.cells = r->rows;
                    nlohmann::json j;
                    j["experiment"] = "optimize";
                    j["algorithm"] = o.algorithm.name();
                    j["window"] = family_name(o.window);
                    j["lambda_seed"] = o.lambda_seed;
                    j["lambda_min"] = o.lambda_min;
                    j["lambda_max"] = o.lambda_max;
                    j["redundancies"] = o.redundancies;
                    j["snr_threshold_db"] = std::isfinite(o.snr_threshold_db) ? nlohmann::json(o.snr_threshold_db)
                                                                              : nlohmann::json("inf");
                    j["min_gain_db"] = o.min_gain_db;
                    j["time_budget_s"] = o.time_budget_s;
                    j["screen_iterations"] = o.screen_iterations;
                    j["seed"] = o.seed;
                    j["trim"] = o.trim;
                    j["threads"] = o.threads;
                    j["corpus"] = to_json(s)["corpus"];
                    r->spec = j;
                    break;
                }
            }
            *out = r.release();
        });
    }

    void add_entries(tfpr_experiment& e, std::vector<CorpusEntry> entries)
    {
        for (const auto& n : entries)
        {
            auto same = [&](const CorpusEntry& c) { return c.id == n.id; };
            require(std::count_if(e.sweep.corpus.begin(), e.sweep.corpus.end(), same) == 0 &&
                        std::count_if(entries.begin(), entries.end(), same) == 1,
                    ErrorKind::InvalidArgument, "duplicate signal id '" + n.id + "'");
        }
        for (auto& n : entries)
            e.sweep.corpus.push_back(std::move(n));
    }

    void write_file(const std::string& path, const std::function<void(std::ostream&)>& body)
    {
        std::ostringstream os;
        body(os);
        write_text(path, os.str());
    }
}  // namespace

extern "C" {

const char* tfpr_version(void)
{
    return "1.0.0";
}

const char* tfpr_status_string(tfpr_status status)
{
    switch (status)
    {
        case TFPR_OK:
            return "ok";
        case TFPR_INVALID_ARGUMENT:
            return "invalid argument";
        case TFPR_DIMENSION:
            return "dimension mismatch";
        case TFPR_NOT_A_FRAME:
            return "not a frame";
        case TFPR_IO:
            return "i/o error";
        case TFPR_FORMAT:
            return "format error";
        case TFPR_NUMERICAL:
            return "numerical failure";
        case TFPR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* tfpr_last_error(void)
{
    return t_last_error.c_str();
}

tfpr_status tfpr_signal_create(const double* samples, size_t length, unsigned sample_rate, tfpr_signal** out)
{
    return guarded([&] {
        need(out, "output pointer");
        require(length == 0 || samples != nullptr, ErrorKind::InvalidArgument, "samples is null");
        require(sample_rate > 0, ErrorKind::InvalidArgument, "sample rate must be positive");
        auto s = std::make_unique<tfpr_signal>();
        s->signal.samples.assign(samples, samples + length);
        s->signal.sample_rate = sample_rate;
        *out = s.release();
    });
}

tfpr_status tfpr_signal_read_wav(const char* path, unsigned target_rate, size_t target_length, tfpr_signal** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "output pointer");
        auto s = std::make_unique<tfpr_signal>();
        s->signal = ingest_wav(path, target_rate ? target_rate : 22050, target_length ? target_length : kDefaultLength);
        *out = s.release();
    });
}

tfpr_status tfpr_signal_synth(const char* kind, size_t length, unsigned sample_rate, uint64_t seed, tfpr_signal** out)
{
    return guarded([&] {
        need(kind, "kind");
        need(out, "output pointer");
        auto s = std::make_unique<tfpr_signal>();
        s->signal = synth_signal(synth_from_name(kind), SynthParams{}, length, sample_rate, seed);
        *out = s.release();
    });
}

tfpr_status tfpr_signal_write_wav(const tfpr_signal* s, const char* path, int float32)
{
    return guarded([&] {
        need(s, "signal");
        need(path, "path");
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty())
            std::filesystem::create_directories(parent);
        write_wav(path, s->signal, float32 ? WavEncoding::Float32 : WavEncoding::Pcm16);
    });
}

size_t tfpr_signal_length(const tfpr_signal* s)
{
    return s ? s->signal.length() : 0;
}

unsigned tfpr_signal_rate(const tfpr_signal* s)
{
    return s ? s->signal.sample_rate : 0;
}

const double* tfpr_signal_data(const tfpr_signal* s)
{
    return s ? s->signal.samples.data() : nullptr;
}

void tfpr_signal_destroy(tfpr_signal* s)
{
    delete s;
}

tfpr_status tfpr_frame_create(const char* family, double lambda, size_t a, size_t M, size_t L, unsigned sample_rate,
                              tfpr_frame** out)
{
    return guarded([&] {
        need(family, "family");
        need(out, "output pointer");
        require(sample_rate > 0, ErrorKind::InvalidArgument, "sample rate must be positive");
        const Grid grid{a, M, L};
        grid.validate();
        const WindowFamily f = parse_family(family);
        const double lam = lambda > 0.0 ? lambda : grid_matched_lambda(grid, sample_rate).value;
        auto fr = std::make_unique<tfpr_frame>();
        fr->frame = make_frame(window_for(f, lam, L, sample_rate), grid, sample_rate);
        fr->lambda = lam;
        *out = fr.release();
    });
}

tfpr_status tfpr_frame_create_for_lambda(const char* family, double lambda, size_t D, size_t L, unsigned sample_rate,
                                         tfpr_frame** out)
{
    return guarded([&] {
        need(family, "family");
        need(out, "output pointer");
        require(sample_rate > 0, ErrorKind::InvalidArgument, "sample rate must be positive");
        const WindowFamily f = parse_family(family);
        const RealizedGrid rg = realize_grid(lambda, D, L, sample_rate);
        auto fr = std::make_unique<tfpr_frame>();
        fr->frame = make_frame(window_for(f, rg.lambda, L, sample_rate), rg.grid, sample_rate);
        fr->lambda = rg.lambda;
        *out = fr.release();
    });
}

size_t tfpr_frame_hop(const tfpr_frame* f)
{
    return f ? f->frame.grid.a : 0;
}

size_t tfpr_frame_channels(const tfpr_frame* f)
{
    return f ? f->frame.grid.M : 0;
}

size_t tfpr_frame_length(const tfpr_frame* f)
{
    return f ? f->frame.grid.L : 0;
}

double tfpr_frame_lambda(const tfpr_frame* f)
{
    return f ? f->lambda : 0.0;
}

const double* tfpr_frame_window(const tfpr_frame* f)
{
    return f ? f->frame.analysis.taps.data() : nullptr;
}

const double* tfpr_frame_dual(const tfpr_frame* f)
{
    return f ? f->frame.dual.taps.data() : nullptr;
}

void tfpr_frame_destroy(tfpr_frame* f)
{
    delete f;
}

tfpr_status tfpr_stft(const tfpr_frame* f, const tfpr_signal* s, tfpr_coeffs** out)
{
    return guarded([&] {
        need(f, "frame");
        need(s, "signal");
        need(out, "output pointer");
        auto c = std::make_unique<tfpr_coeffs>();
        c->spectrum = stft(s->signal, f->frame.analysis, f->frame.grid);
        *out = c.release();
    });
}

tfpr_status tfpr_istft(const tfpr_frame* f, const tfpr_coeffs* c, tfpr_signal** out)
{
    return guarded([&] {
        need(f, "frame");
        need(c, "coefficients");
        need(out, "output pointer");
        require(c->spectrum.grid == f->frame.grid, ErrorKind::Dimension, "coefficients belong to another lattice");
        auto s = std::make_unique<tfpr_signal>();
        s->signal = istft(c->spectrum, f->frame.dual, f->frame.sample_rate);
        *out = s.release();
    });
}

size_t tfpr_coeffs_channels(const tfpr_coeffs* c)
{
    return c ? c->spectrum.grid.bins() : 0;
}

size_t tfpr_coeffs_frames(const tfpr_coeffs* c)
{
    return c ? c->spectrum.grid.frames() : 0;
}

void tfpr_coeffs_copy(const tfpr_coeffs* c, double* re, double* im)
{
    if (!c)
        return;
    for (std::size_t i = 0; i < c->spectrum.coeffs.size(); ++i)
    {
        if (re)
            re[i] = c->spectrum.coeffs[i].real();
        if (im)
            im[i] = c->spectrum.coeffs[i].imag();
    }
}

void tfpr_coeffs_magnitude(const tfpr_coeffs* c, double* out)
{
    if (!c || !out)
        return;
    for (std::size_t i = 0; i < c->spectrum.coeffs.size(); ++i)
        out[i] = std::abs(c->spectrum.coeffs[i]);
}

tfpr_status tfpr_projection_error(const tfpr_frame* f, const tfpr_coeffs* c, double* out)
{
    return guarded([&] {
        need(f, "frame");
        need(c, "coefficients");
        need(out, "output pointer");
        require(c->spectrum.grid == f->frame.grid, ErrorKind::Dimension, "coefficients belong to another lattice");
        *out = projection_error(c->spectrum, f->frame.analysis, f->frame.dual);
    });
}

void tfpr_coeffs_destroy(tfpr_coeffs* c)
{
    delete c;
}

void tfpr_pr_options_default(tfpr_pr_options* opts)
{
    if (!opts)
        return;
    opts->fgla_iterations = FglaConfig{}.iterations;
    opts->fgla_alpha = FglaConfig{}.alpha;
    opts->pghi_tolerance = PghiConfig{}.rel_tolerance;
    opts->seed = PghiConfig{}.rng_seed;
}

tfpr_status tfpr_reconstruct(const tfpr_frame* f, const tfpr_coeffs* c, const char* algorithm,
                             const tfpr_pr_options* opts, tfpr_signal** out)
{
    return guarded([&] {
        need(f, "frame");
        need(c, "coefficients");
        need(algorithm, "algorithm");
        need(out, "output pointer");
        require(c->spectrum.grid == f->frame.grid, ErrorKind::Dimension, "coefficients belong to another lattice");
        tfpr_pr_options o;
        tfpr_pr_options_default(&o);
        if (opts)
            o = *opts;
        AlgorithmSpec alg = AlgorithmSpec::parse(algorithm);
        if (alg.kind == Algorithm::Fgla && std::string(algorithm).find('(') == std::string::npos)
            alg.iterations = o.fgla_iterations;

        const Frame& frame = f->frame;
        const Magnitude mags = magnitude_of(c->spectrum);
        auto s = std::make_unique<tfpr_signal>();
        switch (alg.kind)
        {
            case Algorithm::Pghi:
            {
                PghiConfig cfg;
                cfg.rel_tolerance = o.pghi_tolerance;
                cfg.rng_seed = o.seed;
                s->signal = pghi(mags, frame, f->lambda, cfg).reconstructed;
                break;
            }
            case Algorithm::Fgla:
            {
                FglaConfig cfg;
                cfg.alpha = o.fgla_alpha;
                cfg.iterations = alg.iterations;
                s->signal = fgla(mags, frame, cfg).reconstructed;
                break;
            }
            case Algorithm::Spsi:
                s->signal = spsi(mags, frame).reconstructed;
                break;
            case Algorithm::ZeroPhase:
                s->signal = zero_phase_baseline(mags, frame).reconstructed;
                break;
            case Algorithm::PhaseNoise:
                s->signal = istft(distort_phase(c->spectrum, alg.sigma, o.seed), frame.dual, frame.sample_rate);
                break;
        }
        *out = s.release();
    });
}

tfpr_status tfpr_snr_ms(const tfpr_signal* original, const tfpr_signal* reconstructed, size_t trim, double* out_db)
{
    return guarded([&] {
        need(original, "original");
        need(reconstructed, "reconstruction");
        need(out_db, "output pointer");
        if (trim == 0)
            *out_db = snr_ms(original->signal, reconstructed->signal);
        else
            *out_db = snr_ms(trimmed(original->signal, trim), trimmed(reconstructed->signal, trim));
    });
}

tfpr_status tfpr_experiment_create(tfpr_experiment** out)
{
    return guarded([&] {
        need(out, "output pointer");
        *out = new tfpr_experiment;
    });
}

tfpr_status tfpr_experiment_set(tfpr_experiment* e, const char* key, const char* value)
{
    return guarded([&] {
        need(e, "experiment");
        need(key, "key");
        need(value, "value");
        // validate on a copy so a bad value leaves the experiment untouched
        tfpr_experiment copy = *e;
        set_key(copy, trim_ws(key), value);
        *e = std::move(copy);
    });
}

tfpr_status tfpr_experiment_add_signal(tfpr_experiment* e, const char* id, const tfpr_signal* s)
{
    return guarded([&] {
        need(e, "experiment");
        need(id, "id");
        need(s, "signal");
        add_entries(*e, {{id, s->signal}});
    });
}

tfpr_status tfpr_experiment_add_corpus_dir(tfpr_experiment* e, const char* dir, size_t target_length)
{
    return guarded([&] {
        need(e, "experiment");
        need(dir, "directory");
        namespace fs = std::filesystem;
        std::error_code ec;
        require(fs::is_directory(dir, ec), ErrorKind::Io, std::string("not a directory: ") + dir);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
        {
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
            if (entry.is_regular_file() && ext == ".wav")
                files.push_back(entry.path());
        }
        require(!files.empty(), ErrorKind::Io, std::string("no .wav files in ") + dir);
        std::sort(files.begin(), files.end());
        std::vector<CorpusEntry> added;
        for (const auto& p : files)
            added.push_back({p.stem().string(), ingest_wav(p.string(), 22050, target_length ? target_length : kDefaultLength)});
        add_entries(*e, std::move(added));
    });
}

tfpr_status tfpr_experiment_add_synthetic(tfpr_experiment* e, const char* kind, size_t count, size_t length,
                                          uint64_t seed)
{
    return guarded([&] {
        need(e, "experiment");
        need(kind, "kind");
        require(count >= 1, ErrorKind::InvalidArgument, "count must be >= 1");
        const SynthKind k = synth_from_name(kind);
        const std::size_t L = length ? length : kDefaultLength;
        std::vector<CorpusEntry> added;
        for (std::size_t i = 0; i < count; ++i)
        {
            char id[64];
            std::snprintf(id, sizeof id, "%s%02zu", synth_name(k), i);
            added.push_back({id, synth_signal(k, SynthParams{}, L, 22050, seed + i)});
        }
        add_entries(*e, std::move(added));
    });
}

size_t tfpr_experiment_corpus_size(const tfpr_experiment* e)
{
    return e ? e->sweep.corpus.size() : 0;
}

void tfpr_experiment_destroy(tfpr_experiment* e)
{
    delete e;
}

tfpr_status tfpr_run_sweep(const tfpr_experiment* e, tfpr_results** out)
{
    return run(e, out, ExperimentKind::Sweep);
}

tfpr_status tfpr_run_noise(const tfpr_experiment* e, tfpr_results** out)
{
    return run(e, out, ExperimentKind::Noise);
}

tfpr_status tfpr_run_filter(const tfpr_experiment* e, tfpr_results** out)
{
    return run(e, out, ExperimentKind::Filter);
}

tfpr_status tfpr_run_optimize(const tfpr_experiment* e, tfpr_results** out)
{
    return run(e, out, ExperimentKind::Optimize);
}

size_t tfpr_results_count(const tfpr_results* r)
{
    return r ? r->rows.size() : 0;
}

tfpr_status tfpr_results_row(const tfpr_results* r, size_t index, tfpr_row* out)
{
    return guarded([&] {
        need(r, "results");
        need(out, "output pointer");
        require(index < r->rows.size(), ErrorKind::InvalidArgument, "row index out of range");
        const CellResult& c = r->rows[index];
        out->algorithm = c.algorithm.c_str();
        out->window = c.window.c_str();
        out->lambda_requested = c.lambda_requested;
        out->lambda_realized = c.lambda_realized;
        out->D = c.D;
        out->a = c.a;
        out->M = c.M;
        out->signal_id = c.signal_id.c_str();
        out->snr_ms_db = c.snr_ms_db;
        out->projection_error = c.projection_error;
        out->wall_time_s = c.wall_time_s;
        out->iterations = c.iterations;
        out->seed = c.seed;
        out->status = c.status.c_str();
    });
}

int tfpr_results_below_threshold(const tfpr_results* r)
{
    return r && r->kind == ExperimentKind::Optimize && r->optimized.below_threshold ? 1 : 0;
}

tfpr_status tfpr_results_write(const tfpr_results* r, const char* path, const char* format)
{
    return guarded([&] {
        need(r, "results");
        need(path, "path");
        need(format, "format");
        const std::string fmt = format;
        require(fmt == "csv" || fmt == "json", ErrorKind::InvalidArgument, "format must be csv or json");
        const bool opt = r->kind == ExperimentKind::Optimize;
        if (fmt == "csv")
            write_file(path, [&](std::ostream& os) {
                if (opt)
                    write_ranges_csv(os, r->optimized.ranges);
                else
                    write_csv(os, r->rows);
            });
        else
            write_file(path, [&](std::ostream& os) {
                os << (opt ? to_json(r->optimized) : to_json(r->rows)).dump(2) << '\n';
            });
    });
}

tfpr_status tfpr_results_write_cells(const tfpr_results* r, const char* path)
{
    return guarded([&] {
        need(r, "results");
        need(path, "path");
        write_file(path, [&](std::ostream& os) { write_csv(os, r->rows); });
    });
}

tfpr_status tfpr_results_write_spec(const tfpr_results* r, const char* path)
{
    return guarded([&] {
        need(r, "results");
        need(path, "path");
        write_file(path, [&](std::ostream& os) { os << r->spec.dump(2) << '\n'; });
    });
}

void tfpr_results_destroy(tfpr_results* r)
{
    delete r;
}

}  // extern "C"
