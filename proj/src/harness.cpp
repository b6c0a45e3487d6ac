#include "harness.hpp"

#include "error.hpp"
#include "fft.hpp"
#include "metrics.hpp"
#include "stft.hpp"
#include "windows.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>

namespace tfpr::harness
{
    namespace
    {
        std::string format_number(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body)
        {
            const unsigned workers = std::max(1u, std::min<unsigned>(threads, unsigned(count)));
            if (workers == 1)
            {
                for (std::size_t i = 0; i < count; ++i)
                    body(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < count; i = next++)
                        body(i);
                });
            for (auto& t : pool)
                t.join();
        }

        Window window_for(WindowFamily family, double lambda, std::size_t L, unsigned rate)
        {
            return family == WindowFamily::Gaussian ? periodized_gaussian(lambda, L, rate)
                                                    : window_for_lambda(family, lambda, rate, L);
        }

        // Frames are shared by every signal and algorithm on the same lattice; the first
        // requester builds, the rest wait.
        class FrameCache
        {
        public:
            using Key = std::tuple<int, std::size_t, std::size_t, std::size_t, unsigned>;

            std::shared_ptr<const Frame> get(WindowFamily family, const RealizedGrid& rg, unsigned rate)
            {
                const Key key{int(family), rg.grid.a, rg.grid.M, rg.grid.L, rate};
                std::promise<std::shared_ptr<const Frame>> promise;
                std::shared_future<std::shared_ptr<const Frame>> fut;
                bool builder = false;
                {
                    std::lock_guard lock(m_mutex);
                    auto it = m_frames.find(key);
                    if (it == m_frames.end())
                    {
                        fut = promise.get_future().share();
                        m_frames.emplace(key, fut);
                        builder = true;
                    }
                    else
                    {
                        fut = it->second;
                    }
                }
                if (builder)
                {
                    try
                    {
                        promise.set_value(std::make_shared<const Frame>(
                            make_frame(window_for(family, rg.lambda, rg.grid.L, rate), rg.grid, rate)));
                    }
                    catch (...)
                    {
                        promise.set_exception(std::current_exception());
                    }
                }
                return fut.get();
            }

        private:
            std::mutex m_mutex;
            std::map<Key, std::shared_future<std::shared_ptr<const Frame>>> m_frames;
        };

        struct Outcome
        {
            Signal reconstructed;
            double projection_error = 0.0;
            double wall_time = 0.0;
            std::size_t iterations = 0;
        };

        Outcome run_algorithm(const AlgorithmSpec& alg, const Spectrum& S, const Magnitude& mags, const Frame& frame,
                              double lambda, std::uint64_t seed, const PghiConfig& pghi_cfg, double alpha)
        {
            Outcome out;
            if (alg.kind == Algorithm::PhaseNoise)
            {
                const auto t0 = std::chrono::steady_clock::now();
                const Spectrum c = distort_phase(S, alg.sigma, seed);
                out.reconstructed = istft(c, frame.dual, frame.sample_rate);
                out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                out.projection_error = projection_error(c, frame.analysis, frame.dual);
                return out;
            }

            PrResult r;
            switch (alg.kind)
            {
                case Algorithm::Pghi:
                {
                    PghiConfig cfg = pghi_cfg;
                    cfg.rng_seed = seed;
                    r = pghi(mags, frame, lambda, cfg);
                    break;
                }
                case Algorithm::Fgla:
                {
                    FglaConfig cfg;
                    cfg.alpha = alpha;
                    cfg.iterations = alg.iterations;
                    r = fgla(mags, frame, cfg);
                    break;
                }
                case Algorithm::Spsi:
                    r = spsi(mags, frame);
                    break;
                default:
                    r = zero_phase_baseline(mags, frame);
                    break;
            }
            out.reconstructed = std::move(r.reconstructed);
            out.wall_time = r.wall_time;
            out.iterations = r.iterations;
            out.projection_error = projection_error(with_phase(mags, r.phase), frame.analysis, frame.dual);
            return out;
        }

        double score(const Signal& reference, const Signal& reconstructed, std::size_t M, bool trim)
        {
            if (!trim)
                return snr_ms(reference, reconstructed);
            return snr_ms(trimmed(reference, M), trimmed(reconstructed, M));
        }

        std::string error_status(const std::exception& e) { return std::string("error: ") + e.what(); }

        struct Config
        {
            WindowFamily family;
            double lambda;
            std::size_t D;
        };

        std::vector<Config> configs_of(const SweepSpec& spec)
        {
            std::vector<Config> out;
            for (WindowFamily f : spec.windows)
                for (double lambda : spec.lambdas)
                    for (std::size_t D : spec.redundancies)
                        out.push_back({f, lambda, D});
            return out;
        }

        CellResult blank_row(const Config& c, const std::string& algorithm, const std::string& signal_id,
                             std::uint64_t master)
        {
            CellResult row;
            row.algorithm = algorithm;
            row.window = family_name(c.family);
            row.lambda_requested = c.lambda;
            row.D = c.D;
            row.signal_id = signal_id;
            row.seed = cell_seed(master, algorithm, c.family, c.lambda, c.D, signal_id);
            return row;
        }

        void fill_grid(CellResult& row, const RealizedGrid& rg)
        {
            row.lambda_realized = rg.lambda;
            row.a = rg.grid.a;
            row.M = rg.grid.M;
        }

        // Runs `arms` for every (config, signal) pair; `arm` fills one row from shared per-pair state.
        template <typename Prepare, typename Arm>
        std::vector<CellResult> run_cells(const SweepSpec& spec, const std::vector<std::string>& arm_names,
                                          Prepare prepare, Arm arm)
        {
            const auto configs = configs_of(spec);
            const std::size_t per_task = arm_names.size();
            const std::size_t tasks = configs.size() * spec.corpus.size();
            std::vector<CellResult> rows(tasks * per_task);
            FrameCache cache;

            parallel_for(tasks, spec.threads, [&](std::size_t t) {
                const Config& c = configs[t / spec.corpus.size()];
                const CorpusEntry& entry = spec.corpus[t % spec.corpus.size()];
                CellResult* out = &rows[t * per_task];
                for (std::size_t k = 0; k < per_task; ++k)
                    out[k] = blank_row(c, arm_names[k], entry.id, spec.seed);
                try
                {
                    const RealizedGrid rg = realize_grid(c.lambda, c.D, entry.signal.length(), entry.signal.sample_rate);
                    for (std::size_t k = 0; k < per_task; ++k)
                        fill_grid(out[k], rg);
                    const auto frame = cache.get(c.family, rg, entry.signal.sample_rate);
                    auto state = prepare(entry.signal, *frame);
                    for (std::size_t k = 0; k < per_task; ++k)
                    {
                        try
                        {
                            arm(k, state, entry.signal, *frame, rg, out[k]);
                            if (!spec.record_timing)
                                out[k].wall_time_s = 0.0;
                        }
                        catch (const std::exception& e)
                        {
                            out[k].status = error_status(e);
                        }
                    }
                }
                catch (const std::exception& e)
                {
                    for (std::size_t k = 0; k < per_task; ++k)
                        out[k].status = error_status(e);
                }
            });
            return rows;
        }

        std::uint64_t mix64(std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }
    }  // namespace

    std::string AlgorithmSpec::name() const
    {
        switch (kind)
        {
            case Algorithm::Pghi:
                return "pghi";
            case Algorithm::Fgla:
                return "fgla(" + std::to_string(iterations) + ")";
            case Algorithm::Spsi:
                return "spsi";
            case Algorithm::ZeroPhase:
                return "zerophase";
            case Algorithm::PhaseNoise:
                return "phasenoise(" + format_number(sigma) + ")";
        }
        return "?";
    }

    AlgorithmSpec AlgorithmSpec::parse(const std::string& text)
    {
        std::string head = text, arg;
        if (const auto open = text.find('('); open != std::string::npos)
        {
            require(text.back() == ')', ErrorKind::InvalidArgument, "malformed algorithm '" + text + "'");
            head = text.substr(0, open);
            arg = text.substr(open + 1, text.size() - open - 2);
        }
        std::transform(head.begin(), head.end(), head.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
        AlgorithmSpec spec;
        try
        {
            if (head == "pghi")
                spec.kind = Algorithm::Pghi;
            else if (head == "fgla")
            {
                spec.kind = Algorithm::Fgla;
                if (!arg.empty())
                {
                    std::size_t used = 0;
                    const long n = std::stol(arg, &used);
                    require(used == arg.size() && n >= 1, ErrorKind::InvalidArgument, "FGLA iterations must be >= 1");
                    spec.iterations = std::size_t(n);
                }
            }
            else if (head == "spsi")
                spec.kind = Algorithm::Spsi;
            else if (head == "zerophase" || head == "zero")
                spec.kind = Algorithm::ZeroPhase;
            else if (head == "phasenoise" || head == "noise")
            {
                spec.kind = Algorithm::PhaseNoise;
                require(!arg.empty(), ErrorKind::InvalidArgument, "phasenoise needs a sigma, e.g. phasenoise(0.5)");
                std::size_t used = 0;
                spec.sigma = std::stod(arg, &used);
                require(used == arg.size() && spec.sigma >= 0.0, ErrorKind::InvalidArgument, "sigma must be >= 0");
            }
            else
                fail(ErrorKind::InvalidArgument,
                     "unknown algorithm '" + text + "' (pghi, fgla[(K)], spsi, zerophase, phasenoise(sigma))");
        }
        catch (const std::logic_error&)
        {
            fail(ErrorKind::InvalidArgument, "malformed algorithm argument in '" + text + "'");
        }
        require(arg.empty() || spec.kind == Algorithm::Fgla || spec.kind == Algorithm::PhaseNoise,
                ErrorKind::InvalidArgument, "algorithm '" + head + "' takes no argument");
        return spec;
    }

    void SweepSpec::validate() const
    {
        require(!algorithms.empty(), ErrorKind::InvalidArgument, "no algorithms given");
        require(!lambdas.empty(), ErrorKind::InvalidArgument, "no lambda values given");
        require(!redundancies.empty(), ErrorKind::InvalidArgument, "no redundancies given");
        require(!windows.empty(), ErrorKind::InvalidArgument, "no window families given");
        require(!corpus.empty(), ErrorKind::InvalidArgument, "corpus is empty");
        for (double lambda : lambdas)
            require(lambda >= kLambdaMin && lambda <= kLambdaMax, ErrorKind::InvalidArgument,
                    "lambda " + format_number(lambda) + " outside [1e-3, 1e4]");
        for (std::size_t D : redundancies)
            require(D >= 1, ErrorKind::InvalidArgument, "redundancy must be >= 1");
        for (WindowFamily f : windows)
            require(f != WindowFamily::Custom, ErrorKind::InvalidArgument, "custom windows cannot be swept");
        for (const auto& e : corpus)
            require(e.signal.length() > 0, ErrorKind::InvalidArgument, "corpus signal '" + e.id + "' is empty");
        require(threads >= 1, ErrorKind::InvalidArgument, "threads must be >= 1");
    }

    RealizedGrid realize_grid(double lambda, std::size_t D, std::size_t L, unsigned sample_rate)
    {
        require(lambda > 0.0 && D >= 1 && L > 0, ErrorKind::InvalidArgument, "grid needs lambda > 0, D >= 1, L > 0");
        const double target = std::sqrt(lambda * double(sample_rate) * double(D));
        std::size_t best = 0;
        double best_dist = 0.0;
        for (std::size_t M = D; M <= L; M += D)
        {
            if (L % M != 0)
                continue;
            const double dist = std::abs(double(M) - target);
            if (best == 0 || dist < best_dist)
            {
                best = M;
                best_dist = dist;
            }
        }
        require(best != 0, ErrorKind::Dimension,
                "no channel count divides L=" + std::to_string(L) + " with redundancy " + std::to_string(D));
        RealizedGrid rg;
        rg.grid = Grid{best / D, best, L};
        rg.lambda = double(rg.grid.a) * double(rg.grid.M) / double(sample_rate);
        return rg;
    }

    std::uint64_t cell_seed(std::uint64_t master, const std::string& algorithm, WindowFamily family, double lambda,
                            std::size_t D, const std::string& signal_id)
    {
        // FNV-1a over the cell id, then a SplitMix64 finalizer
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto feed = [&h](const void* p, std::size_t n) {
            const auto* b = static_cast<const unsigned char*>(p);
            for (std::size_t i = 0; i < n; ++i)
                h = (h ^ b[i]) * 0x100000001b3ULL;
        };
        const std::uint64_t lam = std::bit_cast<std::uint64_t>(lambda), d = D, fam = std::uint64_t(family);
        feed(&master, sizeof master);
        feed(algorithm.data(), algorithm.size());
        feed(&fam, sizeof fam);
        feed(&lam, sizeof lam);
        feed(&d, sizeof d);
        feed(signal_id.data(), signal_id.size());
        return mix64(h);
    }

    std::vector<CellResult> run_sweep(const SweepSpec& spec)
    {
        spec.validate();
        std::vector<std::string> names;
        for (const auto& a : spec.algorithms)
            names.push_back(a.name());

        struct State
        {
            Spectrum S;
            Magnitude mags;
        };
        auto prepare = [](const Signal& s, const Frame& frame) {
            State st;
            st.S = stft(s, frame.analysis, frame.grid);
            st.mags = magnitude_of(st.S);
            return st;
        };
        auto arm = [&](std::size_t k, const State& st, const Signal& s, const Frame& frame, const RealizedGrid& rg,
                       CellResult& row) {
            const Outcome o =
                run_algorithm(spec.algorithms[k], st.S, st.mags, frame, rg.lambda, row.seed, spec.pghi, spec.fgla_alpha);
            row.snr_ms_db = score(s, o.reconstructed, rg.grid.M, spec.trim);
            row.projection_error = o.projection_error;
            row.wall_time_s = o.wall_time;
            row.iterations = o.iterations;
        };
        return run_cells(spec, names, prepare, arm);
    }

    std::vector<CellResult> run_noise_sensitivity(const std::vector<double>& sigmas, SweepSpec spec)
    {
        require(!sigmas.empty(), ErrorKind::InvalidArgument, "no sigma values given");
        spec.algorithms.clear();
        for (double sigma : sigmas)
        {
            require(sigma >= 0.0, ErrorKind::InvalidArgument, "sigma must be >= 0");
            AlgorithmSpec a;
            a.kind = Algorithm::PhaseNoise;
            a.sigma = sigma;
            spec.algorithms.push_back(a);
        }
        return run_sweep(spec);
    }

    double FilterSpec::response(std::size_t k, std::size_t n) const
    {
        const double u = double(std::min(k, n - k)) / (0.5 * double(n));
        return std::max(std::min(floor + std::cos(kTwoPi * periods * u), 1.0), floor);
    }

    std::vector<double> FilterSpec::channel_weights(std::size_t M) const
    {
        std::vector<double> w(M / 2 + 1);
        for (std::size_t m = 0; m < w.size(); ++m)
            w[m] = response(m, M);
        return w;
    }

    bool FilterSpec::is_identity(std::size_t n) const
    {
        for (std::size_t k = 0; k <= n / 2; ++k)
            if (response(k, n) != 1.0)
                return false;
        return true;
    }

    Signal apply_filter(const Signal& s, const FilterSpec& filter)
    {
        const std::size_t L = s.length();
        require(L > 0, ErrorKind::InvalidArgument, "cannot filter an empty signal");
        if (filter.is_identity(L))
            return s;
        fft::RealFft plan(L);
        std::copy(s.samples.begin(), s.samples.end(), plan.real());
        plan.forward();
        for (std::size_t k = 0; k <= L / 2; ++k)
            plan.spectrum()[k] *= filter.response(k, L) / double(L);
        plan.inverse();
        return Signal{std::vector<double>(plan.real(), plan.real() + L), s.sample_rate};
    }

    std::vector<CellResult> run_filter_experiment(const SweepSpec& spec_in, const FilterSpec& filter)
    {
        SweepSpec spec = spec_in;
        std::vector<AlgorithmSpec> arms;
        for (const auto& a : spec.algorithms)
            if (a.kind == Algorithm::Pghi || a.kind == Algorithm::Fgla)
                arms.push_back(a);
        if (arms.empty())
        {
            arms.push_back(AlgorithmSpec{Algorithm::Pghi});
            arms.push_back(AlgorithmSpec{Algorithm::Fgla});
        }
        spec.algorithms = arms;
        spec.validate();

        std::vector<std::string> names{"reference"};
        for (const auto& a : arms)
            names.push_back(a.name());

        struct State
        {
            Spectrum weighted;
            Magnitude mags;
            Signal target;
        };
        auto prepare = [&](const Signal& s, const Frame& frame) {
            State st;
            st.weighted = stft(s, frame.analysis, frame.grid);
            const auto w = filter.channel_weights(frame.grid.M);
            const std::size_t bins = frame.grid.bins();
            for (std::size_t i = 0; i < st.weighted.coeffs.size(); ++i)
                st.weighted.coeffs[i] *= w[i % bins];
            st.mags = magnitude_of(st.weighted);
            st.target = apply_filter(s, filter);
            return st;
        };
        auto arm = [&](std::size_t k, const State& st, const Signal&, const Frame& frame, const RealizedGrid& rg,
                       CellResult& row) {
            Outcome o;
            if (k == 0)
            {
                const auto t0 = std::chrono::steady_clock::now();
                o.reconstructed = istft(st.weighted, frame.dual, frame.sample_rate);
                o.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                o.projection_error = projection_error(st.weighted, frame.analysis, frame.dual);
            }
            else
            {
                o = run_algorithm(arms[k - 1], st.weighted, st.mags, frame, rg.lambda, row.seed, spec.pghi,
                                  spec.fgla_alpha);
            }
            row.snr_ms_db = score(st.target, o.reconstructed, rg.grid.M, spec.trim);
            row.projection_error = o.projection_error;
            row.wall_time_s = o.wall_time;
            row.iterations = o.iterations;
            if (rg.grid.M < kFilterMinChannels)
                row.status = "warn: M < 96 does not resolve the filter's peaks and valleys";
        };
        return run_cells(spec, names, prepare, arm);
    }

    double mean_snr(const std::vector<CellResult>& rows, const std::string& algorithm, double lambda, std::size_t D)
    {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : rows)
            if (!r.failed() && r.algorithm == algorithm && r.lambda_requested == lambda && r.D == D)
            {
                sum += r.snr_ms_db;
                ++n;
            }
        return n ? sum / double(n) : std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> lambda_grid(double seed, double lo, double hi)
    {
        require(seed >= lo && seed <= hi && lo > 0.0, ErrorKind::InvalidArgument, "lambda seed outside its range");
        std::vector<double> down, up;
        for (int k = 1;; ++k)
        {
            const double v = seed * std::pow(std::sqrt(2.0), -k);
            if (v < lo * (1.0 - 1e-12))
                break;
            down.push_back(v);
        }
        for (int k = 1;; ++k)
        {
            const double v = seed * std::pow(std::sqrt(2.0), k);
            if (v > hi * (1.0 + 1e-12))
                break;
            up.push_back(v);
        }
        std::vector<double> grid(down.rbegin(), down.rend());
        grid.push_back(seed);
        grid.insert(grid.end(), up.begin(), up.end());
        return grid;
    }

    OptimizeResult optimize_parameters(const OptimizeSpec& spec)
    {
        require(!spec.corpus.empty(), ErrorKind::InvalidArgument, "corpus is empty");
        require(!spec.redundancies.empty(), ErrorKind::InvalidArgument, "no redundancies given");
        require(spec.lambda_min >= kLambdaMin && spec.lambda_max <= kLambdaMax, ErrorKind::InvalidArgument,
                "lambda range must lie within [1e-3, 1e4]");
        require(spec.algorithm.kind != Algorithm::PhaseNoise, ErrorKind::InvalidArgument,
                "the optimiser tunes phase retrieval algorithms only");
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<double> grid = lambda_grid(spec.lambda_seed, spec.lambda_min, spec.lambda_max);
        std::vector<std::size_t> Ds = spec.redundancies;
        std::sort(Ds.begin(), Ds.end());
        Ds.erase(std::unique(Ds.begin(), Ds.end()), Ds.end());

        const AlgorithmSpec full = spec.algorithm;
        AlgorithmSpec screen = full;
        if (full.kind == Algorithm::Fgla)
            screen.iterations = std::min(full.iterations, spec.screen_iterations);

        OptimizeResult res;
        // mean SNR per (full?, grid index, D); full-count rows are kept for the report
        std::map<std::tuple<bool, std::size_t, std::size_t>, double> cache;
        std::function<double(bool, std::size_t, std::size_t)> evaluate = [&](bool is_full, std::size_t idx,
                                                                              std::size_t D) -> double {
            if (!is_full && screen.name() == full.name())
                return evaluate(true, idx, D);
            const auto key = std::make_tuple(is_full, idx, D);
            if (auto it = cache.find(key); it != cache.end())
                return it->second;
            SweepSpec sweep;
            sweep.algorithms = {is_full ? full : screen};
            sweep.lambdas = {grid[idx]};
            sweep.redundancies = {D};
            sweep.windows = {spec.window};
            sweep.corpus = spec.corpus;
            sweep.seed = spec.seed;
            sweep.trim = spec.trim;
            sweep.threads = spec.threads;
            sweep.record_timing = false;
            sweep.pghi = spec.pghi;
            sweep.fgla_alpha = spec.fgla_alpha;
            const auto rows = run_sweep(sweep);
            double m = mean_snr(rows, sweep.algorithms[0].name(), grid[idx], D);
            if (std::isnan(m))
                m = -std::numeric_limits<double>::infinity();
            if (is_full)
                res.cells.insert(res.cells.end(), rows.begin(), rows.end());
            cache.emplace(key, m);
            return m;
        };

        const auto seed_it = std::find(grid.begin(), grid.end(), spec.lambda_seed);
        std::size_t start = std::size_t(seed_it - grid.begin());
        double previous_best = std::numeric_limits<double>::quiet_NaN();
        res.stop_reason = "all redundancies searched";

        for (std::size_t D : Ds)
        {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (spec.time_budget_s > 0.0 && elapsed > spec.time_budget_s)
            {
                res.stop_reason = "time budget reached before D=" + std::to_string(D);
                break;
            }

            // 1. climb to the (screened) peak
            std::size_t peak = start;
            for (;;)
            {
                const double here = evaluate(false, peak, D);
                std::size_t next = peak;
                double next_val = here;
                if (peak > 0 && evaluate(false, peak - 1, D) > next_val)
                {
                    next = peak - 1;
                    next_val = evaluate(false, peak - 1, D);
                }
                if (peak + 1 < grid.size() && evaluate(false, peak + 1, D) > next_val)
                    next = peak + 1;
                if (next == peak)
                    break;
                peak = next;
            }

            // 2. confirm at full count and grow the passing interval in both directions
            ParameterRange range;
            range.algorithm = full.name();
            range.D = D;
            std::vector<std::size_t> passing;
            if (evaluate(true, peak, D) >= spec.snr_threshold_db)
            {
                passing.push_back(peak);
                for (std::size_t i = peak; i > 0 && evaluate(true, i - 1, D) >= spec.snr_threshold_db; --i)
                    passing.push_back(i - 1);
                for (std::size_t i = peak + 1; i < grid.size() && evaluate(true, i, D) >= spec.snr_threshold_db; ++i)
                    passing.push_back(i);
            }
            std::sort(passing.begin(), passing.end());

            std::size_t best_idx = peak;
            for (const auto& [key, value] : cache)
                if (std::get<0>(key) && std::get<2>(key) == D && value > range.best_snr_db)
                {
                    range.best_snr_db = value;
                    best_idx = std::get<1>(key);
                }
            range.best_lambda = grid[best_idx];
            const std::size_t L = spec.corpus.front().signal.length();
            const unsigned rate = spec.corpus.front().signal.sample_rate;
            if (!passing.empty())
            {
                range.below_threshold = false;
                range.lambda_lo = grid[passing.front()];
                range.lambda_hi = grid[passing.back()];
                range.M_lo = realize_grid(range.lambda_lo, D, L, rate).grid.M;
                range.M_hi = realize_grid(range.lambda_hi, D, L, rate).grid.M;
                for (std::size_t i : passing)
                    range.passing.push_back(grid[i]);
                res.below_threshold = false;
            }
            res.ranges.push_back(range);
            start = best_idx;

            // 3. stop raising D once it no longer pays
            const double best = range.best_snr_db;
            if (!std::isnan(previous_best))
            {
                const bool saturated = best >= kPerfectThresholdDb && previous_best >= kPerfectThresholdDb;
                if (saturated || best - previous_best < spec.min_gain_db)
                {
                    res.stop_reason = "gain below " + format_number(spec.min_gain_db) + " dB at D=" + std::to_string(D);
                    break;
                }
            }
            previous_best = best;
        }
        return res;
    }
}  // namespace tfpr::harness
