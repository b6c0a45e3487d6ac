#pragma once

#include "phase_retrieval.hpp"
#include "types.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tfpr::harness
{
    enum class Algorithm
    {
        Pghi,
        Fgla,
        Spsi,
        ZeroPhase,
        PhaseNoise,
    };

    struct AlgorithmSpec
    {
        Algorithm kind = Algorithm::Pghi;
        /// FGLA only.
        std::size_t iterations = 100;
        /// PhaseNoise only.
        double sigma = 0.0;

        /// "pghi", "fgla(100)", "spsi", "zerophase", "phasenoise(0.5)"
        std::string name() const;
        static AlgorithmSpec parse(const std::string& text);
    };

    struct CorpusEntry
    {
        std::string id;
        Signal signal;
    };

    struct SweepSpec
    {
        std::vector<AlgorithmSpec> algorithms;
        std::vector<double> lambdas;
        std::vector<std::size_t> redundancies;
        std::vector<WindowFamily> windows{WindowFamily::Gaussian};
        std::vector<CorpusEntry> corpus;
        std::uint64_t seed = 1;
        /// Drop M samples from each end of original and reconstruction before scoring.
        bool trim = true;
        unsigned threads = 1;
        /// When false wall_time_s is written as 0 so repeated runs give identical bytes.
        bool record_timing = true;
        PghiConfig pghi;
        double fgla_alpha = 0.99;

        void validate() const;
    };

    inline constexpr double kLambdaMin = 1e-3;
    inline constexpr double kLambdaMax = 1e4;

    /// Requested (lambda, D) mapped onto a lattice of a length-L signal: M is the divisor of L
    /// (and multiple of D) closest to sqrt(lambda xi_s D), a = M / D.
    struct RealizedGrid
    {
        Grid grid;
        double lambda = 0.0;
    };

    RealizedGrid realize_grid(double lambda, std::size_t D, std::size_t L, unsigned sample_rate);

    struct CellResult
    {
        std::string algorithm;
        std::string window;
        double lambda_requested = 0.0;
        double lambda_realized = 0.0;
        std::size_t D = 0;
        std::size_t a = 0;
        std::size_t M = 0;
        std::string signal_id;
        double snr_ms_db = std::numeric_limits<double>::quiet_NaN();
        double projection_error = std::numeric_limits<double>::quiet_NaN();
        double wall_time_s = 0.0;
        std::size_t iterations = 0;
        std::uint64_t seed = 0;
        /// "ok", "warn: ..." or "error: ..."
        std::string status = "ok";

        bool failed() const { return status.rfind("error", 0) == 0; }
    };

    /// Stable per-cell seed, independent of evaluation order.
    std::uint64_t cell_seed(std::uint64_t master, const std::string& algorithm, WindowFamily family, double lambda,
                            std::size_t D, const std::string& signal_id);

    /// One row per (window, lambda, D, signal, algorithm), in that nesting order regardless of threads.
    std::vector<CellResult> run_sweep(const SweepSpec& spec);

    /// Sweep with one PhaseNoise(sigma) algorithm per sigma.
    std::vector<CellResult> run_noise_sensitivity(const std::vector<double>& sigmas, SweepSpec spec);

    /// Channel weighting max(min(0.1 + cos(2 pi P u), 1), 0.1), u in [0, 1] from DC to Nyquist
    /// (mirrored for negative frequencies). P = 7 gives 15 peaks and 14 valleys over the
    /// two-sided spectrum.
    struct FilterSpec
    {
        double periods = 7.0;
        double floor = 0.1;

        /// Response at DFT index k of a length-n transform.
        double response(std::size_t k, std::size_t n) const;
        std::vector<double> channel_weights(std::size_t M) const;
        bool is_identity(std::size_t n) const;
    };

    inline constexpr std::size_t kFilterMinChannels = 96;

    /// Three rows per cell: "reference" (weighted complex STFT), then PGHI and FGLA on the
    /// weighted magnitudes; all scored against the signal filtered in the DFT domain.
    /// spec.algorithms selects the PR arms (PGHI / FGLA entries) and FGLA's iteration count.
    std::vector<CellResult> run_filter_experiment(const SweepSpec& spec, const FilterSpec& filter);

    /// Signal filtered by multiplying its length-L DFT with the filter response.
    Signal apply_filter(const Signal& s, const FilterSpec& filter);

    struct OptimizeSpec
    {
        AlgorithmSpec algorithm;
        std::vector<CorpusEntry> corpus;
        WindowFamily window = WindowFamily::Gaussian;
        /// Starting point of the lambda search; grid points are seed * sqrt(2)^k inside [min, max].
        double lambda_seed = 3.34;
        double lambda_min = kLambdaMin;
        double lambda_max = kLambdaMax;
        std::vector<std::size_t> redundancies{2, 4, 8, 16, 32};
        double snr_threshold_db = 15.0;
        /// Stop raising D when the best mean SNR improves by less than this.
        double min_gain_db = 0.5;
        /// Seconds; 0 disables the budget.
        double time_budget_s = 0.0;
        std::size_t screen_iterations = 5;
        std::uint64_t seed = 1;
        bool trim = true;
        unsigned threads = 1;
        PghiConfig pghi;
        double fgla_alpha = 0.99;
    };

    std::vector<double> lambda_grid(double seed, double lo, double hi);

    struct ParameterRange
    {
        std::string algorithm;
        std::size_t D = 0;
        double lambda_lo = 0.0, lambda_hi = 0.0;
        std::size_t M_lo = 0, M_hi = 0;
        double best_lambda = 0.0;
        double best_snr_db = -std::numeric_limits<double>::infinity();
        /// Grid lambdas (requested values) whose mean SNR met the threshold.
        std::vector<double> passing;
        bool below_threshold = true;
    };

    struct OptimizeResult
    {
        std::vector<ParameterRange> ranges;
        /// Every full-count cell evaluated (screening cells excluded).
        std::vector<CellResult> cells;
        bool below_threshold = true;
        std::string stop_reason;
    };

    OptimizeResult optimize_parameters(const OptimizeSpec& spec);

    /// Arithmetic mean of snr_ms_db over non-failed rows matching (algorithm, lambda_requested, D).
    double mean_snr(const std::vector<CellResult>& rows, const std::string& algorithm, double lambda, std::size_t D);
}  // namespace tfpr::harness
