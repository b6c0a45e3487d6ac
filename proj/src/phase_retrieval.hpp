#pragma once

#include "stft.hpp"
#include "types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tfpr
{
    enum class BelowTolerancePhase
    {
        RandomUniform,
        Zero,
    };

    struct PghiConfig
    {
        double rel_tolerance = 1e-6;
        std::uint64_t rng_seed = 1;
        BelowTolerancePhase below_tol_phase = BelowTolerancePhase::RandomUniform;
    };

    struct FglaConfig
    {
        double alpha = 0.99;
        std::size_t iterations = 100;
        /// 0 records nothing but the final iterate.
        std::size_t record_every = 0;
        /// Stop early once an iteration changes the estimate by at most this fraction of its norm.
        double stop_tolerance = 1e-12;
        /// Record ||P_C(c_k)| - mags| after every iteration (one extra projection each).
        bool track_residual = false;
    };

    struct Snapshot
    {
        std::size_t iteration = 0;
        double elapsed = 0.0;
        Signal signal;
    };

    struct PrResult
    {
        Signal reconstructed;
        /// Wrapped into [-pi, pi), same layout as Magnitude::values.
        std::vector<double> phase;
        std::size_t iterations = 0;
        double wall_time = 0.0;
        std::vector<Snapshot> snapshots;
        std::vector<double> residuals;
        std::size_t assigned = 0;
        std::size_t below_tolerance = 0;
    };

    /// Phase-gradient heap integration. `lambda` uses the aM/xi_s convention; the sample-domain
    /// ratio xi_s * lambda enters the phase-magnitude relations.
    PrResult pghi(const Magnitude& mags, const Frame& frame, double lambda, const PghiConfig& cfg = {});

    /// Fast Griffin-Lim from zero initial phase.
    PrResult fgla(const Magnitude& mags, const Frame& frame, const FglaConfig& cfg = {});

    /// Single-pass spectrogram inversion.
    PrResult spsi(const Magnitude& mags, const Frame& frame);

    PrResult zero_phase_baseline(const Magnitude& mags, const Frame& frame);

    /// Adds i.i.d. N(0, sigma^2) to every phase, wrapped to [-pi, pi); magnitudes are untouched.
    Spectrum distort_phase(const Spectrum& coeffs, double sigma, std::uint64_t rng_seed);

    /// Keeps the phase of `estimate` (0 where it vanishes) and substitutes the target magnitudes.
    Spectrum impose_magnitude(const Spectrum& estimate, const Magnitude& mags);

    /// Phase derivative fields PGHI integrates, estimated from log-magnitudes.
    struct PhaseGradients
    {
        /// d phi / d n per bin
        std::vector<double> time;
        /// d phi / d m per bin
        std::vector<double> freq;
    };

    PhaseGradients pghi_gradients(const Magnitude& mags, double lambda, unsigned sample_rate);
}  // namespace tfpr

namespace tfpr
{
    /// phase[m,n] + 2 pi m n a / M: phase measured relative to each frame's centre.
    std::vector<double> frame_relative_phase(const Grid& g, std::span<const double> phase);
}  // namespace tfpr
