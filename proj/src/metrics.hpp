#pragma once

#include "stft.hpp"
#include "types.hpp"

#include <limits>
#include <optional>

namespace tfpr
{
    /// Fixed analysis used to score reconstructions; defaults give lambda = 128 * 2048 / xi_s.
    struct SnrMsConfig
    {
        std::size_t M = 2048;
        std::size_t a = 128;
        /// Defaults to aM / xi_s.
        std::optional<double> lambda;
    };

    inline constexpr double kPerfect = std::numeric_limits<double>::infinity();
    /// Values at or above this are treated as a perfect match when comparing.
    inline constexpr double kPerfectThresholdDb = 200.0;

    /// 10 log10(||S||^2 / || |S_r| - |S| ||^2) on the fixed analysis; +inf when the error vanishes.
    /// Signals whose length is not a multiple of M are zero-padded (identically) to the next one.
    double snr_ms(const Signal& original, const Signal& reconstructed, const SnrMsConfig& cfg = {});

    /// 10 log10(||s||^2 / ||s - s_r||^2).
    double time_snr(const Signal& original, const Signal& reconstructed);

    /// ||X - P_C(X)|| over the full conjugate-symmetric spectrum.
    double projection_error(const Spectrum& coeffs, const Window& g, const Window& dual);

    struct MetricReport
    {
        double snr_ms = 0.0;
        double projection_error = 0.0;
        double time_snr = 0.0;
        std::size_t trim = 0;
    };

    /// Drops `trim` samples from both ends.
    Signal trimmed(const Signal& s, std::size_t trim);
}  // namespace tfpr
