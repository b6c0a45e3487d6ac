#pragma once

#include "types.hpp"

#include <cstddef>

namespace tfpr
{
    enum class LambdaSource
    {
        Given,
        FittedFromWindow,
        FromGrid,
    };

    /// Time-frequency ratio in the units of lambda = aM / xi_s (a in samples, xi_s in Hz).
    struct LambdaSpec
    {
        double value = 0.0;
        LambdaSource source = LambdaSource::Given;
    };

    /// Number of periodisation terms on each side needed for a dropped tail below 1e-16.
    std::size_t gaussian_terms(double lambda, std::size_t L, unsigned sample_rate);

    /// g[l] = sum_k exp(-pi (l - kL)^2 / (xi_s lambda)), truncated adaptively.
    Window periodized_gaussian(double lambda, std::size_t L, unsigned sample_rate);

    LambdaSpec grid_matched_lambda(const Grid& grid, unsigned sample_rate);

    /// Periodic cosine-sum / triangle window of the given support, centred at index 0, peak 1.
    Window named_window(WindowFamily family, std::size_t support, std::size_t L);

    /// argmin_lambda ||g / max|g| - g_lambda||, golden-section search on log(lambda).
    LambdaSpec fit_lambda(const Window& w, unsigned sample_rate);

    /// Gaussian: periodized_gaussian. Named families: the support whose window is closest to g_lambda.
    Window window_for_lambda(WindowFamily family, double lambda, unsigned sample_rate, std::size_t L);
}  // namespace tfpr
