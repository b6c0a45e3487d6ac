#include "error.hpp"
#include "phase_retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tfpr
{
    PrResult spsi(const Magnitude& mags, const Frame& frame)
    {
        const auto t0 = std::chrono::steady_clock::now();
        require(mags.grid == frame.grid, ErrorKind::Dimension, "magnitude grid does not match frame");
        const Grid& g = mags.grid;
        const std::size_t bins = g.bins(), N = g.frames();
        require(bins >= 3, ErrorKind::InvalidArgument, "SPSI needs at least 3 channels to pick peaks");
        for (double v : mags.values)
            require(std::isfinite(v) && v >= 0.0, ErrorKind::Numerical, "magnitudes must be finite and nonnegative");

        // Phases are tracked relative to each frame's centre (a sinusoid then has the same phase in
        // all bins of its peak region) and converted to the absolute-time convention at the end.
        std::vector<double> local(bins * N, 0.0);
        std::vector<std::size_t> peaks;
        for (std::size_t n = 1; n < N; ++n)
        {
            const double* mag = &mags.values[n * bins];
            const double* prev = &local[(n - 1) * bins];
            double* cur = &local[n * bins];

            peaks.clear();
            for (std::size_t m = 1; m + 1 < bins; ++m)
                if (mag[m] > mag[m - 1] && mag[m] > mag[m + 1])
                    peaks.push_back(m);
            if (peaks.empty())
                continue;

            // larger peaks claim shared trough bins, so paint them last
            std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t x, std::size_t y) { return mag[x] < mag[y]; });
            for (std::size_t pk : peaks)
            {
                const double al = mag[pk - 1], be = mag[pk], ga = mag[pk + 1];
                const double denom = al - 2.0 * be + ga;
                double p = denom != 0.0 ? 0.5 * (al - ga) / denom : 0.0;
                p = std::clamp(p, -0.5, 0.5);
                const double omega = kTwoPi * (double(pk) + p) / double(g.M);
                const double phi = wrap_phase(prev[pk] + double(g.a) * omega);

                std::size_t lo = pk, hi = pk;
                while (lo > 0 && mag[lo - 1] < mag[lo])
                    --lo;
                while (hi + 1 < bins && mag[hi + 1] < mag[hi])
                    ++hi;
                for (std::size_t m = lo; m <= hi; ++m)
                    cur[m] = phi;
            }
        }

        PrResult res;
        res.iterations = 1;
        res.phase.resize(local.size());
        for (std::size_t n = 0; n < N; ++n)
        {
            for (std::size_t m = 0; m < bins; ++m)
            {
                const double shift = kTwoPi * double((m * ((n * g.a) % g.M)) % g.M) / double(g.M);
                res.phase[n * bins + m] = wrap_phase(local[n * bins + m] - shift);
            }
        }
        res.reconstructed = istft(with_phase(mags, res.phase), frame.dual, frame.sample_rate);
        res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    /// Frame-relative phase of an absolute-time phase matrix (inverse of the conversion in spsi).
    std::vector<double> frame_relative_phase(const Grid& g, std::span<const double> phase)
    {
        const std::size_t bins = g.bins();
        std::vector<double> out(phase.size());
        for (std::size_t n = 0; n < g.frames(); ++n)
            for (std::size_t m = 0; m < bins; ++m)
                out[n * bins + m] = wrap_phase(phase[n * bins + m] +
                                               kTwoPi * double((m * ((n * g.a) % g.M)) % g.M) / double(g.M));
        return out;
    }
}  // namespace tfpr
