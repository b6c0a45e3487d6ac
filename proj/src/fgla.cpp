#include "error.hpp"
#include "phase_retrieval.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace tfpr
{
    Spectrum impose_magnitude(const Spectrum& estimate, const Magnitude& mags)
    {
        require(estimate.grid == mags.grid, ErrorKind::Dimension, "estimate and magnitudes live on different grids");
        Spectrum out(mags.grid);
        for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        {
            const cplx z = estimate.coeffs[i];
            const double r = std::abs(z);
            out.coeffs[i] = r > 0.0 ? z * (mags.values[i] / r) : cplx(mags.values[i], 0.0);
        }
        return out;
    }

    namespace
    {
        double magnitude_residual(const Spectrum& projected, const Magnitude& mags)
        {
            Magnitude diff = magnitude_of(projected);
            for (std::size_t i = 0; i < diff.values.size(); ++i)
                diff.values[i] -= mags.values[i];
            return full_norm(diff);
        }
    }  // namespace

    PrResult fgla(const Magnitude& mags, const Frame& frame, const FglaConfig& cfg)
    {
        require(cfg.iterations >= 1, ErrorKind::InvalidArgument, "FGLA needs at least one iteration");
        require(cfg.alpha >= 0.0 && cfg.alpha < 1.0, ErrorKind::InvalidArgument, "FGLA alpha must lie in [0, 1)");
        require(mags.grid == frame.grid, ErrorKind::Dimension, "magnitude grid does not match frame");
        for (double v : mags.values)
            require(std::isfinite(v) && v >= 0.0, ErrorKind::Numerical, "magnitudes must be finite and nonnegative");

        using clock = std::chrono::steady_clock;
        double paused = 0.0;
        const auto t0 = clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count() - paused; };

        PrResult res;
        Spectrum prev(mags.grid);
        for (std::size_t i = 0; i < prev.coeffs.size(); ++i)
            prev.coeffs[i] = cplx(mags.values[i], 0.0);
        Spectrum t = prev;
        Spectrum p = prev;

        for (std::size_t k = 1; k <= cfg.iterations; ++k)
        {
            p = impose_magnitude(project_consistent(t, frame.analysis, frame.dual), mags);
            for (const cplx& c : p.coeffs)
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                    fail(ErrorKind::Numerical, "FGLA produced non-finite coefficients at iteration " + std::to_string(k));

            const double change = full_distance(p, prev);
            const double scale = full_norm(p);
            for (std::size_t i = 0; i < t.coeffs.size(); ++i)
                t.coeffs[i] = p.coeffs[i] + cfg.alpha * (p.coeffs[i] - prev.coeffs[i]);
            prev = p;
            res.iterations = k;

            if (cfg.track_residual || (cfg.record_every > 0 && k % cfg.record_every == 0))
            {
                const auto pause0 = clock::now();
                if (cfg.track_residual)
                    res.residuals.push_back(magnitude_residual(project_consistent(p, frame.analysis, frame.dual), mags));
                const double at = std::chrono::duration<double>(pause0 - t0).count() - paused;
                if (cfg.record_every > 0 && k % cfg.record_every == 0)
                    res.snapshots.push_back({k, at, istft(p, frame.dual, frame.sample_rate)});
                paused += std::chrono::duration<double>(clock::now() - pause0).count();
            }

            if (change <= cfg.stop_tolerance * scale)
                break;
        }

        res.reconstructed = istft(p, frame.dual, frame.sample_rate);
        res.phase = phase_of(p);
        res.wall_time = elapsed();
        return res;
    }
}  // namespace tfpr
