#include "error.hpp"
#include "phase_retrieval.hpp"

#include <chrono>
#include <random>

namespace tfpr
{
    PrResult zero_phase_baseline(const Magnitude& mags, const Frame& frame)
    {
        const auto t0 = std::chrono::steady_clock::now();
        require(mags.grid == frame.grid, ErrorKind::Dimension, "magnitude grid does not match frame");
        PrResult res;
        res.phase.assign(mags.values.size(), 0.0);
        res.iterations = 0;
        res.reconstructed = istft(with_phase(mags, res.phase), frame.dual, frame.sample_rate);
        res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    Spectrum distort_phase(const Spectrum& coeffs, double sigma, std::uint64_t rng_seed)
    {
        require(sigma >= 0.0, ErrorKind::InvalidArgument, "phase noise sigma must be nonnegative");
        if (sigma == 0.0)
            return coeffs;
        std::mt19937_64 rng(rng_seed);
        std::normal_distribution<double> noise(0.0, sigma);
        Spectrum out = coeffs;
        for (cplx& c : out.coeffs)
            c = std::polar(std::abs(c), wrap_phase(std::arg(c) + noise(rng)));
        return out;
    }
}  // namespace tfpr
