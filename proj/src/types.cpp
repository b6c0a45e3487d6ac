#include "types.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace tfpr
{
    void Grid::validate() const
    {
        require(a > 0 && M > 0 && L > 0, ErrorKind::Dimension, "grid parameters must be positive");
        require(L % a == 0, ErrorKind::Dimension,
                "hop a=" + std::to_string(a) + " does not divide L=" + std::to_string(L));
        require(L % M == 0, ErrorKind::Dimension,
                "channels M=" + std::to_string(M) + " do not divide L=" + std::to_string(L));
        require(M >= a, ErrorKind::Dimension, "redundancy M/a must be at least 1");
    }

    Magnitude magnitude_of(const Spectrum& s)
    {
        Magnitude out(s.grid);
        for (std::size_t i = 0; i < s.coeffs.size(); ++i)
            out.values[i] = std::abs(s.coeffs[i]);
        return out;
    }

    Spectrum with_phase(const Magnitude& mags, std::span<const double> phase)
    {
        require(phase.size() == mags.values.size(), ErrorKind::Dimension, "phase/magnitude size mismatch");
        Spectrum out(mags.grid);
        for (std::size_t i = 0; i < phase.size(); ++i)
            out.coeffs[i] = std::polar(mags.values[i], phase[i]);
        return out;
    }

    std::vector<double> phase_of(const Spectrum& s)
    {
        std::vector<double> out(s.coeffs.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = wrap_phase(std::arg(s.coeffs[i]));
        return out;
    }

    namespace
    {
        // DC and (for even M) Nyquist appear once in the full spectrum and only through their real part.
        template <typename Fn>
        double weighted_sum(const Grid& g, Fn&& term)
        {
            const std::size_t bins = g.bins();
            const bool has_nyquist = g.M % 2 == 0;
            double acc = 0.0;
            for (std::size_t n = 0; n < g.frames(); ++n)
            {
                for (std::size_t m = 0; m < bins; ++m)
                {
                    const bool edge = m == 0 || (has_nyquist && m == bins - 1);
                    acc += term(n * bins + m, edge);
                }
            }
            return acc;
        }
    }  // namespace

    double full_norm(const Spectrum& s)
    {
        return std::sqrt(weighted_sum(s.grid, [&](std::size_t i, bool edge) {
            return edge ? s.coeffs[i].real() * s.coeffs[i].real() : 2.0 * std::norm(s.coeffs[i]);
        }));
    }

    double full_norm(const Magnitude& mg)
    {
        return std::sqrt(weighted_sum(mg.grid, [&](std::size_t i, bool edge) {
            const double v = mg.values[i] * mg.values[i];
            return edge ? v : 2.0 * v;
        }));
    }

    double full_distance(const Spectrum& x, const Spectrum& y)
    {
        require(x.grid == y.grid, ErrorKind::Dimension, "spectra live on different grids");
        return std::sqrt(weighted_sum(x.grid, [&](std::size_t i, bool edge) {
            const cplx d = x.coeffs[i] - y.coeffs[i];
            return edge ? d.real() * d.real() : 2.0 * std::norm(d);
        }));
    }

    const char* family_name(WindowFamily f) noexcept
    {
        switch (f)
        {
            case WindowFamily::Gaussian: return "gauss";
            case WindowFamily::Hann: return "hann";
            case WindowFamily::Blackman: return "blackman";
            case WindowFamily::Bartlett: return "bartlett";
            case WindowFamily::Custom: return "custom";
        }
        return "custom";
    }

    std::optional<WindowFamily> family_from_name(std::string_view name) noexcept
    {
        if (name == "gauss" || name == "gaussian")
            return WindowFamily::Gaussian;
        if (name == "hann")
            return WindowFamily::Hann;
        if (name == "blackman")
            return WindowFamily::Blackman;
        if (name == "bartlett")
            return WindowFamily::Bartlett;
        if (name == "custom")
            return WindowFamily::Custom;
        return std::nullopt;
    }

    double wrap_phase(double x) noexcept
    {
        double r = std::fmod(x + kPi, kTwoPi);
        if (r < 0.0)
            r += kTwoPi;
        r -= kPi;
        // fmod rounding can land exactly on +pi
        if (r >= kPi)
            r -= kTwoPi;
        return r;
    }
}  // namespace tfpr
