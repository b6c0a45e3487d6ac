#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tfpr
{
    using cplx = std::complex<double>;

    inline constexpr double kPi = 3.14159265358979323846;
    inline constexpr double kTwoPi = 2.0 * kPi;

    /// A finite real signal. All indexing into it is understood modulo its length.
    struct Signal
    {
        std::vector<double> samples;
        unsigned sample_rate = 22050;

        std::size_t length() const noexcept { return samples.size(); }
    };

    /// Transform lattice: hop a, channels M, signal length L.
    struct Grid
    {
        std::size_t a = 0;
        std::size_t M = 0;
        std::size_t L = 0;

        std::size_t frames() const noexcept { return a ? L / a : 0; }
        std::size_t bins() const noexcept { return M / 2 + 1; }
        double redundancy() const noexcept { return a ? double(M) / double(a) : 0.0; }

        /// Throws unless a | L, M | L, M >= a > 0.
        void validate() const;

        bool operator==(const Grid&) const = default;
    };

    /// Half-spectrum STFT coefficients, frame-major: at(m, n) = coeffs[n * bins + m].
    struct Spectrum
    {
        Grid grid;
        std::vector<cplx> coeffs;

        Spectrum() = default;
        explicit Spectrum(const Grid& g) : grid(g), coeffs(g.bins() * g.frames()) {}

        cplx& at(std::size_t m, std::size_t n) { return coeffs[n * grid.bins() + m]; }
        const cplx& at(std::size_t m, std::size_t n) const { return coeffs[n * grid.bins() + m]; }
    };

    /// Magnitude-only spectrogram with the same layout as Spectrum.
    struct Magnitude
    {
        Grid grid;
        std::vector<double> values;

        Magnitude() = default;
        explicit Magnitude(const Grid& g) : grid(g), values(g.bins() * g.frames()) {}
        Magnitude(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {}

        double& at(std::size_t m, std::size_t n) { return values[n * grid.bins() + m]; }
        double at(std::size_t m, std::size_t n) const { return values[n * grid.bins() + m]; }
    };

    enum class WindowFamily
    {
        Gaussian,
        Hann,
        Blackman,
        Bartlett,
        Custom,
    };

    enum class WindowRole
    {
        Analysis,
        SynthesisDual,
    };

    /// Length-L window, centred at index 0 (negative offsets wrap to the end).
    struct Window
    {
        std::vector<double> taps;
        WindowFamily family = WindowFamily::Custom;
        std::optional<double> lambda;
        WindowRole role = WindowRole::Analysis;
        /// Set when a support search hit its lower bound.
        bool clamped = false;

        std::size_t length() const noexcept { return taps.size(); }
    };

    Magnitude magnitude_of(const Spectrum& s);
    Spectrum with_phase(const Magnitude& mags, std::span<const double> phase);
    std::vector<double> phase_of(const Spectrum& s);

    /// Euclidean norm over the conjugate-symmetric full spectrum that a half spectrum represents.
    double full_norm(const Spectrum& s);
    double full_norm(const Magnitude& m);
    double full_distance(const Spectrum& x, const Spectrum& y);

    const char* family_name(WindowFamily f) noexcept;
    std::optional<WindowFamily> family_from_name(std::string_view name) noexcept;

    /// Wraps into [-pi, pi).
    double wrap_phase(double x) noexcept;
}  // namespace tfpr
