#pragma once

#include "types.hpp"

#include <cstddef>
#include <vector>

namespace tfpr
{
    /// Taps whose magnitude is at or below this fraction of the peak are treated as zero
    /// by the transform engine. Keeps long periodised Gaussians from costing L per frame.
    inline constexpr double kSupportThreshold = 1e-18;

    /// Contiguous (cyclic) support of a centred window: offsets -left..right.
    struct Support
    {
        std::size_t left = 0;
        std::size_t right = 0;
        /// taps[k] = window[(k - left) mod L]
        std::vector<double> taps;

        std::size_t width() const noexcept { return left + right + 1; }
    };

    Support support_of(const Window& w);

    /// S[m,n] = sum_l s[l] g[l - na] e^{-2 pi i m l / M}, half spectrum m < M/2 + 1.
    Spectrum stft(const Signal& s, const Window& g, const Grid& grid);

    /// s[l] = Re sum_n sum_m S[m,n] g~[l - na] e^{2 pi i m l / M} over the conjugate-symmetric
    /// expansion of the half spectrum.
    Signal istft(const Spectrum& coeffs, const Window& synthesis, unsigned sample_rate = 22050);

    /// Eigenvalues of the Gabor frame operator (one block-circulant spectrum per residue r < a).
    std::vector<double> frame_spectrum(const Window& g, const Grid& grid);

    /// g~ = S^{-1} g. Throws ErrorKind::NotAFrame when the frame operator is (numerically) singular.
    Window canonical_dual(const Window& g, const Grid& grid);

    /// S^{-1/2} g; the resulting system is a Parseval frame.
    Window canonical_tight(const Window& g, const Grid& grid);

    /// stft(istft(X, g~), g): orthogonal projection onto consistent coefficients.
    Spectrum project_consistent(const Spectrum& coeffs, const Window& g, const Window& dual);
}  // namespace tfpr

namespace tfpr
{
    /// Analysis window, its canonical dual and the lattice they live on.
    struct Frame
    {
        Grid grid;
        Window analysis;
        Window dual;
        unsigned sample_rate = 22050;
    };

    Frame make_frame(const Window& analysis, const Grid& grid, unsigned sample_rate);
}  // namespace tfpr
