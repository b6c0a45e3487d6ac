#pragma once

#include "types.hpp"

#include <cstddef>
#include <memory>

namespace tfpr::fft
{
    /// Real FFT of a fixed size. Instances share cached FFTW plans and own their
    /// work buffers, so one instance per thread is safe.
    class RealFft
    {
    public:
        explicit RealFft(std::size_t n);
        ~RealFft();
        RealFft(RealFft&&) noexcept;
        RealFft& operator=(RealFft&&) noexcept;
        RealFft(const RealFft&) = delete;
        RealFft& operator=(const RealFft&) = delete;

        std::size_t size() const noexcept { return m_n; }

        /// Time-domain work buffer of length size().
        double* real() noexcept;
        /// Frequency-domain work buffer of length size()/2 + 1.
        cplx* spectrum() noexcept;

        /// spectrum()[k] = sum_j real()[j] e^{-2 pi i jk/n}
        void forward();
        /// real()[j] = sum over the Hermitian full spectrum of spectrum() e^{+2 pi i jk/n}, unnormalised.
        /// Imaginary parts of DC and Nyquist are ignored.
        void inverse();

    private:
        struct Impl;
        std::size_t m_n;
        std::unique_ptr<Impl> m_impl;
    };

    /// Unnormalised complex DFT (sign -1 forward, +1 backward), out of place.
    void complex_dft(std::span<const cplx> in, std::span<cplx> out, bool inverse);
}  // namespace tfpr::fft
