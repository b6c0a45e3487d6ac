#pragma once

// Test-only reference implementations. These evaluate the defining sums directly and share no
// code path with the library's transform engine.

#include "types.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle
{
    using tfpr::cplx;

    inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> d(0.0, 1.0);
        std::vector<double> v(n);
        for (auto& x : v)
            x = d(rng);
        return v;
    }

    inline tfpr::Signal random_signal(std::size_t L, std::uint64_t seed, unsigned rate = 22050)
    {
        return {random_vector(L, seed), rate};
    }

    /// Full M x N matrix (m fastest) of S[m,n] = sum_l s[l] g[l - na] e^{-2 pi i m l / M}.
    inline std::vector<cplx> stft_full(const std::vector<double>& s, const std::vector<double>& g, std::size_t a,
                                       std::size_t M)
    {
        const std::size_t L = s.size(), N = L / a;
        std::vector<cplx> out(M * N);
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t m = 0; m < M; ++m)
            {
                long double re = 0, im = 0;
                for (std::size_t l = 0; l < L; ++l)
                {
                    const long double w = s[l] * g[(l + L - (n * a) % L) % L];
                    const long double ang = -2.0L * 3.14159265358979323846264338327950288L *
                                            (long double)((m * l) % M) / (long double)M;
                    re += w * std::cos(ang);
                    im += w * std::sin(ang);
                }
                out[n * M + m] = cplx(double(re), double(im));
            }
        return out;
    }

    /// s[l] = sum_n sum_m S[m,n] g~[l - na] e^{2 pi i m l / M}, complex result.
    inline std::vector<cplx> istft_full(const std::vector<cplx>& S, const std::vector<double>& gd, std::size_t a,
                                        std::size_t M, std::size_t L)
    {
        const std::size_t N = L / a;
        std::vector<cplx> out(L);
        for (std::size_t l = 0; l < L; ++l)
        {
            long double re = 0, im = 0;
            for (std::size_t n = 0; n < N; ++n)
            {
                const long double w = gd[(l + L - (n * a) % L) % L];
                if (w == 0)
                    continue;
                for (std::size_t m = 0; m < M; ++m)
                {
                    const long double ang = 2.0L * 3.14159265358979323846264338327950288L *
                                            (long double)((m * l) % M) / (long double)M;
                    const cplx c = S[n * M + m];
                    re += w * (c.real() * std::cos(ang) - c.imag() * std::sin(ang));
                    im += w * (c.real() * std::sin(ang) + c.imag() * std::cos(ang));
                }
            }
            out[l] = cplx(double(re), double(im));
        }
        return out;
    }

    /// Conjugate-symmetric expansion of a half spectrum (DC/Nyquist keep their real part).
    inline std::vector<cplx> expand(const tfpr::Spectrum& half)
    {
        const std::size_t M = half.grid.M, N = half.grid.frames(), bins = half.grid.bins();
        std::vector<cplx> full(M * N);
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t m = 0; m < M; ++m)
            {
                if (m < bins)
                    full[n * M + m] = half.at(m, n);
                else
                    full[n * M + m] = std::conj(half.at(M - m, n));
            }
        for (std::size_t n = 0; n < N; ++n)
        {
            full[n * M] = full[n * M].real();
            if (M % 2 == 0)
                full[n * M + M / 2] = full[n * M + M / 2].real();
        }
        return full;
    }

    inline double max_abs(const std::vector<double>& v)
    {
        double r = 0;
        for (double x : v)
            r = std::max(r, std::abs(x));
        return r;
    }

    inline double rel_l2(const std::vector<double>& x, const std::vector<double>& ref)
    {
        long double num = 0, den = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            num += (long double)(x[i] - ref[i]) * (x[i] - ref[i]);
            den += (long double)ref[i] * ref[i];
        }
        return double(std::sqrt(num / den));
    }
}  // namespace oracle
