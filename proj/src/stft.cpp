#include "stft.hpp"

#include "error.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tfpr
{
    namespace
    {
        void check_finite(std::span<const double> v, const char* what)
        {
            for (double x : v)
                require(std::isfinite(x), ErrorKind::Numerical, std::string(what) + " contains non-finite values");
        }

        std::size_t wrap_index(std::ptrdiff_t i, std::size_t n)
        {
            const auto sn = static_cast<std::ptrdiff_t>(n);
            std::ptrdiff_t r = i % sn;
            return static_cast<std::size_t>(r < 0 ? r + sn : r);
        }
    }  // namespace

    Support support_of(const Window& w)
    {
        const std::size_t L = w.length();
        require(L > 0, ErrorKind::Dimension, "empty window");
        double peak = 0.0;
        for (double t : w.taps)
            peak = std::max(peak, std::abs(t));
        require(peak > 0.0, ErrorKind::InvalidArgument, "window is identically zero");
        const double thr = peak * kSupportThreshold;

        Support s;
        const std::size_t half = L / 2;
        for (std::size_t t = 0; t <= half; ++t)
            if (std::abs(w.taps[t]) > thr)
                s.right = t;
        for (std::size_t t = 1; t < L - half; ++t)
            if (std::abs(w.taps[L - t]) > thr)
                s.left = t;
        if (s.left + s.right + 1 > L)
            s.left = L - 1 - s.right;

        s.taps.resize(s.width());
        for (std::size_t k = 0; k < s.taps.size(); ++k)
            s.taps[k] = w.taps[wrap_index(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(s.left), L)];
        return s;
    }

    Spectrum stft(const Signal& s, const Window& g, const Grid& grid)
    {
        grid.validate();
        require(s.length() == grid.L, ErrorKind::Dimension, "signal length does not match grid L");
        require(g.length() == grid.L, ErrorKind::Dimension, "window length does not match grid L");
        check_finite(s.samples, "signal");
        check_finite(g.taps, "window");

        const std::size_t L = grid.L, M = grid.M, a = grid.a, N = grid.frames(), bins = grid.bins();
        const Support sup = support_of(g);
        fft::RealFft fft(M);
        double* buf = fft.real();
        Spectrum out(grid);

        for (std::size_t n = 0; n < N; ++n)
        {
            std::fill(buf, buf + M, 0.0);
            // l runs over na - left .. na + right; the DFT kernel only depends on l mod M.
            std::size_t li = wrap_index(static_cast<std::ptrdiff_t>(n * a) - static_cast<std::ptrdiff_t>(sup.left), L);
            std::size_t mi = li % M;
            for (double w : sup.taps)
            {
                buf[mi] += s.samples[li] * w;
                if (++li == L)
                    li = 0;
                if (++mi == M)
                    mi = 0;
            }
            fft.forward();
            std::copy(fft.spectrum(), fft.spectrum() + bins, out.coeffs.begin() + static_cast<std::ptrdiff_t>(n * bins));
        }
        return out;
    }

    Signal istft(const Spectrum& coeffs, const Window& synthesis, unsigned sample_rate)
    {
        const Grid& grid = coeffs.grid;
        grid.validate();
        require(synthesis.role == WindowRole::SynthesisDual, ErrorKind::InvalidArgument,
                "istft expects a synthesis (dual) window");
        require(synthesis.length() == grid.L, ErrorKind::Dimension, "synthesis window length does not match grid L");
        require(coeffs.coeffs.size() == grid.bins() * grid.frames(), ErrorKind::Dimension,
                "coefficient matrix does not match its grid");
        for (const cplx& c : coeffs.coeffs)
            require(std::isfinite(c.real()) && std::isfinite(c.imag()), ErrorKind::Numerical,
                    "coefficients contain non-finite values");

        const std::size_t L = grid.L, M = grid.M, a = grid.a, N = grid.frames(), bins = grid.bins();
        const Support sup = support_of(synthesis);
        fft::RealFft fft(M);
        Signal out{std::vector<double>(L, 0.0), sample_rate};

        for (std::size_t n = 0; n < N; ++n)
        {
            std::copy(coeffs.coeffs.begin() + static_cast<std::ptrdiff_t>(n * bins),
                      coeffs.coeffs.begin() + static_cast<std::ptrdiff_t>((n + 1) * bins), fft.spectrum());
            fft.inverse();
            const double* x = fft.real();
            std::size_t li = wrap_index(static_cast<std::ptrdiff_t>(n * a) - static_cast<std::ptrdiff_t>(sup.left), L);
            std::size_t mi = li % M;
            for (double w : sup.taps)
            {
                out.samples[li] += w * x[mi];
                if (++li == L)
                    li = 0;
                if (++mi == M)
                    mi = 0;
            }
        }
        return out;
    }

    namespace
    {
        // The frame operator S f[l] = M sum_k f[l + kM] G_k[l] with G_k[l] = sum_n g[l - na] g[l + kM - na].
        // G_k is a-periodic in l and M = Da, so S splits into M blocks of size Q = L/M (one per
        // residue l mod M), each circulant with first row M * G_k[r mod a]. Blocks are diagonalised
        // by a length-Q DFT.
        struct FrameBlocks
        {
            std::size_t Q = 0;
            std::vector<double> eff;
            // eig[r * Q + j]: j-th eigenvalue of the block for residue r < a
            std::vector<double> eig;
        };

        FrameBlocks frame_blocks(const Window& g, const Grid& grid)
        {
            grid.validate();
            require(g.length() == grid.L, ErrorKind::Dimension, "window length does not match grid L");
            check_finite(g.taps, "window");
            const std::size_t L = grid.L, M = grid.M, a = grid.a, N = grid.frames();
            const std::size_t Q = L / M;
            const Support sup = support_of(g);

            // zero sub-threshold taps so the dual matches what stft/istft actually apply
            std::vector<double> eff(L, 0.0);
            for (std::size_t k = 0; k < sup.width(); ++k)
                eff[wrap_index(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(sup.left), L)] = sup.taps[k];

            FrameBlocks fb;
            fb.Q = Q;
            fb.eff = eff;
            fb.eig.assign(a * Q, 0.0);
            std::vector<cplx> row(Q), spec(Q);
            for (std::size_t r = 0; r < a; ++r)
            {
                std::fill(row.begin(), row.end(), cplx{});
                for (std::size_t n = 0; n < N; ++n)
                {
                    const std::size_t base = wrap_index(static_cast<std::ptrdiff_t>(r) - static_cast<std::ptrdiff_t>(n * a), L);
                    const double x = eff[base];
                    if (x == 0.0)
                        continue;
                    std::size_t idx = base;
                    for (std::size_t k = 0; k < Q; ++k)
                    {
                        row[k] += x * eff[idx];
                        idx += M;
                        if (idx >= L)
                            idx -= L;
                    }
                }
                for (auto& c : row)
                    c *= double(M);
                fft::complex_dft(row, spec, false);
                for (std::size_t j = 0; j < Q; ++j)
                    fb.eig[r * Q + j] = spec[j].real();
            }
            return fb;
        }

        void check_frame(const FrameBlocks& fb, const Grid& grid)
        {
            const auto [lo, hi] = std::minmax_element(fb.eig.begin(), fb.eig.end());
            if (!(*hi > 0.0) || !(*lo > 1e-12 * *hi))
                fail(ErrorKind::NotAFrame, "not a frame at (a=" + std::to_string(grid.a) + ", M=" +
                                               std::to_string(grid.M) + "): frame operator eigenvalue ratio " +
                                               std::to_string(*hi > 0.0 ? *lo / *hi : 0.0));
        }

        constexpr double kDualFloor = 1e-14;

        template <typename Fn>
        Window apply_inverse_power(const Window& g, const Grid& grid, Fn&& scale)
        {
            const FrameBlocks fb = frame_blocks(g, grid);
            check_frame(fb, grid);
            const std::size_t M = grid.M, a = grid.a, Q = fb.Q;
            Window out = g;
            out.role = WindowRole::SynthesisDual;
            std::vector<cplx> v(Q), spec(Q);
            for (std::size_t r = 0; r < M; ++r)
            {
                const double* eig = &fb.eig[(r % a) * Q];
                for (std::size_t p = 0; p < Q; ++p)
                    v[p] = fb.eff[r + p * M];
                fft::complex_dft(v, spec, false);
                for (std::size_t j = 0; j < Q; ++j)
                    spec[j] *= scale(eig[j]) / double(Q);
                fft::complex_dft(spec, v, true);
                for (std::size_t p = 0; p < Q; ++p)
                    out.taps[r + p * M] = v[p].real();
            }
            // The block solve leaves round-off (~1e-17 of the peak) on every tap; left alone it
            // makes the dual's support all of L and synthesis O(N L).
            double peak = 0.0;
            for (double t : out.taps)
                peak = std::max(peak, std::abs(t));
            for (double& t : out.taps)
                if (std::abs(t) <= kDualFloor * peak)
                    t = 0.0;
            return out;
        }
    }  // namespace

    std::vector<double> frame_spectrum(const Window& g, const Grid& grid)
    {
        return frame_blocks(g, grid).eig;
    }

    Window canonical_dual(const Window& g, const Grid& grid)
    {
        return apply_inverse_power(g, grid, [](double e) { return 1.0 / e; });
    }

    Window canonical_tight(const Window& g, const Grid& grid)
    {
        Window t = apply_inverse_power(g, grid, [](double e) { return 1.0 / std::sqrt(e); });
        t.role = WindowRole::Analysis;
        return t;
    }

    Spectrum project_consistent(const Spectrum& coeffs, const Window& g, const Window& dual)
    {
        return stft(istft(coeffs, dual), g, coeffs.grid);
    }
}  // namespace tfpr

namespace tfpr
{
    Frame make_frame(const Window& analysis, const Grid& grid, unsigned sample_rate)
    {
        Frame f;
        f.grid = grid;
        f.analysis = analysis;
        f.analysis.role = WindowRole::Analysis;
        f.dual = canonical_dual(analysis, grid);
        f.sample_rate = sample_rate;
        return f;
    }
}  // namespace tfpr
