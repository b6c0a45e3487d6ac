#include "windows.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tfpr
{
    namespace
    {
        // -ln(1e-16)
        constexpr double kTailExponent = 36.841361487904734;
        constexpr std::size_t kMaxTerms = 100;
        constexpr std::size_t kMinSupport = 3;

        double required_terms(double gamma, std::size_t L)
        {
            // centred l lies in (-L/2, L/2], so term k sits at least (|k| - 1/2) L away
            const double reach = std::sqrt(kTailExponent * gamma / kPi) / double(L) - 0.5;
            return std::max(0.0, std::ceil(reach));
        }

        double max_fittable_lambda(std::size_t L, unsigned rate)
        {
            const double span = (double(kMaxTerms) + 0.5) * double(L);
            return kPi * span * span / kTailExponent / double(rate);
        }

        double squared_distance(std::span<const double> x, std::span<const double> y)
        {
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                acc += (x[i] - y[i]) * (x[i] - y[i]);
            return acc;
        }

        double centred_offset_min(std::size_t support) { return -double(support / 2); }
    }  // namespace

    std::size_t gaussian_terms(double lambda, std::size_t L, unsigned sample_rate)
    {
        require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::InvalidArgument, "lambda must be positive");
        require(L > 0 && sample_rate > 0, ErrorKind::InvalidArgument, "L and sample rate must be positive");
        const double k = required_terms(lambda * sample_rate, L);
        if (k > double(kMaxTerms))
            fail(ErrorKind::InvalidArgument, "lambda too large for L: periodisation needs K=" +
                                                 std::to_string(static_cast<long long>(k)) + " > " +
                                                 std::to_string(kMaxTerms) + " terms");
        return static_cast<std::size_t>(k);
    }

    Window periodized_gaussian(double lambda, std::size_t L, unsigned sample_rate)
    {
        const std::size_t K = gaussian_terms(lambda, L, sample_rate);
        const double gamma = lambda * sample_rate;
        Window w;
        w.taps.assign(L, 0.0);
        w.family = WindowFamily::Gaussian;
        w.lambda = lambda;
        const double dL = double(L);
        for (std::size_t l = 0; l <= L / 2; ++l)
        {
            const double d = double(l);
            double acc = 0.0;
            for (std::size_t k = K; k >= 1; --k)
            {
                const double lo = d + double(k) * dL, hi = d - double(k) * dL;
                acc += std::exp(-kPi * lo * lo / gamma) + std::exp(-kPi * hi * hi / gamma);
            }
            acc += std::exp(-kPi * d * d / gamma);
            w.taps[l] = acc;
            if (l > 0)
                w.taps[L - l] = acc;
        }
        return w;
    }

    LambdaSpec grid_matched_lambda(const Grid& grid, unsigned sample_rate)
    {
        return {double(grid.a) * double(grid.M) / double(sample_rate), LambdaSource::FromGrid};
    }

    Window named_window(WindowFamily family, std::size_t support, std::size_t L)
    {
        require(support > 0, ErrorKind::InvalidArgument, "window support must be positive");
        require(support <= L, ErrorKind::InvalidArgument,
                "support " + std::to_string(support) + " exceeds signal length " + std::to_string(L));
        Window w;
        w.taps.assign(L, 0.0);
        w.family = family;
        const double N = double(support);
        const double t0 = centred_offset_min(support);
        for (std::size_t j = 0; j < support; ++j)
        {
            const double t = t0 + double(j);
            double v = 0.0;
            switch (family)
            {
                case WindowFamily::Hann:
                    v = 0.5 + 0.5 * std::cos(kTwoPi * t / N);
                    break;
                case WindowFamily::Blackman:
                    v = 0.42 + 0.5 * std::cos(kTwoPi * t / N) + 0.08 * std::cos(2.0 * kTwoPi * t / N);
                    break;
                case WindowFamily::Bartlett:
                    if (support % 2 == 0)
                        v = 1.0 - 2.0 * std::abs(t) / N;
                    else
                        v = support == 1 ? 1.0 : 1.0 - std::abs(t) / double(support / 2);
                    break;
                default:
                    fail(ErrorKind::InvalidArgument, std::string("no closed form for window family ") + family_name(family));
            }
            if (t == 0.0)
                v = 1.0;  // exact peak; Blackman's coefficients do not sum to 1 in binary
            const auto idx = t < 0 ? L - static_cast<std::size_t>(-t) : static_cast<std::size_t>(t);
            w.taps[idx] = v;
        }
        return w;
    }

    LambdaSpec fit_lambda(const Window& w, unsigned sample_rate)
    {
        const std::size_t L = w.length();
        require(L > 0, ErrorKind::Dimension, "empty window");
        double peak = 0.0;
        for (double t : w.taps)
        {
            require(std::isfinite(t), ErrorKind::Numerical, "window contains non-finite taps");
            peak = std::max(peak, std::abs(t));
        }
        require(peak > 0.0, ErrorKind::InvalidArgument, "window is identically zero");
        std::vector<double> g(L);
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < L; ++i)
        {
            g[i] = w.taps[i] / peak;
            if (std::abs(g[i]) > 1e-12)
                ++nonzero;
        }
        require(nonzero > 1, ErrorKind::InvalidArgument,
                "degenerate window (single nonzero tap): fit is unbounded below as lambda -> 0");

        auto cost = [&](double log_lambda) {
            const Window gl = periodized_gaussian(std::exp(log_lambda), L, sample_rate);
            return squared_distance(g, gl.taps);
        };

        double lo = std::log(1e-6);
        double hi = std::log(std::min(1e6, max_fittable_lambda(L, sample_rate)));
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
        double f1 = cost(x1), f2 = cost(x2);
        while (hi - lo > 1e-7)
        {
            if (f1 <= f2)
            {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = cost(x1);
            }
            else
            {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = cost(x2);
            }
        }
        return {std::exp(0.5 * (lo + hi)), LambdaSource::FittedFromWindow};
    }

    Window window_for_lambda(WindowFamily family, double lambda, unsigned sample_rate, std::size_t L)
    {
        if (family == WindowFamily::Gaussian)
            return periodized_gaussian(lambda, L, sample_rate);
        require(family != WindowFamily::Custom, ErrorKind::InvalidArgument, "custom windows cannot be fitted to lambda");
        require(L >= kMinSupport, ErrorKind::InvalidArgument, "signal too short for a windowed fit");

        const Window target = periodized_gaussian(lambda, L, sample_rate);
        auto cost = [&](std::size_t support) {
            return squared_distance(named_window(family, support, L).taps, target.taps);
        };

        std::size_t lo = kMinSupport, hi = L;
        while (hi - lo > 2)
        {
            const std::size_t m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (cost(m1) <= cost(m2))
                hi = m2;
            else
                lo = m1;
        }
        std::size_t best = lo;
        double best_cost = cost(lo);
        const std::size_t scan_lo = lo > kMinSupport + 2 ? lo - 2 : kMinSupport;
        const std::size_t scan_hi = std::min(L, hi + 2);
        for (std::size_t s = scan_lo; s <= scan_hi; ++s)
        {
            const double c = cost(s);
            if (c < best_cost)
            {
                best_cost = c;
                best = s;
            }
        }
        require(best < L, ErrorKind::InvalidArgument,
                "lambda " + std::to_string(lambda) + " implies a window support beyond L=" + std::to_string(L));

        Window w = named_window(family, best, L);
        w.lambda = lambda;
        w.clamped = best == kMinSupport;
        return w;
    }
}  // namespace tfpr
