#include "error.hpp"
#include "windows.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace tfpr;

namespace
{
    // direct evaluation with a fixed, generous number of periodisation terms
    long double gaussian_reference(long double l, long double lambda, std::size_t L, unsigned rate, int K)
    {
        const long double pi = 3.14159265358979323846264338327950288L;
        long double acc = 0;
        for (int k = -K; k <= K; ++k)
        {
            const long double d = l - (long double)k * (long double)L;
            acc += std::exp(-pi * d * d / ((long double)rate * lambda));
        }
        return acc;
    }

    // ||g - g_lambda||^2 for a window supported near 0, valid while no periodisation term matters
    double fit_cost(const Window& g, double lambda, unsigned rate)
    {
        const std::size_t L = g.length();
        const double gamma = lambda * rate;
        const long reach = std::min<long>(long(L / 2), long(std::ceil(12.0 * std::sqrt(gamma))) + 1);
        double acc = 0.0;
        double outside = 0.0;
        for (std::size_t i = 0; i < L; ++i)
            outside += g.taps[i] * g.taps[i];
        for (long d = -reach; d <= reach; ++d)
        {
            const std::size_t i = std::size_t((long(L) + d) % long(L));
            const double gl = std::exp(-kPi * double(d) * double(d) / gamma);
            acc += (g.taps[i] - gl) * (g.taps[i] - gl);
            outside -= g.taps[i] * g.taps[i];
        }
        return acc + outside;
    }

    std::size_t support_size(const Window& w)
    {
        std::size_t count = 0;
        for (double t : w.taps)
            if (t > 1e-12)
                ++count;
        return count;
    }
}  // namespace

TEST_CASE("periodized Gaussian: narrow window has no periodisation", "[windows]")
{
    const std::size_t L = 4096;
    const double lambda = double(L) * L / 1000.0 / 22050.0;
    const Window g = periodized_gaussian(lambda, L, 22050);
    CHECK(g.taps[L / 2] < 1e-16 * g.taps[0]);
    CHECK(g.family == WindowFamily::Gaussian);
    REQUIRE(g.lambda.has_value());
    CHECK(*g.lambda == lambda);
}

TEST_CASE("periodized Gaussian is even and peaks at 0", "[windows]")
{
    for (double lambda : {0.01, 1.0, 30.0, 3000.0})
    {
        const Window g = periodized_gaussian(lambda, 2048, 22050);
        for (std::size_t l = 1; l < 2048; ++l)
            REQUIRE(g.taps[l] == g.taps[2048 - l]);
        for (double t : g.taps)
            REQUIRE(t <= g.taps[0] * (1.0 + 1e-14));
    }
}

TEST_CASE("periodized Gaussian matches high-precision summation", "[windows][oracle]")
{
    const std::size_t L = 122880;
    const Window g = periodized_gaussian(2.32, L, 22050);
    for (std::size_t l : {0u, 1u, 1000u})
    {
        const double ref = double(gaussian_reference((long double)l, 2.32L, L, 22050, 50));
        CHECK(g.taps[l] == Catch::Approx(ref).epsilon(1e-14));
    }
    // heavy periodisation
    const Window wide = periodized_gaussian(5e4, 4096, 22050);
    for (std::size_t l : {0u, 7u, 2048u})
    {
        const double ref = double(gaussian_reference((long double)l, 5e4L, 4096, 22050, 50));
        CHECK(wide.taps[l] == Catch::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("periodized Gaussian is positive where representable", "[windows][property]")
{
    for (double lambda : {5.0, 50.0, 500.0})
    {
        const Window g = periodized_gaussian(lambda, 4096, 22050);
        for (double t : g.taps)
            REQUIRE(t > 0.0);
    }
}

TEST_CASE("periodized Gaussian rejects lambda needing too many terms", "[windows]")
{
    try
    {
        (void)periodized_gaussian(1e9, 64, 22050);
        FAIL("expected an error");
    }
    catch (const Error& e)
    {
        CHECK(std::string(e.what()).find("K=") != std::string::npos);
    }
    CHECK_THROWS_AS(periodized_gaussian(-1.0, 64, 22050), Error);
}

TEST_CASE("grid matched lambda", "[windows]")
{
    CHECK(grid_matched_lambda(Grid{160, 320, 122880}, 22050).value == Catch::Approx(2.3220).epsilon(1e-4));
    CHECK(grid_matched_lambda(Grid{192, 384, 122880}, 22050).value == Catch::Approx(3.3437).epsilon(1e-4));
    CHECK(grid_matched_lambda(Grid{22050, 22050, 22050}, 22050).value == 22050.0);
    CHECK(grid_matched_lambda(Grid{128, 2048, 122880}, 22050).value == Catch::Approx(262144.0 / 22050.0).epsilon(1e-15));
    CHECK(grid_matched_lambda(Grid{1, 1, 1}, 22050).source == LambdaSource::FromGrid);
}

TEST_CASE("named windows", "[windows]")
{
    SECTION("Hann, support 4")
    {
        const Window w = named_window(WindowFamily::Hann, 4, 64);
        CHECK(w.taps[63] == Catch::Approx(0.5));
        CHECK(w.taps[0] == 1.0);
        CHECK(w.taps[1] == Catch::Approx(0.5));
        CHECK(w.taps[62] == Catch::Approx(0.0).margin(1e-16));
        CHECK(w.taps[2] == 0.0);
    }
    SECTION("Bartlett, odd support is an exact triangle")
    {
        const std::size_t k = 5;
        const Window w = named_window(WindowFamily::Bartlett, 2 * k + 1, 64);
        for (int j = -int(k); j <= int(k); ++j)
            CHECK(w.taps[std::size_t((64 + j) % 64)] == Catch::Approx(1.0 - std::abs(j) / double(k)).margin(1e-15));
        CHECK(w.taps[k + 1] == 0.0);
    }
    SECTION("Blackman taps sum to support times a0")
    {
        const Window w = named_window(WindowFamily::Blackman, 64, 256);
        double sum = 0.0;
        for (double t : w.taps)
            sum += t;
        CHECK(sum == Catch::Approx(64 * 0.42).epsilon(1e-9));
    }
    SECTION("peak normalised")
    {
        for (WindowFamily f : {WindowFamily::Hann, WindowFamily::Blackman, WindowFamily::Bartlett})
            for (std::size_t n : {3u, 32u, 33u, 512u})
            {
                const Window w = named_window(f, n, 1024);
                double peak = 0.0;
                for (double t : w.taps)
                    peak = std::max(peak, t);
                CHECK(peak == 1.0);
                CHECK(w.taps[0] == 1.0);
            }
    }
    SECTION("support beyond L is rejected")
    {
        CHECK_THROWS_AS(named_window(WindowFamily::Hann, 65, 64), Error);
        CHECK_THROWS_AS(named_window(WindowFamily::Gaussian, 8, 64), Error);
    }
}

TEST_CASE("fit_lambda recovers the lambda of a Gaussian", "[windows][fit][property]")
{
    const std::size_t L = 16384;
    for (int i = 0; i < 20; ++i)
    {
        const double lambda = std::pow(10.0, -2.0 + 5.0 * i / 19.0);
        const LambdaSpec fit = fit_lambda(periodized_gaussian(lambda, L, 22050), 22050);
        INFO("lambda=" << lambda);
        CHECK(fit.value == Catch::Approx(lambda).epsilon(1e-4));
        CHECK(fit.source == LambdaSource::FittedFromWindow);
    }
}

TEST_CASE("fit_lambda normalises the peak first", "[windows][fit]")
{
    Window g = periodized_gaussian(3.0, 8192, 22050);
    const double unscaled = fit_lambda(g, 22050).value;
    for (double& t : g.taps)
        t *= 7.5;
    CHECK(fit_lambda(g, 22050).value == Catch::Approx(unscaled).epsilon(1e-12));
}

TEST_CASE("fit_lambda of a Hann window agrees with a dense grid search", "[windows][fit][oracle]")
{
    const std::size_t L = 122880;
    const Window hann = named_window(WindowFamily::Hann, 512, L);
    const double fitted = fit_lambda(hann, 22050).value;

    const int points = 10000;
    const double lo = std::log(1e-3), hi = std::log(1e3);
    double best = 0.0, best_cost = 1e300;
    for (int i = 0; i < points; ++i)
    {
        const double lambda = std::exp(lo + (hi - lo) * i / (points - 1));
        const double c = fit_cost(hann, lambda, 22050);
        if (c < best_cost)
        {
            best_cost = c;
            best = lambda;
        }
    }
    const double step = std::exp((hi - lo) / (points - 1)) - 1.0;
    CHECK(std::abs(fitted - best) / best <= step);
}

TEST_CASE("fit_lambda rejects degenerate windows", "[windows][fit]")
{
    Window w;
    w.taps.assign(256, 0.0);
    w.taps[0] = 2.0;
    CHECK_THROWS_AS(fit_lambda(w, 22050), Error);
}

TEST_CASE("window_for_lambda", "[windows][fit]")
{
    const std::size_t L = 16384;
    SECTION("Gaussian family is the periodized Gaussian")
    {
        const Window a = window_for_lambda(WindowFamily::Gaussian, 4.2, 22050, L);
        const Window b = periodized_gaussian(4.2, L, 22050);
        CHECK(a.taps == b.taps);
    }
    SECTION("support minimises the distance to g_lambda")
    {
        for (WindowFamily f : {WindowFamily::Hann, WindowFamily::Blackman, WindowFamily::Bartlett})
            for (std::size_t support : {32u, 128u, 512u, 2048u})
            {
                const double lambda = fit_lambda(named_window(f, support, L), 22050).value;
                const Window w = window_for_lambda(f, lambda, 22050, L);
                const Window g = periodized_gaussian(lambda, L, 22050);

                // exhaustive oracle over a wide neighbourhood
                std::size_t best = 0;
                double best_cost = 1e300;
                for (std::size_t s = std::max<std::size_t>(3, support / 2); s <= std::min(L - 1, support * 2); ++s)
                {
                    const Window c = named_window(f, s, L);
                    double d = 0.0;
                    for (std::size_t i = 0; i < L; ++i)
                        d += (c.taps[i] - g.taps[i]) * (c.taps[i] - g.taps[i]);
                    if (d < best_cost)
                    {
                        best_cost = d;
                        best = s;
                    }
                }
                INFO(family_name(f) << " support " << support << " lambda " << lambda << " oracle " << best);
                CHECK(w.taps == named_window(f, best, L).taps);
                CHECK_FALSE(w.clamped);
                // fit_lambda and the support search minimise the same distance over different
                // variables, so the round trip is only exact to within the flatness of the cost
                const double tol = support <= 128 ? 1.0 : 0.01 * double(support);
                CHECK(std::abs(double(support_size(w)) - double(support_size(named_window(f, support, L)))) <= tol);
            }
    }
    SECTION("Hann 512 at full length round trips within one tap")
    {
        const std::size_t N = 122880;
        const double lambda = fit_lambda(named_window(WindowFamily::Hann, 512, N), 22050).value;
        const Window w = window_for_lambda(WindowFamily::Hann, lambda, 22050, N);
        CHECK(std::abs(long(support_size(w)) - 511) <= 1);
    }
    SECTION("tiny lambda clamps the support")
    {
        const Window w = window_for_lambda(WindowFamily::Bartlett, 1e-6, 22050, L);
        CHECK(w.clamped);
        CHECK(named_window(WindowFamily::Bartlett, 3, L).taps == w.taps);
    }
}
