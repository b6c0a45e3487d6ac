#include "error.hpp"
#include "phase_retrieval.hpp"

#include <algorithm>
#include <limits>
#include <chrono>
#include <cmath>
#include <queue>
#include <random>

namespace tfpr
{
    namespace
    {
        constexpr double kLogFloor = 1e-10;

        struct HeapEntry
        {
            double mag;
            std::size_t n;
            std::size_t m;
        };

        // priority: larger magnitude first, ties by (n, m) ascending
        struct HeapOrder
        {
            bool operator()(const HeapEntry& x, const HeapEntry& y) const
            {
                if (x.mag != y.mag)
                    return x.mag < y.mag;
                if (x.n != y.n)
                    return x.n > y.n;
                return x.m > y.m;
            }
        };

        double uniform_phase(std::mt19937_64& rng)
        {
            const double u = double(rng() >> 11) * 0x1.0p-53;
            return -kPi + kTwoPi * u;
        }
    }  // namespace

    PhaseGradients pghi_gradients(const Magnitude& mags, double lambda, unsigned sample_rate)
    {
        const Grid& g = mags.grid;
        const std::size_t bins = g.bins(), N = g.frames();
        require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
        double peak = 0.0;
        for (double v : mags.values)
            peak = std::max(peak, v);

        std::vector<double> logm(mags.values.size());
        const double floor = std::max(kLogFloor * peak, std::numeric_limits<double>::min());
        for (std::size_t i = 0; i < logm.size(); ++i)
            logm[i] = std::log(std::max(mags.values[i], floor));

        auto idx = [bins](std::size_t m, std::size_t n) { return n * bins + m; };
        auto d_m = [&](std::size_t m, std::size_t n) {
            if (bins < 2)
                return 0.0;
            if (m == 0)
                return logm[idx(1, n)] - logm[idx(0, n)];
            if (m == bins - 1)
                return logm[idx(m, n)] - logm[idx(m - 1, n)];
            return 0.5 * (logm[idx(m + 1, n)] - logm[idx(m - 1, n)]);
        };
        auto d_n = [&](std::size_t m, std::size_t n) {
            if (N < 2)
                return 0.0;
            if (n == 0)
                return logm[idx(m, 1)] - logm[idx(m, 0)];
            if (n == N - 1)
                return logm[idx(m, n)] - logm[idx(m, n - 1)];
            return 0.5 * (logm[idx(m, n + 1)] - logm[idx(m, n - 1)]);
        };

        const double gamma = lambda * double(sample_rate);
        const double aM = double(g.a) * double(g.M);
        PhaseGradients out;
        out.time.resize(logm.size());
        out.freq.resize(logm.size());
        for (std::size_t n = 0; n < N; ++n)
        {
            // -2 pi n a / M, reduced exactly modulo 2 pi
            const double demod = -kTwoPi * double((n * g.a) % g.M) / double(g.M);
            for (std::size_t m = 0; m < bins; ++m)
            {
                out.time[idx(m, n)] = aM / gamma * d_m(m, n);
                out.freq[idx(m, n)] = -gamma / aM * d_n(m, n) + demod;
            }
        }
        return out;
    }

    PrResult pghi(const Magnitude& mags, const Frame& frame, double lambda, const PghiConfig& cfg)
    {
        const auto t0 = std::chrono::steady_clock::now();
        require(cfg.rel_tolerance > 0.0 && cfg.rel_tolerance < 1.0, ErrorKind::InvalidArgument,
                "PGHI tolerance must lie in (0, 1)");
        require(mags.grid == frame.grid, ErrorKind::Dimension, "magnitude grid does not match frame");
        for (double v : mags.values)
            require(std::isfinite(v) && v >= 0.0, ErrorKind::Numerical, "magnitudes must be finite and nonnegative");

        const Grid& g = mags.grid;
        const std::size_t bins = g.bins(), N = g.frames(), total = bins * N;
        PrResult res;
        res.phase.assign(total, 0.0);
        res.iterations = 1;

        const double peak = mags.values.empty() ? 0.0 : *std::max_element(mags.values.begin(), mags.values.end());
        if (peak == 0.0)
        {
            res.reconstructed = Signal{std::vector<double>(g.L, 0.0), frame.sample_rate};
            res.below_tolerance = total;
            res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return res;
        }

        const PhaseGradients grad = pghi_gradients(mags, lambda, frame.sample_rate);
        const double thr = cfg.rel_tolerance * peak;

        // done: 0 = pending significant, 1 = assigned, 2 = below tolerance
        std::vector<unsigned char> state(total, 0);
        std::vector<std::size_t> order;
        order.reserve(total);
        for (std::size_t i = 0; i < total; ++i)
        {
            if (mags.values[i] < thr)
            {
                state[i] = 2;
                ++res.below_tolerance;
            }
            else
            {
                order.push_back(i);
            }
        }
        // seeding order: magnitude descending, then (n, m) ascending, i.e. index ascending
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return mags.values[x] > mags.values[y]; });

        std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap;
        auto visit = [&](std::size_t m, std::size_t n, double phi) {
            const std::size_t i = n * bins + m;
            if (state[i] != 0)
                return;
            state[i] = 1;
            res.phase[i] = phi;
            ++res.assigned;
            heap.push({mags.values[i], n, m});
        };

        for (std::size_t seed : order)
        {
            if (state[seed] != 0)
                continue;
            visit(seed % bins, seed / bins, 0.0);
            while (!heap.empty())
            {
                const HeapEntry top = heap.top();
                heap.pop();
                const std::size_t m = top.m, n = top.n, i = n * bins + m;
                const double phi = res.phase[i];
                if (n + 1 < N)
                    visit(m, n + 1, phi + 0.5 * (grad.time[i] + grad.time[i + bins]));
                if (n > 0)
                    visit(m, n - 1, phi - 0.5 * (grad.time[i] + grad.time[i - bins]));
                if (m + 1 < bins)
                    visit(m + 1, n, phi + 0.5 * (grad.freq[i] + grad.freq[i + 1]));
                if (m > 0)
                    visit(m - 1, n, phi - 0.5 * (grad.freq[i] + grad.freq[i - 1]));
            }
        }

        std::mt19937_64 rng(cfg.rng_seed);
        for (std::size_t i = 0; i < total; ++i)
        {
            if (state[i] == 2)
                res.phase[i] = cfg.below_tol_phase == BelowTolerancePhase::RandomUniform ? uniform_phase(rng) : 0.0;
            else
                res.phase[i] = wrap_phase(res.phase[i]);
        }

        res.reconstructed = istft(with_phase(mags, res.phase), frame.dual, frame.sample_rate);
        res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }
}  // namespace tfpr
