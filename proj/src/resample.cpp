#include "resample.hpp"

#include "error.hpp"
#include "wav.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>

namespace tfpr::harness
{
    namespace
    {
        constexpr double kKaiserBeta = 9.0;
        // a little below Nyquist so the transition band stays out of the alias region
        constexpr double kCutoff = 0.92;

        double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

        double kaiser(double x, double half)
        {
            const double r = x / half;
            if (std::abs(r) >= 1.0)
                return 0.0;
            return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, kKaiserBeta);
        }
    }  // namespace

    std::vector<double> resample(const std::vector<double>& x, unsigned in_rate, unsigned out_rate,
                                 std::size_t out_length)
    {
        require(in_rate > 0 && out_rate > 0, ErrorKind::InvalidArgument, "sample rates must be positive");
        if (in_rate == out_rate)
        {
            std::vector<double> y(x.begin(), x.begin() + std::ptrdiff_t(std::min(x.size(), out_length)));
            y.resize(out_length, 0.0);
            return y;
        }

        const double step = double(in_rate) / double(out_rate);
        const double fc = kCutoff * std::min(1.0, 1.0 / step);
        const long half = long(kResampleTaps / 2);
        const std::size_t produced = std::min<std::size_t>(
            out_length, std::size_t((std::uint64_t(x.size()) * out_rate + in_rate - 1) / in_rate));

        // output j sits at input position j * in / out; its fractional part takes out / gcd distinct values
        const std::uint64_t g = std::gcd(in_rate, out_rate), phases = out_rate / g;
        auto kernel = [&](double d) { return fc * sinc(fc * d) * kaiser(d, double(half)); };
        std::vector<double> table;
        if (phases <= 4096)
        {
            table.resize(phases * kResampleTaps);
            for (std::uint64_t p = 0; p < phases; ++p)
            {
                const double frac = double(p * g) / double(out_rate);
                for (long i = 0; i < long(kResampleTaps); ++i)
                    table[p * kResampleTaps + std::size_t(i)] = kernel(frac + double(half - 1 - i));
            }
        }

        std::vector<double> y(out_length, 0.0);
        for (std::size_t j = 0; j < produced; ++j)
        {
            const std::uint64_t num = std::uint64_t(j) * in_rate;
            const long centre = long(num / out_rate);
            const std::uint64_t phase = (num % out_rate) / g;
            const double frac = double(num % out_rate) / double(out_rate);
            double acc = 0.0;
            for (long i = 0; i < long(kResampleTaps); ++i)
            {
                const long k = centre - half + 1 + i;
                if (k < 0 || k >= long(x.size()))
                    continue;
                const double h = table.empty() ? kernel(frac + double(half - 1 - i)) : table[phase * kResampleTaps + std::size_t(i)];
                acc += x[std::size_t(k)] * h;
            }
            y[j] = acc;
        }
        return y;
    }

    Signal ingest_wav(const std::string& path, unsigned target_rate, std::size_t target_length)
    {
        require(target_length > 0, ErrorKind::InvalidArgument, "target length must be positive");
        const WavData wav = read_wav(path);
        return Signal{resample(wav.channel(0), wav.sample_rate, target_rate, target_length), target_rate};
    }
}  // namespace tfpr::harness
