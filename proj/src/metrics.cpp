#include "metrics.hpp"

#include "error.hpp"
#include "windows.hpp"

#include <cmath>

namespace tfpr
{
    namespace
    {
        constexpr double kZeroDenominator = 1e-300;

        Signal padded(const Signal& s, std::size_t L)
        {
            Signal out = s;
            out.samples.resize(L, 0.0);
            return out;
        }

        double ratio_db(double num, double den)
        {
            if (den < kZeroDenominator)
                return kPerfect;
            return 10.0 * std::log10(num / den);
        }
    }  // namespace

    double snr_ms(const Signal& original, const Signal& reconstructed, const SnrMsConfig& cfg)
    {
        require(original.length() == reconstructed.length(), ErrorKind::Dimension,
                "original and reconstruction differ in length");
        require(original.sample_rate == reconstructed.sample_rate, ErrorKind::Dimension,
                "original and reconstruction differ in sample rate");
        require(original.length() > 0, ErrorKind::Dimension, "empty signal");
        require(cfg.M > 0 && cfg.a > 0 && cfg.M % cfg.a == 0, ErrorKind::InvalidArgument,
                "metric grid needs a | M");

        const std::size_t L = (original.length() + cfg.M - 1) / cfg.M * cfg.M;
        const Grid grid{cfg.a, cfg.M, L};
        const double lambda = cfg.lambda.value_or(double(cfg.a) * double(cfg.M) / double(original.sample_rate));
        const Window g = periodized_gaussian(lambda, L, original.sample_rate);

        const Spectrum S = stft(padded(original, L), g, grid);
        const Spectrum Sr = stft(padded(reconstructed, L), g, grid);
        Magnitude diff = magnitude_of(Sr);
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= std::abs(S.coeffs[i]);
        const double num = full_norm(S), den = full_norm(diff);
        return ratio_db(num * num, den * den);
    }

    double time_snr(const Signal& original, const Signal& reconstructed)
    {
        require(original.length() == reconstructed.length(), ErrorKind::Dimension,
                "original and reconstruction differ in length");
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < original.length(); ++i)
        {
            num += original.samples[i] * original.samples[i];
            const double d = original.samples[i] - reconstructed.samples[i];
            den += d * d;
        }
        return ratio_db(num, den);
    }

    double projection_error(const Spectrum& coeffs, const Window& g, const Window& dual)
    {
        return full_distance(coeffs, project_consistent(coeffs, g, dual));
    }

    Signal trimmed(const Signal& s, std::size_t trim)
    {
        require(2 * trim < s.length(), ErrorKind::Dimension, "trim removes the whole signal");
        Signal out;
        out.sample_rate = s.sample_rate;
        out.samples.assign(s.samples.begin() + static_cast<std::ptrdiff_t>(trim),
                           s.samples.end() - static_cast<std::ptrdiff_t>(trim));
        return out;
    }
}  // namespace tfpr
