#include "synth.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tfpr::harness
{
    namespace
    {
        void normalise_peak(std::vector<double>& x)
        {
            double peak = 0.0;
            for (double v : x)
                peak = std::max(peak, std::abs(v));
            require(peak > 0.0, ErrorKind::Numerical, "synthesised signal is silent");
            for (double& v : x)
                v /= peak;
        }

        std::vector<double> harmonic_tone(const SynthParams& p, std::size_t L, unsigned rate)
        {
            require(p.f0 > 0.0 && p.harmonics > 0, ErrorKind::InvalidArgument, "harmonic tone needs f0 > 0 and harmonics > 0");
            const auto k0 = std::size_t(std::llround(p.f0 * double(L) / rate));
            require(k0 > 0, ErrorKind::InvalidArgument, "f0 is below the frequency resolution");
            require(2 * k0 * p.harmonics < L, ErrorKind::InvalidArgument, "harmonic above Nyquist");
            std::vector<double> x(L, 0.0);
            for (std::size_t h = 1; h <= p.harmonics; ++h)
            {
                const std::size_t k = h * k0;
                const double phase0 = 0.3 * double(h * h);
                for (std::size_t l = 0; l < L; ++l)
                    x[l] += std::cos(kTwoPi * double(k * l % L) / double(L) + phase0) / double(h);
            }
            return x;
        }

        std::vector<double> sine_bursts(const SynthParams& p, std::size_t L, unsigned rate)
        {
            require(p.burst_f_lo > 0.0 && p.burst_f_hi >= p.burst_f_lo && p.burst_f_hi < 0.5 * rate,
                    ErrorKind::InvalidArgument, "burst frequencies must lie in (0, Nyquist)");
            std::vector<double> x(L, 0.0);
            const auto spans = burst_spans(p, L, rate);
            for (std::size_t b = 0; b < spans.size(); ++b)
            {
                const double f = spans.size() == 1 ? p.burst_f_lo
                                                   : p.burst_f_lo * std::pow(p.burst_f_hi / p.burst_f_lo,
                                                                             double(b) / double(spans.size() - 1));
                const auto [start, stop] = spans[b];
                const double n = double(stop - start);
                for (std::size_t l = start; l < stop; ++l)
                {
                    const double u = double(l - start);
                    const double env = 0.5 - 0.5 * std::cos(kTwoPi * (u + 0.5) / n);
                    x[l] = env * std::sin(kTwoPi * f * u / rate);
                }
            }
            return x;
        }

        std::vector<double> pulse_train(const SynthParams& p, std::size_t L)
        {
            require(p.period > 0 && p.period <= L, ErrorKind::InvalidArgument, "pulse period must lie in [1, L]");
            std::vector<double> x(L, 0.0);
            for (std::size_t l = 0; l < L; l += p.period)
                x[l] = 1.0;
            return x;
        }

        // Syllable-like voiced segments (gliding f0, formant-shaped harmonics, smooth envelope)
        // alternating with noise bursts and short pauses.
        std::vector<double> speech_like(std::size_t L, unsigned rate, std::uint64_t seed)
        {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> U(0.0, 1.0);
            std::normal_distribution<double> G(0.0, 1.0);
            std::vector<double> x(L, 0.0);
            const double nyq = 0.5 * rate;

            std::size_t pos = std::size_t(0.02 * rate * U(rng));
            while (pos < L)
            {
                const bool voiced = U(rng) < 0.75;
                const auto len = std::size_t((voiced ? 0.08 + 0.22 * U(rng) : 0.03 + 0.07 * U(rng)) * rate);
                const std::size_t end = std::min(L, pos + len);
                const double n = double(end - pos);
                if (voiced)
                {
                    const double f_start = 90.0 + 160.0 * U(rng), f_end = f_start * (0.7 + 0.6 * U(rng));
                    const double F[3] = {300.0 + 600.0 * U(rng), 900.0 + 1400.0 * U(rng), 2200.0 + 1300.0 * U(rng)};
                    const double vibrato = 4.0 + 3.0 * U(rng), depth = 0.01 + 0.02 * U(rng);
                    const double amp = 0.4 + 0.6 * U(rng);
                    std::vector<double> harmonic_phase(60, 0.0);
                    for (auto& ph : harmonic_phase)
                        ph = kTwoPi * U(rng);
                    double phase = 0.0;
                    for (std::size_t l = pos; l < end; ++l)
                    {
                        const double u = double(l - pos) / n;
                        const double f = (f_start + (f_end - f_start) * u) *
                                         (1.0 + depth * std::sin(kTwoPi * vibrato * double(l - pos) / rate));
                        phase += kTwoPi * f / rate;
                        const double env = std::pow(std::sin(kPi * u), 1.5) * amp;
                        double v = 0.0;
                        for (std::size_t h = 1; h <= harmonic_phase.size(); ++h)
                        {
                            const double fh = double(h) * f;
                            if (fh >= std::min(5000.0, 0.9 * nyq))
                                break;
                            double gain = 0.0;
                            for (int k = 0; k < 3; ++k)
                                {
                                const double z = (fh - F[k]) / (80.0 + 40.0 * k);
                                gain += std::exp(-0.5 * z * z) / (1.0 + k);
                            }
                            gain += 0.05 / double(h);
                            v += gain * std::sin(double(h) * phase + harmonic_phase[h - 1]);
                        }
                        x[l] += env * v;
                    }
                }
                else
                {
                    // fricative: first-difference (high-tilted) noise with a smooth envelope
                    const double amp = 0.05 + 0.15 * U(rng);
                    double prev = 0.0;
                    for (std::size_t l = pos; l < end; ++l)
                    {
                        const double w = G(rng);
                        const double env = std::sin(kPi * double(l - pos) / n);
                        x[l] += amp * env * (w - 0.6 * prev);
                        prev = w;
                    }
                }
                pos = end + std::size_t((0.01 + 0.08 * U(rng)) * rate);
            }
            return x;
        }
    }  // namespace

    const char* synth_name(SynthKind k)
    {
        switch (k)
        {
            case SynthKind::HarmonicTone:
                return "harmonic";
            case SynthKind::SineBursts:
                return "bursts";
            case SynthKind::PulseTrain:
                return "pulses";
            case SynthKind::SpeechLike:
                return "speech";
        }
        return "?";
    }

    SynthKind synth_from_name(const std::string& name)
    {
        for (SynthKind k : {SynthKind::HarmonicTone, SynthKind::SineBursts, SynthKind::PulseTrain, SynthKind::SpeechLike})
            if (name == synth_name(k))
                return k;
        fail(ErrorKind::InvalidArgument, "unknown signal kind '" + name + "' (harmonic, bursts, pulses, speech)");
    }

    double snapped_f0(double f0, std::size_t L, unsigned sample_rate)
    {
        return double(std::llround(f0 * double(L) / sample_rate)) * sample_rate / double(L);
    }

    std::vector<std::pair<std::size_t, std::size_t>> burst_spans(const SynthParams& p, std::size_t L,
                                                                 unsigned sample_rate)
    {
        require(p.bursts > 0 && p.burst_seconds > 0.0 && p.gap_seconds >= 0.0, ErrorKind::InvalidArgument,
                "bursts need a positive count and duration");
        const auto len = std::size_t(p.burst_seconds * sample_rate);
        const auto gap = std::size_t(p.gap_seconds * sample_rate);
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        std::size_t pos = gap;
        for (std::size_t b = 0; b < p.bursts && pos + len <= L; ++b)
        {
            spans.emplace_back(pos, pos + len);
            pos += len + gap;
        }
        require(!spans.empty(), ErrorKind::InvalidArgument, "signal too short for a single burst");
        return spans;
    }

    Signal synth_signal(SynthKind kind, const SynthParams& p, std::size_t L, unsigned sample_rate, std::uint64_t seed)
    {
        require(L > 0 && sample_rate > 0, ErrorKind::InvalidArgument, "length and rate must be positive");
        std::vector<double> x;
        switch (kind)
        {
            case SynthKind::HarmonicTone:
                x = harmonic_tone(p, L, sample_rate);
                break;
            case SynthKind::SineBursts:
                x = sine_bursts(p, L, sample_rate);
                break;
            case SynthKind::PulseTrain:
                x = pulse_train(p, L);
                break;
            case SynthKind::SpeechLike:
                x = speech_like(L, sample_rate, seed);
                break;
        }
        normalise_peak(x);
        return Signal{std::move(x), sample_rate};
    }
}  // namespace tfpr::harness
