#pragma once

#include "types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace tfpr::harness
{
    enum class SynthKind
    {
        HarmonicTone,
        SineBursts,
        PulseTrain,
        SpeechLike,
    };

    const char* synth_name(SynthKind k);
    SynthKind synth_from_name(const std::string& name);

    struct SynthParams
    {
        // HarmonicTone; partials sit on exact DFT frequencies of the length-L period
        double f0 = 220.0;
        std::size_t harmonics = 10;
        // SineBursts
        std::size_t bursts = 8;
        double burst_f_lo = 200.0;
        double burst_f_hi = 4000.0;
        double burst_seconds = 0.25;
        double gap_seconds = 0.05;
        // PulseTrain
        std::size_t period = 2048;
    };

    /// Unit-peak signals; deterministic per seed (only SpeechLike is random).
    Signal synth_signal(SynthKind kind, const SynthParams& p, std::size_t L, unsigned sample_rate, std::uint64_t seed);

    /// Harmonic tone fundamental actually used: f0 rounded to the DFT grid rate / L.
    double snapped_f0(double f0, std::size_t L, unsigned sample_rate);

    /// First and last sample (inclusive, exclusive) of each SineBursts burst.
    std::vector<std::pair<std::size_t, std::size_t>> burst_spans(const SynthParams& p, std::size_t L,
                                                                 unsigned sample_rate);
}  // namespace tfpr::harness
