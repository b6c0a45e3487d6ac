#pragma once

#include "types.hpp"

#include <string>
#include <vector>

namespace tfpr::harness
{
    enum class WavEncoding
    {
        Pcm16,
        Float32,
    };

    struct WavData
    {
        unsigned sample_rate = 0;
        unsigned channels = 0;
        WavEncoding encoding = WavEncoding::Pcm16;
        /// Interleaved, converted to double (PCM16 scaled by 1/32768).
        std::vector<double> samples;

        std::size_t frames() const { return channels ? samples.size() / channels : 0; }
        std::vector<double> channel(unsigned c) const;
    };

    WavData read_wav(const std::string& path);

    /// Mono writer; PCM16 clips to [-1, 1).
    void write_wav(const std::string& path, const Signal& s, WavEncoding enc = WavEncoding::Float32);
    void write_wav(const std::string& path, const WavData& data);
}  // namespace tfpr::harness
