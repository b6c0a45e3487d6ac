#pragma once

#include "types.hpp"

#include <string>

namespace tfpr::harness
{
    inline constexpr std::size_t kResampleTaps = 64;
    inline constexpr std::size_t kDefaultLength = 122880;

    /// Windowed-sinc (Kaiser, 64 taps) sample-rate conversion; returns the first `out_length` samples.
    std::vector<double> resample(const std::vector<double>& x, unsigned in_rate, unsigned out_rate,
                                 std::size_t out_length);

    /// Reads channel 0, resamples to `target_rate` if needed, truncates or zero-pads to `target_length`.
    Signal ingest_wav(const std::string& path, unsigned target_rate = 22050, std::size_t target_length = kDefaultLength);
}  // namespace tfpr::harness
