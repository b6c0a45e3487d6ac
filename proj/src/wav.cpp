#include "wav.hpp"

#include "error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace tfpr::harness
{
    namespace
    {
        static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

        constexpr std::uint16_t kFormatPcm = 1;
        constexpr std::uint16_t kFormatFloat = 3;
        constexpr std::uint16_t kFormatExtensible = 0xFFFE;

        template <typename T>
        T load(const std::uint8_t* p)
        {
            T v;
            std::memcpy(&v, p, sizeof(T));
            return v;
        }

        template <typename T>
        void store(std::vector<std::uint8_t>& out, T v)
        {
            const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
            out.insert(out.end(), p, p + sizeof(T));
        }

        void store_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }
    }  // namespace

    std::vector<double> WavData::channel(unsigned c) const
    {
        require(c < channels, ErrorKind::InvalidArgument, "channel index out of range");
        std::vector<double> out(frames());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = samples[i * channels + c];
        return out;
    }

    WavData read_wav(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        require(bool(in), ErrorKind::Io, "cannot open " + path);
        const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        require(bytes.size() >= 12 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
                    std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
                ErrorKind::Format, path + " is not a RIFF/WAVE file");

        WavData wav;
        std::uint16_t format = 0, bits = 0;
        bool have_fmt = false;
        const std::uint8_t* data = nullptr;
        std::size_t data_size = 0;

        std::size_t pos = 12;
        while (pos + 8 <= bytes.size())
        {
            const std::uint8_t* chunk = bytes.data() + pos;
            const std::size_t size = load<std::uint32_t>(chunk + 4);
            const std::size_t avail = std::min(size, bytes.size() - pos - 8);
            if (std::memcmp(chunk, "fmt ", 4) == 0)
            {
                require(avail >= 16, ErrorKind::Format, "truncated fmt chunk in " + path);
                format = load<std::uint16_t>(chunk + 8);
                wav.channels = load<std::uint16_t>(chunk + 10);
                wav.sample_rate = load<std::uint32_t>(chunk + 12);
                bits = load<std::uint16_t>(chunk + 22);
                if (format == kFormatExtensible)
                {
                    require(avail >= 26, ErrorKind::Format, "truncated extensible fmt chunk in " + path);
                    format = load<std::uint16_t>(chunk + 8 + 24);
                }
                have_fmt = true;
            }
            else if (std::memcmp(chunk, "data", 4) == 0)
            {
                data = chunk + 8;
                data_size = avail;
            }
            pos += 8 + size + (size & 1);
        }

        require(have_fmt, ErrorKind::Format, "missing fmt chunk in " + path);
        require(data != nullptr, ErrorKind::Format, "missing data chunk in " + path);
        require(wav.channels > 0 && wav.sample_rate > 0, ErrorKind::Format, "invalid channel count or rate in " + path);
        if (format == kFormatPcm && bits == 16)
            wav.encoding = WavEncoding::Pcm16;
        else if (format == kFormatFloat && bits == 32)
            wav.encoding = WavEncoding::Float32;
        else
            fail(ErrorKind::Format, "unsupported WAV encoding (format " + std::to_string(format) + ", " +
                                        std::to_string(bits) + " bits) in " + path);

        const std::size_t width = bits / 8;
        const std::size_t count = data_size / width / wav.channels * wav.channels;
        require(count > 0, ErrorKind::Format, path + " contains no samples");
        wav.samples.resize(count);
        for (std::size_t i = 0; i < count; ++i)
        {
            if (wav.encoding == WavEncoding::Pcm16)
                wav.samples[i] = load<std::int16_t>(data + i * 2) / 32768.0;
            else
                wav.samples[i] = load<float>(data + i * 4);
        }
        return wav;
    }

    void write_wav(const std::string& path, const WavData& wav)
    {
        require(wav.channels > 0 && wav.sample_rate > 0, ErrorKind::InvalidArgument, "invalid WAV header values");
        const bool pcm = wav.encoding == WavEncoding::Pcm16;
        const std::uint16_t width = pcm ? 2 : 4;
        const auto data_size = std::uint32_t(wav.samples.size() * width);

        std::vector<std::uint8_t> out;
        out.reserve(44 + data_size);
        store_tag(out, "RIFF");
        store<std::uint32_t>(out, 36 + data_size);
        store_tag(out, "WAVE");
        store_tag(out, "fmt ");
        store<std::uint32_t>(out, 16);
        store<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
        store<std::uint16_t>(out, std::uint16_t(wav.channels));
        store<std::uint32_t>(out, wav.sample_rate);
        store<std::uint32_t>(out, wav.sample_rate * wav.channels * width);
        store<std::uint16_t>(out, std::uint16_t(wav.channels * width));
        store<std::uint16_t>(out, std::uint16_t(8 * width));
        store_tag(out, "data");
        store<std::uint32_t>(out, data_size);
        for (double x : wav.samples)
        {
            if (pcm)
                store<std::int16_t>(out, std::int16_t(std::clamp(std::lround(x * 32768.0), -32768L, 32767L)));
            else
                store<float>(out, float(x));
        }

        std::ofstream f(path, std::ios::binary);
        require(bool(f), ErrorKind::Io, "cannot write " + path);
        f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
        require(bool(f), ErrorKind::Io, "write failed for " + path);
    }

    void write_wav(const std::string& path, const Signal& s, WavEncoding enc)
    {
        write_wav(path, WavData{s.sample_rate, 1, enc, s.samples});
    }
}  // namespace tfpr::harness
