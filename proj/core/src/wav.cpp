#include "chirpsense/wav.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace chirpsense {

namespace {

void put_u32(std::ofstream& f, std::uint32_t v) {
    std::array<char, 4> b{char(v & 0xff), char((v >> 8) & 0xff),
                          char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    f.write(b.data(), 4);
}

void put_u16(std::ofstream& f, std::uint16_t v) {
    std::array<char, 2> b{char(v & 0xff), char((v >> 8) & 0xff)};
    f.write(b.data(), 2);
}

std::uint32_t get_u32(std::ifstream& f) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
           std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

std::uint16_t get_u16(std::ifstream& f) {
    unsigned char b[2];
    f.read(reinterpret_cast<char*>(b), 2);
    return std::uint16_t(b[0] | b[1] << 8);
}

}  // namespace

void write_wav(const std::string& path, const Pcm16Buffer& buf) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(buf.codes.size() * 2);
    const std::uint32_t rate = static_cast<std::uint32_t>(buf.sample_rate);

    f.write("RIFF", 4);
    put_u32(f, 36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    put_u32(f, 16);          // PCM fmt chunk size
    put_u16(f, 1);           // audio format: PCM
    put_u16(f, 1);           // mono
    put_u32(f, rate);
    put_u32(f, rate * 2);    // byte rate
    put_u16(f, 2);           // block align
    put_u16(f, 16);          // bits per sample
    f.write("data", 4);
    put_u32(f, data_bytes);
    for (std::int16_t c : buf.codes) {
        const std::uint16_t u = static_cast<std::uint16_t>(c);
        put_u16(f, u);
    }
    if (!f) {
        throw std::runtime_error("short write: " + path);
    }
}

std::size_t write_wav(const std::string& path, const SampleBuffer& buf) {
    Pcm16Buffer pcm = quantize_pcm16(buf);
    write_wav(path, pcm);
    return pcm.clipped;
}

Pcm16Buffer read_wav_pcm16(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    char tag[5] = {0};
    f.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0) {
        throw std::runtime_error("not a RIFF file: " + path);
    }
    get_u32(f);  // riff size
    f.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0) {
        throw std::runtime_error("not a WAVE file: " + path);
    }

    Pcm16Buffer out;
    bool have_fmt = false;
    while (f.read(tag, 4)) {
        const std::uint32_t chunk_size = get_u32(f);
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            const std::uint16_t format = get_u16(f);
            const std::uint16_t channels = get_u16(f);
            const std::uint32_t rate = get_u32(f);
            get_u32(f);  // byte rate
            get_u16(f);  // block align
            const std::uint16_t bits = get_u16(f);
            if (format != 1 || channels != 1 || bits != 16) {
                throw std::runtime_error("unsupported WAV format (want mono PCM16): " + path);
            }
            out.sample_rate = static_cast<double>(rate);
            if (chunk_size > 16) {
                f.seekg(chunk_size - 16, std::ios::cur);
            }
            have_fmt = true;
        } else if (std::strncmp(tag, "data", 4) == 0) {
            if (!have_fmt) {
                throw std::runtime_error("WAV data chunk before fmt chunk: " + path);
            }
            const std::size_t n = chunk_size / 2;
            out.codes.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                out.codes[i] = static_cast<std::int16_t>(get_u16(f));
            }
            if (!f) {
                throw std::runtime_error("truncated WAV data: " + path);
            }
            return out;
        } else {
            f.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
        }
    }
    throw std::runtime_error("WAV file has no data chunk: " + path);
}

SampleBuffer read_wav(const std::string& path) {
    return dequantize_pcm16(read_wav_pcm16(path));
}

}  // namespace chirpsense
