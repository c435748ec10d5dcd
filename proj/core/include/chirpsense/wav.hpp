#pragma once

#include <string>

#include "chirpsense/chirp.hpp"

namespace chirpsense {

// Mono 16-bit PCM RIFF/WAVE. Writing quantizes through quantize_pcm16 and
// returns the number of clipped samples; reading rejects anything that is
// not mono PCM16.
std::size_t write_wav(const std::string& path, const SampleBuffer& buf);
void write_wav(const std::string& path, const Pcm16Buffer& buf);
Pcm16Buffer read_wav_pcm16(const std::string& path);
SampleBuffer read_wav(const std::string& path);

}  // namespace chirpsense
