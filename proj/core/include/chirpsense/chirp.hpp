#pragma once

#include <cstdint>
#include <vector>

namespace chirpsense {

/// Parameters of the linear FMCW chirp and its framing.
/// The transmitted frame is a sine sweep from f_min to f_max over
/// duration_t seconds, followed by silence_t seconds of zeros.
struct ChirpConfig {
    double f_min_hz = 16000.0;
    double f_max_hz = 19000.0;
    double duration_t = 0.040;
    double silence_t = 0.030;
    double sample_rate = 44100.0;
    double phi_min = 0.0;   // phase at t = 0, radians
    double gain = 1.0;      // amplitude headroom when mixing with noise

    // Sweep slope in Hz/s.
    double chirp_rate() const { return (f_max_hz - f_min_hz) / duration_t; }

    std::size_t chirp_samples() const;
    std::size_t silence_samples() const;
    std::size_t frame_samples() const { return chirp_samples() + silence_samples(); }
    double frame_seconds() const { return duration_t + silence_t; }

    // Throws std::invalid_argument when band, duration or rate are unusable.
    void validate() const;
};

/// Real-valued sample stream tagged with its rate. Samples are expected to
/// stay within [-1, 1] once destined for PCM.
struct SampleBuffer {
    std::vector<double> samples;
    double sample_rate = 44100.0;

    std::size_t size() const { return samples.size(); }
};

/// 16-bit signed little-endian mono PCM. `clipped` counts samples that were
/// outside [-1, 1] before encoding.
struct Pcm16Buffer {
    std::vector<std::int16_t> codes;
    double sample_rate = 44100.0;
    std::size_t clipped = 0;
};

// f(t) = f_min + c t for t in [0, T]; throws std::domain_error outside.
double instantaneous_frequency(const ChirpConfig& cfg, double t);

// phi(t) = phi_min + 2*pi*(c/2 t^2 + f_min t) for t in [0, T].
double instantaneous_phase(const ChirpConfig& cfg, double t);

// One chirp: round(T * fs) samples of gain * sin(phi(n / fs)).
SampleBuffer synthesize_chirp(const ChirpConfig& cfg);

// Chirp followed by round(T_sil * fs) zeros.
SampleBuffer synthesize_frame(const ChirpConfig& cfg);

// n_frames frames back to back; phase restarts at phi_min each frame.
SampleBuffer synthesize_stream(const ChirpConfig& cfg, std::size_t n_frames);

// Symmetric 16-bit quantization: code = round(sample * 32767), clipped to
// +/-32767 so that +1 and -1 map to codes of equal magnitude.
Pcm16Buffer quantize_pcm16(const SampleBuffer& buf);
SampleBuffer dequantize_pcm16(const Pcm16Buffer& buf);

}  // namespace chirpsense
