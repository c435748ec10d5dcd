#include "chirpsense/chirp.hpp"

#include <cmath>
#include <stdexcept>

namespace chirpsense {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::size_t ChirpConfig::chirp_samples() const {
    return static_cast<std::size_t>(std::llround(duration_t * sample_rate));
}

std::size_t ChirpConfig::silence_samples() const {
    return static_cast<std::size_t>(std::llround(silence_t * sample_rate));
}

void ChirpConfig::validate() const {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz)) {
        throw std::invalid_argument("chirp band must satisfy 0 < f_min < f_max");
    }
    if (f_max_hz > sample_rate / 2.0) {
        throw std::invalid_argument("f_max exceeds the Nyquist frequency");
    }
    if (!(duration_t > 0.0) || silence_t < 0.0) {
        throw std::invalid_argument("duration must be positive, silence non-negative");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("sample rate must be positive");
    }
    const double c = chirp_rate();
    if (!std::isfinite(c) || !(c > 0.0)) {
        throw std::invalid_argument("chirp rate must be finite and positive");
    }
    if (!std::isfinite(phi_min) || !std::isfinite(gain)) {
        throw std::invalid_argument("phi_min and gain must be finite");
    }
}

double instantaneous_frequency(const ChirpConfig& cfg, double t) {
    if (t < 0.0 || t > cfg.duration_t) {
        throw std::domain_error("t outside the chirp interval [0, T]");
    }
    return cfg.f_min_hz + cfg.chirp_rate() * t;
}

double instantaneous_phase(const ChirpConfig& cfg, double t) {
    if (t < 0.0 || t > cfg.duration_t) {
        throw std::domain_error("t outside the chirp interval [0, T]");
    }
    return cfg.phi_min + kTwoPi * (0.5 * cfg.chirp_rate() * t * t + cfg.f_min_hz * t);
}

SampleBuffer synthesize_chirp(const ChirpConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.chirp_samples();
    SampleBuffer out;
    out.sample_rate = cfg.sample_rate;
    out.samples.resize(n);
    const double c = cfg.chirp_rate();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / cfg.sample_rate;
        const double phi = cfg.phi_min + kTwoPi * (0.5 * c * t * t + cfg.f_min_hz * t);
        out.samples[i] = cfg.gain * std::sin(phi);
    }
    return out;
}

SampleBuffer synthesize_frame(const ChirpConfig& cfg) {
    SampleBuffer out = synthesize_chirp(cfg);
    out.samples.resize(cfg.frame_samples(), 0.0);
    return out;
}

SampleBuffer synthesize_stream(const ChirpConfig& cfg, std::size_t n_frames) {
    SampleBuffer frame = synthesize_frame(cfg);
    SampleBuffer out;
    out.sample_rate = cfg.sample_rate;
    out.samples.reserve(frame.size() * n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
        out.samples.insert(out.samples.end(), frame.samples.begin(), frame.samples.end());
    }
    return out;
}

Pcm16Buffer quantize_pcm16(const SampleBuffer& buf) {
    Pcm16Buffer out;
    out.sample_rate = buf.sample_rate;
    out.codes.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        double v = buf.samples[i];
        if (v > 1.0 || v < -1.0) {
            ++out.clipped;
            v = v > 1.0 ? 1.0 : -1.0;
        }
        out.codes[i] = static_cast<std::int16_t>(std::lround(v * 32767.0));
    }
    return out;
}

SampleBuffer dequantize_pcm16(const Pcm16Buffer& buf) {
    SampleBuffer out;
    out.sample_rate = buf.sample_rate;
    out.samples.resize(buf.codes.size());
    for (std::size_t i = 0; i < buf.codes.size(); ++i) {
        out.samples[i] = static_cast<double>(buf.codes[i]) / 32767.0;
    }
    return out;
}

}  // namespace chirpsense
