#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "chirpsense/chirp.hpp"

namespace chirpsense {

struct Scene;  // channel.hpp

/// One-sided spectrum of one dechirped frame (bins 0 .. n_fft/2).
struct FrameSpectrum {
    std::vector<std::complex<double>> bins;
    double bin_resolution_hz = 0.0;
    std::size_t frame_index = 0;
};

/// Per-bin complex mean over frames recorded without the subject.
struct Template {
    std::vector<std::complex<double>> mean_spectrum;
    std::size_t frames_averaged = 0;
    double bin_resolution_hz = 0.0;
};

enum class WindowKind { Rectangular, Hann };

/// Outcome of frequency-bin selection.
struct BinSelection {
    std::size_t bin = 0;
    bool low_confidence = false;
    double phase_variance = 0.0;     // at the selected bin
    double power_ratio = 0.0;        // max complex variance / median complex variance
};

/// Per-frame feature row: amplitude and unwrapped phase of the selected bin
/// plus their consecutive absolute differences (0 for the first frame).
struct FrameFeatures {
    std::size_t frame_index = 0;
    double time_s = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double d_amplitude = 0.0;
    double d_phase = 0.0;
};

// Linear-phase FIR high-pass with the group delay compensated, so output
// sample n lines up with input sample n. Default taps give >= 50 dB of
// rejection at 15 kHz and < 0.1 dB of ripple from 16 kHz up at fs = 44100.
SampleBuffer highpass(const SampleBuffer& rx, double cutoff_hz = 15900.0,
                      std::size_t taps = 1001);

// Windowed-sinc high-pass design used by highpass(); exposed for inspection.
std::vector<double> design_highpass_fir(double cutoff_hz, double sample_rate,
                                        std::size_t taps);

// Normalized cross-correlation at an integer shift. Means are taken over the
// whole buffers and the sums run over the overlap, which keeps the value in
// [-1, 1] and makes xcorr(a, b, n) == xcorr(b, a, -n) exact.
// Throws std::invalid_argument on length mismatch or zero variance.
double xcorr(const SampleBuffer& tx, const SampleBuffer& rx, std::ptrdiff_t shift);

// argmax of xcorr over shifts in [-max_shift, max_shift] (0 = full range).
// Exact ties prefer the smallest non-negative shift.
std::ptrdiff_t sync_delay(const SampleBuffer& tx, const SampleBuffer& rx,
                          std::size_t max_shift = 0);

// Analytic signal via the FFT method: the real part reproduces the input and
// negative frequencies carry (near) zero energy.
std::vector<std::complex<double>> analytic(const SampleBuffer& rx);

// Dechirp mix r_m[n] = Re(rx_a[n] * conj(tx_a[n])). A static path at delay
// tau lands at beat frequency chirp_rate * tau.
std::vector<double> dechirp(const std::vector<std::complex<double>>& tx_analytic,
                            const std::vector<std::complex<double>>& rx_analytic);

// One-sided spectrum of r_m zero-padded to n_fft (>= r_m length).
FrameSpectrum spectrum(const std::vector<double>& r_m, std::size_t n_fft,
                       double sample_rate, WindowKind window = WindowKind::Rectangular,
                       std::size_t frame_index = 0);

// Smallest power of two >= n; the default FFT size for one chirp.
std::size_t default_n_fft(std::size_t chirp_samples);

// Complex per-bin mean over n_frames spectra from a subject-free scene.
// Frames are produced by the same chain as live processing.
struct PipelineConfig;  // pipeline.hpp
Template capture_template(const Scene& scene_without_subject, const PipelineConfig& cfg,
                          std::size_t n_frames);

// residual = frame - template, bin by bin.
FrameSpectrum cancel_static(const FrameSpectrum& frame, const Template& tmpl);

// Picks the facial bin: among bins whose mean power is within
// `power_floor_db` of the strongest bin, take the one with the largest
// variance of temporally unwrapped phase (ties toward the lower bin).
// The confidence flag compares complex bin variance against its median
// across bins; a flat profile means nothing is moving.
BinSelection select_bin(const std::vector<FrameSpectrum>& frames,
                        double power_floor_db = 3.0,
                        double confidence_ratio = 3.0);

// Amplitude / unwrapped phase of one bin across frames, with consecutive
// absolute differences. frame_seconds sets the time axis.
std::vector<FrameFeatures> extract_features(const std::vector<FrameSpectrum>& frames,
                                            std::size_t bin, double frame_seconds);

// v / (2B): minimum reflector separation that lands in distinct bins.
double range_resolution(double bandwidth_hz, double speed_of_sound_mps = 343.0);

// Template JSON persistence (bin array of [re, im]).
std::string template_to_json(const Template& tmpl);
Template template_from_json(const std::string& text);
void save_template(const std::string& path, const Template& tmpl);
Template load_template(const std::string& path);

}  // namespace chirpsense
