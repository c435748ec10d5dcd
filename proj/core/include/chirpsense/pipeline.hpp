#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chirpsense/channel.hpp"
#include "chirpsense/chirp.hpp"
#include "chirpsense/dsp.hpp"

namespace chirpsense {

/// Receiver-chain configuration shared by live processing and template
/// capture. Defaults follow the transmitter: 16-19 kHz over 40 ms frames at
/// 44100 Hz, FFT padded to the next power of two, 4 s of calibration frames.
struct PipelineConfig {
    ChirpConfig chirp;
    std::size_t n_fft = 0;              // 0 = next power of two >= chirp samples
    WindowKind window = WindowKind::Rectangular;
    bool use_highpass = true;
    double highpass_cutoff_hz = 15900.0;
    std::size_t highpass_taps = 1001;
    bool cancellation = true;
    double calib_sec = 4.0;             // bin-selection window
    std::size_t template_frames = 16;
    double power_floor_db = 3.0;
    double confidence_ratio = 3.0;
    bool sync_enabled = true;
    std::size_t sync_max_shift = 0;     // 0 = one chirp length
    std::size_t feature_window = 1;     // >1 averages feature rows in blocks

    std::size_t effective_n_fft() const;
    std::size_t calib_frames() const;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineResult {
    std::ptrdiff_t sync_offset = 0;
    BinSelection selection;
    std::vector<FrameSpectrum> spectra;   // what selection and features saw
    std::vector<FrameFeatures> features;
    double bin_resolution_hz = 0.0;
    std::vector<StageTiming> timings;
};

// Slices rx into frames (after optional high-pass and sync), dechirps each
// against the reference chirp, subtracts the template when cancellation is
// on, selects the feature bin over the calibration window and extracts the
// amplitude/phase series.
PipelineResult run_pipeline(const SampleBuffer& rx,
                            const std::optional<Template>& tmpl,
                            const PipelineConfig& cfg);

// Frame spectra only (no cancellation / selection); shared by run_pipeline
// and capture_template.
std::vector<FrameSpectrum> frame_spectra(const SampleBuffer& rx, const PipelineConfig& cfg,
                                         std::ptrdiff_t* sync_offset_out = nullptr);

// Averages feature rows in non-overlapping blocks of `window` frames and
// recomputes the consecutive differences on the averaged series.
std::vector<FrameFeatures> aggregate_features(const std::vector<FrameFeatures>& rows,
                                              std::size_t window);

}  // namespace chirpsense
