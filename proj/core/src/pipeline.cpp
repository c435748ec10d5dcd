#include "chirpsense/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace chirpsense {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::size_t PipelineConfig::effective_n_fft() const {
    return n_fft == 0 ? default_n_fft(chirp.chirp_samples()) : n_fft;
}

std::size_t PipelineConfig::calib_frames() const {
    const double per_frame = chirp.frame_seconds();
    const auto n = static_cast<std::size_t>(std::llround(calib_sec / per_frame));
    return n < 2 ? 2 : n;
}

std::vector<FrameSpectrum> frame_spectra(const SampleBuffer& rx, const PipelineConfig& cfg,
                                         std::ptrdiff_t* sync_offset_out) {
    cfg.chirp.validate();
    if (cfg.effective_n_fft() < cfg.chirp.chirp_samples()) {
        throw std::invalid_argument("n_fft smaller than one chirp");
    }
    if (rx.size() < cfg.chirp.frame_samples()) {
        throw std::invalid_argument("rx shorter than one frame");
    }

    SampleBuffer work = cfg.use_highpass
                            ? highpass(rx, cfg.highpass_cutoff_hz, cfg.highpass_taps)
                            : rx;

    const std::size_t frame_len = cfg.chirp.frame_samples();
    const std::size_t chirp_len = cfg.chirp.chirp_samples();

    std::ptrdiff_t offset = 0;
    if (cfg.sync_enabled) {
        SampleBuffer tx_ref = synthesize_frame(cfg.chirp);
        SampleBuffer rx_head;
        rx_head.sample_rate = work.sample_rate;
        rx_head.samples.assign(work.samples.begin(),
                               work.samples.begin() + static_cast<std::ptrdiff_t>(frame_len));
        const std::size_t max_shift =
            cfg.sync_max_shift == 0 ? chirp_len : cfg.sync_max_shift;
        offset = sync_delay(tx_ref, rx_head, max_shift);
        if (offset < 0) {
            offset = 0;  // non-causal peak: fall back to the stream origin
        }
    }
    if (sync_offset_out) {
        *sync_offset_out = offset;
    }

    // Reference analytic chirp, shared across frames (phase restarts per frame).
    SampleBuffer tx_chirp = synthesize_chirp(cfg.chirp);
    const std::vector<std::complex<double>> tx_a = analytic(tx_chirp);

    const std::size_t usable = work.size() - static_cast<std::size_t>(offset);
    const std::size_t n_frames = usable / frame_len;
    if (n_frames == 0) {
        throw std::invalid_argument("no complete frame after sync offset");
    }

    std::vector<FrameSpectrum> spectra;
    spectra.reserve(n_frames);
    SampleBuffer slice;
    slice.sample_rate = work.sample_rate;
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t begin = static_cast<std::size_t>(offset) + f * frame_len;
        slice.samples.assign(work.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                             work.samples.begin() +
                                 static_cast<std::ptrdiff_t>(begin + chirp_len));
        const std::vector<std::complex<double>> rx_a = analytic(slice);
        const std::vector<double> mixed = dechirp(tx_a, rx_a);
        spectra.push_back(spectrum(mixed, cfg.effective_n_fft(), work.sample_rate,
                                   cfg.window, f));
    }
    return spectra;
}

Template capture_template(const Scene& scene_without_subject, const PipelineConfig& cfg,
                          std::size_t n_frames) {
    if (n_frames < 1) {
        throw std::invalid_argument("template needs at least one frame");
    }
    // One spare frame keeps the count intact when sync trims the stream head.
    const SampleBuffer tx = synthesize_stream(cfg.chirp, n_frames + 1);
    const SampleBuffer rx = propagate(scene_without_subject, tx);
    std::vector<FrameSpectrum> spectra = frame_spectra(rx, cfg);
    if (spectra.size() > n_frames) {
        spectra.resize(n_frames);
    }

    Template tmpl;
    tmpl.frames_averaged = spectra.size();
    tmpl.bin_resolution_hz = spectra[0].bin_resolution_hz;
    tmpl.mean_spectrum.assign(spectra[0].bins.size(), {0.0, 0.0});
    for (const auto& s : spectra) {
        for (std::size_t k = 0; k < s.bins.size(); ++k) {
            tmpl.mean_spectrum[k] += s.bins[k];
        }
    }
    for (auto& v : tmpl.mean_spectrum) {
        v /= static_cast<double>(spectra.size());
    }
    return tmpl;
}

std::vector<FrameFeatures> aggregate_features(const std::vector<FrameFeatures>& rows,
                                              std::size_t window) {
    if (window <= 1) {
        return rows;
    }
    std::vector<FrameFeatures> out;
    for (std::size_t start = 0; start + window <= rows.size(); start += window) {
        FrameFeatures agg;
        agg.frame_index = rows[start].frame_index;
        agg.time_s = rows[start].time_s;
        for (std::size_t i = start; i < start + window; ++i) {
            agg.amplitude += rows[i].amplitude;
            agg.phase += rows[i].phase;
        }
        agg.amplitude /= static_cast<double>(window);
        agg.phase /= static_cast<double>(window);
        if (!out.empty()) {
            agg.d_amplitude = std::abs(agg.amplitude - out.back().amplitude);
            agg.d_phase = std::abs(agg.phase - out.back().phase);
        }
        out.push_back(agg);
    }
    return out;
}

PipelineResult run_pipeline(const SampleBuffer& rx,
                            const std::optional<Template>& tmpl,
                            const PipelineConfig& cfg) {
    if (cfg.cancellation && !tmpl) {
        throw std::invalid_argument("cancellation enabled but no template given");
    }

    PipelineResult result;
    auto t0 = Clock::now();
    result.spectra = frame_spectra(rx, cfg, &result.sync_offset);
    result.timings.push_back({"frame_transform", elapsed(t0)});

    if (cfg.cancellation) {
        t0 = Clock::now();
        for (auto& s : result.spectra) {
            s = cancel_static(s, *tmpl);
        }
        result.timings.push_back({"cancellation", elapsed(t0)});
    }

    t0 = Clock::now();
    const std::size_t calib = std::min(cfg.calib_frames(), result.spectra.size());
    if (calib < 2) {
        throw std::invalid_argument("need at least two frames for bin selection");
    }
    const std::vector<FrameSpectrum> head(result.spectra.begin(),
                                          result.spectra.begin() +
                                              static_cast<std::ptrdiff_t>(calib));
    result.selection = select_bin(head, cfg.power_floor_db, cfg.confidence_ratio);
    result.timings.push_back({"bin_selection", elapsed(t0)});

    t0 = Clock::now();
    result.features = extract_features(result.spectra, result.selection.bin,
                                       cfg.chirp.frame_seconds());
    if (cfg.feature_window > 1) {
        result.features = aggregate_features(result.features, cfg.feature_window);
    }
    result.timings.push_back({"features", elapsed(t0)});

    result.bin_resolution_hz = result.spectra.empty()
                                   ? 0.0
                                   : result.spectra[0].bin_resolution_hz;
    return result;
}

}  // namespace chirpsense
