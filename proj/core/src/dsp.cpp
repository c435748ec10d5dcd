#include "chirpsense/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chirpsense/fft.hpp"

namespace chirpsense {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

double sinc(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    const double px = kPi * x;
    return std::sin(px) / px;
}

// Temporal unwrap: add multiples of 2*pi so consecutive values differ < pi.
std::vector<double> unwrap(std::vector<double> phase) {
    double offset = 0.0;
    for (std::size_t i = 1; i < phase.size(); ++i) {
        const double d = phase[i] + offset - phase[i - 1];
        if (d > kPi) {
            offset -= kTwoPi * std::ceil((d - kPi) / kTwoPi);
        } else if (d < -kPi) {
            offset += kTwoPi * std::ceil((-d - kPi) / kTwoPi);
        }
        phase[i] += offset;
    }
    return phase;
}

double variance(const std::vector<double>& v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return acc / double(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

}  // namespace

std::vector<double> design_highpass_fir(double cutoff_hz, double sample_rate,
                                        std::size_t taps) {
    if (taps < 3 || taps % 2 == 0) {
        throw std::invalid_argument("FIR length must be odd and >= 3");
    }
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0) {
        throw std::invalid_argument("cutoff must lie inside (0, fs/2)");
    }
    // Hamming-windowed sinc: spectral inversion of the matching low-pass.
    const double fc = cutoff_hz / sample_rate;
    const std::ptrdiff_t mid = static_cast<std::ptrdiff_t>(taps / 2);
    std::vector<double> h(taps);
    for (std::size_t i = 0; i < taps; ++i) {
        const double k = static_cast<double>(static_cast<std::ptrdiff_t>(i) - mid);
        const double w =
            0.54 - 0.46 * std::cos(kTwoPi * double(i) / double(taps - 1));
        h[i] = -2.0 * fc * sinc(2.0 * fc * k) * w;
    }
    h[taps / 2] += 1.0;  // delta minus low-pass
    return h;
}

SampleBuffer highpass(const SampleBuffer& rx, double cutoff_hz, std::size_t taps) {
    const std::vector<double> h = design_highpass_fir(cutoff_hz, rx.sample_rate, taps);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rx.size());
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(taps);
    const std::ptrdiff_t mid = m / 2;

    SampleBuffer out;
    out.sample_rate = rx.sample_rate;
    out.samples.assign(rx.size(), 0.0);
    // Centered convolution: linear phase means the filter is a pure delay of
    // `mid` samples, so indexing at n + k - mid re-aligns the output.
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, mid - i);
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(m, n + mid - i);
        for (std::ptrdiff_t k = k_lo; k < k_hi; ++k) {
            acc += h[static_cast<std::size_t>(k)] *
                   rx.samples[static_cast<std::size_t>(i + k - mid)];
        }
        out.samples[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

double xcorr(const SampleBuffer& tx, const SampleBuffer& rx, std::ptrdiff_t shift) {
    const std::size_t n = tx.size();
    if (n != rx.size()) {
        throw std::invalid_argument("xcorr buffers must have equal length");
    }
    if (n < 2) {
        throw std::invalid_argument("xcorr needs at least two samples");
    }
    if (shift <= -static_cast<std::ptrdiff_t>(n) || shift >= static_cast<std::ptrdiff_t>(n)) {
        throw std::invalid_argument("shift outside (-N, N)");
    }

    double tx_mean = 0.0, rx_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tx_mean += tx.samples[i];
        rx_mean += rx.samples[i];
    }
    tx_mean /= double(n);
    rx_mean /= double(n);

    double tx_var = 0.0, rx_var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tx_var += (tx.samples[i] - tx_mean) * (tx.samples[i] - tx_mean);
        rx_var += (rx.samples[i] - rx_mean) * (rx.samples[i] - rx_mean);
    }
    if (tx_var <= 0.0 || rx_var <= 0.0) {
        throw std::invalid_argument("xcorr undefined for zero-variance input");
    }

    // rx[t] against tx[t - shift]; t restricted to where both exist.
    const std::ptrdiff_t t_lo = std::max<std::ptrdiff_t>(0, shift);
    const std::ptrdiff_t t_hi =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n),
                                 static_cast<std::ptrdiff_t>(n) + shift);
    double acc = 0.0;
    for (std::ptrdiff_t t = t_lo; t < t_hi; ++t) {
        acc += (rx.samples[static_cast<std::size_t>(t)] - rx_mean) *
               (tx.samples[static_cast<std::size_t>(t - shift)] - tx_mean);
    }
    return acc / std::sqrt(tx_var * rx_var);
}

std::ptrdiff_t sync_delay(const SampleBuffer& tx, const SampleBuffer& rx,
                          std::size_t max_shift) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tx.size());
    std::ptrdiff_t limit = (max_shift == 0) ? n - 1
                                            : std::min<std::ptrdiff_t>(n - 1,
                                                  static_cast<std::ptrdiff_t>(max_shift));
    // Rank ties so the smallest non-negative shift wins.
    auto rank = [](std::ptrdiff_t s) {
        return s >= 0 ? std::pair<int, std::ptrdiff_t>{0, s}
                      : std::pair<int, std::ptrdiff_t>{1, -s};
    };
    std::ptrdiff_t best_shift = 0;
    double best_val = xcorr(tx, rx, 0);
    for (std::ptrdiff_t s = -limit; s <= limit; ++s) {
        if (s == 0) {
            continue;
        }
        const double v = xcorr(tx, rx, s);
        if (v > best_val || (v == best_val && rank(s) < rank(best_shift))) {
            best_val = v;
            best_shift = s;
        }
    }
    return best_shift;
}

std::vector<std::complex<double>> analytic(const SampleBuffer& rx) {
    const std::size_t n = rx.size();
    if (n == 0) {
        throw std::invalid_argument("analytic signal of an empty buffer");
    }
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) {
        spec[i] = {rx.samples[i], 0.0};
    }
    spec = fft_forward(spec);
    // Keep DC (and Nyquist for even n), double the positive bins, zero the rest.
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) {
        spec[k] *= 2.0;
    }
    for (std::size_t k = half + 1; k < n; ++k) {
        spec[k] = {0.0, 0.0};
    }
    return fft_inverse(spec);
}

std::vector<double> dechirp(const std::vector<std::complex<double>>& tx_analytic,
                            const std::vector<std::complex<double>>& rx_analytic) {
    if (tx_analytic.size() != rx_analytic.size()) {
        throw std::invalid_argument("dechirp inputs must have equal length");
    }
    std::vector<double> out(tx_analytic.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (rx_analytic[i] * std::conj(tx_analytic[i])).real();
    }
    return out;
}

std::size_t default_n_fft(std::size_t chirp_samples) {
    std::size_t n = 1;
    while (n < chirp_samples) {
        n <<= 1;
    }
    return n;
}

FrameSpectrum spectrum(const std::vector<double>& r_m, std::size_t n_fft,
                       double sample_rate, WindowKind window, std::size_t frame_index) {
    if (n_fft < r_m.size()) {
        throw std::invalid_argument("n_fft smaller than the frame");
    }
    if (r_m.empty()) {
        throw std::invalid_argument("empty frame");
    }
    std::vector<std::complex<double>> padded(n_fft, {0.0, 0.0});
    const std::size_t len = r_m.size();
    for (std::size_t i = 0; i < len; ++i) {
        double w = 1.0;
        if (window == WindowKind::Hann && len > 1) {
            w = 0.5 - 0.5 * std::cos(kTwoPi * double(i) / double(len - 1));
        }
        padded[i] = {r_m[i] * w, 0.0};
    }
    std::vector<std::complex<double>> full = fft_forward(padded);

    FrameSpectrum out;
    out.frame_index = frame_index;
    out.bin_resolution_hz = sample_rate / static_cast<double>(n_fft);
    out.bins.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n_fft / 2 + 1));
    return out;
}

FrameSpectrum cancel_static(const FrameSpectrum& frame, const Template& tmpl) {
    if (frame.bins.size() != tmpl.mean_spectrum.size()) {
        throw std::invalid_argument("frame/template bin counts differ");
    }
    FrameSpectrum out = frame;
    for (std::size_t k = 0; k < out.bins.size(); ++k) {
        out.bins[k] -= tmpl.mean_spectrum[k];
    }
    return out;
}

BinSelection select_bin(const std::vector<FrameSpectrum>& frames,
                        double power_floor_db, double confidence_ratio) {
    if (frames.size() < 2) {
        throw std::invalid_argument("select_bin needs at least two frames");
    }
    const std::size_t n_bins = frames[0].bins.size();
    for (const auto& f : frames) {
        if (f.bins.size() != n_bins) {
            throw std::invalid_argument("frames disagree on bin count");
        }
    }

    // Mean power and complex variance per bin.
    std::vector<double> mean_power(n_bins, 0.0);
    std::vector<double> complex_var(n_bins, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) {
        std::complex<double> mean{0.0, 0.0};
        double power = 0.0;
        for (const auto& f : frames) {
            mean += f.bins[k];
            power += std::norm(f.bins[k]);
        }
        mean /= double(frames.size());
        power /= double(frames.size());
        mean_power[k] = power;
        double var = 0.0;
        for (const auto& f : frames) {
            var += std::norm(f.bins[k] - mean);
        }
        complex_var[k] = var / double(frames.size());
    }

    // Phase variance is only meaningful where there is energy: restrict the
    // argmax to bins within power_floor_db of the strongest one, otherwise
    // near-empty bins win on numerical noise.
    const double max_power = *std::max_element(mean_power.begin(), mean_power.end());
    const double floor = max_power * std::pow(10.0, -power_floor_db / 10.0);

    BinSelection sel;
    double best_var = -1.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        if (mean_power[k] < floor || mean_power[k] <= 0.0) {
            continue;
        }
        std::vector<double> phases(frames.size());
        for (std::size_t f = 0; f < frames.size(); ++f) {
            phases[f] = std::arg(frames[f].bins[k]);
        }
        const double var = variance(unwrap(std::move(phases)));
        if (var > best_var) {
            best_var = var;
            sel.bin = k;
        }
    }
    sel.phase_variance = best_var;

    const double med = median(complex_var);
    const double max_cv = *std::max_element(complex_var.begin(), complex_var.end());
    sel.power_ratio = med > 0.0 ? max_cv / med
                                : (max_cv > 0.0 ? INFINITY : 0.0);
    sel.low_confidence = !(sel.power_ratio >= confidence_ratio);
    return sel;
}

std::vector<FrameFeatures> extract_features(const std::vector<FrameSpectrum>& frames,
                                            std::size_t bin, double frame_seconds) {
    if (!frames.empty() && bin >= frames[0].bins.size()) {
        throw std::invalid_argument("bin index out of range");
    }
    std::vector<double> phases(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
        phases[f] = std::arg(frames[f].bins[bin]);
    }
    phases = unwrap(std::move(phases));

    std::vector<FrameFeatures> out(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
        FrameFeatures& row = out[f];
        row.frame_index = frames[f].frame_index;
        row.time_s = double(frames[f].frame_index) * frame_seconds;
        row.amplitude = std::abs(frames[f].bins[bin]);
        row.phase = phases[f];
        if (f > 0) {
            row.d_amplitude = std::abs(row.amplitude - out[f - 1].amplitude);
            row.d_phase = std::abs(row.phase - out[f - 1].phase);
        }
    }
    return out;
}

double range_resolution(double bandwidth_hz, double speed_of_sound_mps) {
    if (!(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("bandwidth must be positive");
    }
    return speed_of_sound_mps / (2.0 * bandwidth_hz);
}

std::string template_to_json(const Template& tmpl) {
    nlohmann::json j;
    j["version"] = 1;
    j["frames_averaged"] = tmpl.frames_averaged;
    j["bin_resolution_hz"] = tmpl.bin_resolution_hz;
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : tmpl.mean_spectrum) {
        bins.push_back({b.real(), b.imag()});
    }
    j["bins"] = bins;
    return j.dump(2) + "\n";
}

Template template_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("template JSON parse error: ") + e.what());
    }
    Template tmpl;
    tmpl.frames_averaged = j.at("frames_averaged").get<std::size_t>();
    tmpl.bin_resolution_hz = j.at("bin_resolution_hz").get<double>();
    for (const auto& b : j.at("bins")) {
        tmpl.mean_spectrum.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
    }
    if (tmpl.frames_averaged < 1) {
        throw std::runtime_error("template must average at least one frame");
    }
    return tmpl;
}

void save_template(const std::string& path, const Template& tmpl) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << template_to_json(tmpl);
}

Template load_template(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open template: " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return template_from_json(ss.str());
}

}  // namespace chirpsense
