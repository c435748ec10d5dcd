#include "chirpsense/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "chirpsense/fft.hpp"
#include "chirpsense/random.hpp"

namespace chirpsense {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double Trajectory::at(double t) const {
    switch (kind) {
        case Kind::Constant:
            return base;
        case Kind::Sine:
            return base + swing * std::sin(kTwoPi * tempo_hz * t + phase0);
        case Kind::Pulse:
            return (t >= t_start && t < t_end) ? base + swing : base;
    }
    return base;
}

bool Trajectory::is_constant() const {
    return kind == Kind::Constant || swing == 0.0;
}

Trajectory Trajectory::constant(double value) {
    Trajectory tr;
    tr.kind = Kind::Constant;
    tr.base = value;
    return tr;
}

Trajectory Trajectory::sine(double base, double swing, double tempo_hz, double phase0) {
    Trajectory tr;
    tr.kind = Kind::Sine;
    tr.base = base;
    tr.swing = swing;
    tr.tempo_hz = tempo_hz;
    tr.phase0 = phase0;
    return tr;
}

Trajectory Trajectory::pulse(double base, double offset, double t_start, double t_end) {
    Trajectory tr;
    tr.kind = Kind::Pulse;
    tr.base = base;
    tr.swing = offset;
    tr.t_start = t_start;
    tr.t_end = t_end;
    return tr;
}

Reflector Reflector::static_path(double delay_s, double attenuation, std::string name) {
    Reflector r;
    r.delay = Trajectory::constant(delay_s);
    r.attenuation = Trajectory::constant(attenuation);
    r.name = std::move(name);
    return r;
}

void Scene::validate() const {
    for (const Reflector& r : reflectors) {
        // Bounds check on the trajectory extremes; per-sample evaluation
        // still guards, since Sine extremes cover the reachable range.
        const double tau_min = r.delay.kind == Trajectory::Kind::Constant
                                   ? r.delay.base
                                   : r.delay.base - std::abs(r.delay.swing);
        if (tau_min < 0.0 || !std::isfinite(tau_min)) {
            throw std::invalid_argument("reflector delay can go negative or non-finite");
        }
        const double a_lo = r.attenuation.kind == Trajectory::Kind::Constant
                                ? r.attenuation.base
                                : r.attenuation.base - std::abs(r.attenuation.swing);
        const double a_hi = r.attenuation.kind == Trajectory::Kind::Constant
                                ? r.attenuation.base
                                : r.attenuation.base + std::abs(r.attenuation.swing);
        if (a_lo < 0.0 || a_hi > 1.0) {
            throw std::invalid_argument("reflector attenuation must stay within [0, 1]");
        }
    }
    for (const auto& spec : {ambient_noise, out_of_band_noise}) {
        if (spec && (std::isnan(spec->snr_db) || spec->snr_db == -INFINITY)) {
            throw std::invalid_argument("noise SNR must be finite or +inf");
        }
        if (spec && !(spec->band_lo_hz >= 0.0 && spec->band_hi_hz > spec->band_lo_hz)) {
            throw std::invalid_argument("noise band must satisfy 0 <= lo < hi");
        }
    }
}

void AuTrajectoryParams::validate() const {
    if (base_delay_s - std::abs(delay_swing_s) < 0.0) {
        throw std::invalid_argument("delay swing would drive tau below zero");
    }
    if (attenuation_base - std::abs(attenuation_swing) < 0.0 ||
        attenuation_base + std::abs(attenuation_swing) > 1.0) {
        throw std::invalid_argument("attenuation swing leaves [0, 1]");
    }
    if (tempo_hz < 0.0) {
        throw std::invalid_argument("tempo must be non-negative");
    }
}

Reflector au_trajectory(const AuTrajectoryParams& params) {
    params.validate();

    // Fraction of the configured swing each feature actually uses.
    double delay_scale = 0.0;
    double atten_scale = 0.0;
    switch (params.expression) {
        case ExpressionLabel::Happy:      // teeth visible: reflectivity moves
            delay_scale = 0.10;
            atten_scale = 1.00;
            break;
        case ExpressionLabel::Surprise:   // mouth opens: path length moves
            delay_scale = 1.00;
            atten_scale = 0.10;
            break;
        case ExpressionLabel::Angry:      // tensed jaw: both move partially
            delay_scale = 0.70;
            atten_scale = 0.70;
            break;
        case ExpressionLabel::SadNeutral: // relaxed face
            delay_scale = 0.05;
            atten_scale = 0.05;
            break;
    }

    Reflector r;
    r.name = to_string(params.expression);
    const double dsw = params.delay_swing_s * delay_scale;
    const double asw = params.attenuation_swing * atten_scale;
    r.delay = dsw == 0.0 ? Trajectory::constant(params.base_delay_s)
                         : Trajectory::sine(params.base_delay_s, dsw, params.tempo_hz,
                                            params.phase0);
    // The two motions are deliberately out of phase so a mixed expression
    // traces a 2-D locus instead of a line.
    r.attenuation = asw == 0.0
                        ? Trajectory::constant(params.attenuation_base)
                        : Trajectory::sine(params.attenuation_base, asw,
                                           params.tempo_hz * 0.773,
                                           params.phase0 + 1.047);
    return r;
}

SampleBuffer propagate(const Scene& scene, const SampleBuffer& tx) {
    if (tx.samples.empty()) {
        throw std::invalid_argument("tx buffer is empty");
    }
    scene.validate();

    const double fs = tx.sample_rate;
    const std::size_t n = tx.size();
    SampleBuffer rx;
    rx.sample_rate = fs;
    rx.samples.assign(n, 0.0);

    for (const Reflector& refl : scene.reflectors) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / fs;
            const double tau = refl.delay.at(t);
            if (tau < 0.0) {
                throw std::runtime_error("trajectory produced a negative delay");
            }
            const double src = (static_cast<double>(i) - tau * fs);
            if (src < 0.0) {
                continue;  // path has not started delivering yet
            }
            const auto i0 = static_cast<std::size_t>(src);
            const double frac = src - static_cast<double>(i0);
            if (i0 + 1 >= n && frac > 0.0) {
                continue;
            }
            const double a = tx.samples[i0];
            const double b = (frac > 0.0) ? tx.samples[i0 + 1] : a;
            rx.samples[i] += refl.attenuation.at(t) * (a + frac * (b - a));
        }
    }

    if (scene.ambient_noise) {
        rx = add_noise(rx, scene.ambient_noise->snr_db, scene.ambient_noise->band_lo_hz,
                       scene.ambient_noise->band_hi_hz, scene.seed);
    }
    if (scene.out_of_band_noise) {
        rx = add_noise(rx, scene.out_of_band_noise->snr_db,
                       scene.out_of_band_noise->band_lo_hz,
                       scene.out_of_band_noise->band_hi_hz, scene.seed ^ 0x6f0b5d1a2c3e4f55ULL);
    }
    return rx;
}

SampleBuffer add_noise(const SampleBuffer& buf, double snr_db,
                       double band_lo_hz, double band_hi_hz, std::uint64_t seed) {
    if (std::isnan(snr_db) || snr_db == -INFINITY) {
        throw std::invalid_argument("SNR must be finite or +inf");
    }
    if (snr_db == INFINITY) {
        return buf;
    }
    const double fs = buf.sample_rate;
    if (!(band_lo_hz >= 0.0) || !(band_hi_hz > band_lo_hz) || band_hi_hz > fs / 2.0) {
        throw std::invalid_argument("noise band must lie within [0, fs/2]");
    }

    const std::size_t n = buf.size();
    if (n == 0) {
        return buf;
    }

    // Synthesize the noise directly in the frequency domain: complex Gaussian
    // weights on the in-band bins only, so out-of-band leakage is at the
    // numerical floor rather than a filter stop-band.
    const double bin_hz = fs / static_cast<double>(n);
    std::vector<std::complex<double>> spec(n, {0.0, 0.0});
    Rng rng(seed ^ 0x9d39247e33776d41ULL);
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < half; ++k) {
        const double f = bin_hz * static_cast<double>(k);
        if (f < band_lo_hz || f > band_hi_hz) {
            continue;
        }
        const std::complex<double> w(rng.gaussian(), rng.gaussian());
        spec[k] = w;
        spec[n - k] = std::conj(w);
    }
    std::vector<std::complex<double>> noise_c = fft_inverse(spec);

    double signal_power = 0.0;
    double noise_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        signal_power += buf.samples[i] * buf.samples[i];
        noise_power += noise_c[i].real() * noise_c[i].real();
    }
    signal_power /= static_cast<double>(n);
    noise_power /= static_cast<double>(n);
    if (noise_power <= 0.0) {
        return buf;  // degenerate band: nothing to add
    }
    if (signal_power <= 0.0) {
        signal_power = 1.0;  // silent input: SNR is taken against full scale
    }
    const double target = signal_power / std::pow(10.0, snr_db / 10.0);
    const double scale = std::sqrt(target / noise_power);

    SampleBuffer out;
    out.sample_rate = fs;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = buf.samples[i] + scale * noise_c[i].real();
    }
    return out;
}

}  // namespace chirpsense
