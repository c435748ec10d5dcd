#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "chirpsense/channel.hpp"
#include "chirpsense/chirp.hpp"
#include "chirpsense/dsp.hpp"
#include "chirpsense/pipeline.hpp"
#include "chirpsense/random.hpp"

using namespace chirpsense;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SampleBuffer tone(double freq, double seconds, double fs = 44100.0, double phase = 0.0) {
    SampleBuffer buf;
    buf.sample_rate = fs;
    const auto n = static_cast<std::size_t>(seconds * fs);
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf.samples[i] = std::cos(kTwoPi * freq * double(i) / fs + phase);
    }
    return buf;
}

double rms(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        acc += v[i] * v[i];
    }
    return std::sqrt(acc / double(hi - lo));
}

// Brute-force DFT, the independent oracle for spectrum().
std::vector<std::complex<double>> direct_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -kTwoPi * double(k) * double(t) / double(n);
            acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        out[k] = acc;
    }
    return out;
}

std::size_t argmax_bin(const FrameSpectrum& spec) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.bins.size(); ++k) {
        if (std::abs(spec.bins[k]) > std::abs(spec.bins[best])) {
            best = k;
        }
    }
    return best;
}

// Dechirp one propagated frame against the reference chirp; no sync so the
// absolute delay maps straight to a beat frequency.
FrameSpectrum dechirped_frame(const Scene& scene, const ChirpConfig& cfg,
                              std::size_t n_fft) {
    const SampleBuffer tx = synthesize_frame(cfg);
    const SampleBuffer rx = propagate(scene, tx);
    SampleBuffer tx_chirp, rx_chirp;
    tx_chirp.sample_rate = rx_chirp.sample_rate = cfg.sample_rate;
    const std::size_t n = cfg.chirp_samples();
    tx_chirp.samples.assign(tx.samples.begin(), tx.samples.begin() + n);
    rx_chirp.samples.assign(rx.samples.begin(), rx.samples.begin() + n);
    const auto mixed = dechirp(analytic(tx_chirp), analytic(rx_chirp));
    return spectrum(mixed, n_fft, cfg.sample_rate);
}

}  // namespace

TEST_CASE("highpass keeps the chirp band and kills audible noise") {
    SUBCASE("1 kHz tone is attenuated below 1%") {
        const SampleBuffer in = tone(1000.0, 0.2);
        const SampleBuffer out = highpass(in);
        const double in_rms = rms(in.samples, 1001, in.size() - 1001);
        const double out_rms = rms(out.samples, 1001, out.size() - 1001);
        CHECK(out_rms / in_rms < 0.01);
    }

    SUBCASE("17.5 kHz tone passes within 1 dB") {
        const SampleBuffer in = tone(17500.0, 0.2);
        const SampleBuffer out = highpass(in);
        const double in_rms = rms(in.samples, 1001, in.size() - 1001);
        const double out_rms = rms(out.samples, 1001, out.size() - 1001);
        CHECK(std::abs(20.0 * std::log10(out_rms / in_rms)) < 1.0);
    }

    SUBCASE("16 kHz band edge passes within 1 dB") {
        const SampleBuffer in = tone(16000.0, 0.2);
        const SampleBuffer out = highpass(in);
        const double in_rms = rms(in.samples, 1001, in.size() - 1001);
        const double out_rms = rms(out.samples, 1001, out.size() - 1001);
        CHECK(std::abs(20.0 * std::log10(out_rms / in_rms)) < 1.0);
    }

    SUBCASE("15 kHz stop edge is down 40 dB") {
        const SampleBuffer in = tone(15000.0, 0.2);
        const SampleBuffer out = highpass(in);
        const double in_rms = rms(in.samples, 1001, in.size() - 1001);
        const double out_rms = rms(out.samples, 1001, out.size() - 1001);
        CHECK(20.0 * std::log10(in_rms / out_rms) > 40.0);
    }

    SUBCASE("zero in, zero out") {
        SampleBuffer in;
        in.sample_rate = 44100.0;
        in.samples.assign(4000, 0.0);
        const SampleBuffer out = highpass(in);
        for (double s : out.samples) {
            CHECK(s == 0.0);
        }
    }

    SUBCASE("group delay is compensated") {
        // A high-frequency burst must stay where it was.
        SampleBuffer in;
        in.sample_rate = 44100.0;
        in.samples.assign(6000, 0.0);
        for (std::size_t i = 3000; i < 3200; ++i) {
            in.samples[i] = std::sin(kTwoPi * 18000.0 * double(i) / 44100.0);
        }
        const SampleBuffer out = highpass(in);
        std::size_t peak = 0;
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (std::abs(out.samples[i]) > std::abs(out.samples[peak])) {
                peak = i;
            }
        }
        CHECK(peak >= 3000);
        CHECK(peak < 3200);
    }
}

TEST_CASE("xcorr basics") {
    ChirpConfig cfg;
    const SampleBuffer x = synthesize_frame(cfg);

    SUBCASE("self correlation is one, anti-correlation minus one") {
        CHECK(xcorr(x, x, 0) == doctest::Approx(1.0).epsilon(1e-12));
        SampleBuffer neg = x;
        for (double& s : neg.samples) {
            s = -s;
        }
        CHECK(xcorr(x, neg, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    }

    SUBCASE("argmax finds a 7-sample delay") {
        SampleBuffer rx;
        rx.sample_rate = x.sample_rate;
        rx.samples.assign(x.size(), 0.0);
        for (std::size_t i = 7; i < x.size(); ++i) {
            rx.samples[i] = x.samples[i - 7];
        }
        // Brute-force scan over every admissible shift.
        std::ptrdiff_t best = 0;
        double best_val = -2.0;
        for (std::ptrdiff_t s = -200; s <= 200; ++s) {
            const double v = xcorr(x, rx, s);
            if (v > best_val) {
                best_val = v;
                best = s;
            }
        }
        CHECK(best == 7);
        CHECK(sync_delay(x, rx, 200) == 7);
    }

    SUBCASE("values stay within [-1, 1]") {
        Rng rng(31);
        SampleBuffer a, b;
        a.sample_rate = b.sample_rate = 44100.0;
        a.samples.resize(512);
        b.samples.resize(512);
        for (std::size_t i = 0; i < 512; ++i) {
            a.samples[i] = rng.uniform(-1.0, 1.0);
            b.samples[i] = rng.uniform(-1.0, 1.0);
        }
        for (std::ptrdiff_t s = -511; s <= 511; s += 13) {
            const double v = xcorr(a, b, s);
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v >= -1.0 - 1e-12);
            // swap symmetry, exact
            CHECK(v == xcorr(b, a, -s));
        }
    }

    SUBCASE("zero variance raises") {
        SampleBuffer flat;
        flat.sample_rate = 44100.0;
        flat.samples.assign(64, 0.25);
        CHECK_THROWS_AS(xcorr(flat, x, 0), std::invalid_argument);
    }

    SUBCASE("length mismatch raises") {
        SampleBuffer shorter;
        shorter.sample_rate = x.sample_rate;
        shorter.samples.assign(x.samples.begin(), x.samples.begin() + 100);
        CHECK_THROWS_AS(xcorr(x, shorter, 0), std::invalid_argument);
    }
}

TEST_CASE("sync_delay recovers integer delays") {
    ChirpConfig cfg;
    const SampleBuffer x = synthesize_frame(cfg);

    SUBCASE("identity gives zero") {
        CHECK(sync_delay(x, x, 64) == 0);
    }

    SUBCASE("clean 20 dB SNR, exact recovery") {
        const std::size_t k = 23;
        Scene scene;
        scene.reflectors.push_back(
            Reflector::static_path(double(k) / cfg.sample_rate, 0.8));
        SampleBuffer rx = propagate(scene, x);
        rx = add_noise(rx, 20.0, 100.0, 21000.0, 17);
        CHECK(sync_delay(x, rx, 100) == static_cast<std::ptrdiff_t>(k));
    }
}

TEST_CASE("analytic signal properties") {
    const SampleBuffer c = tone(17500.0, 0.04);
    const auto a = analytic(c);

    SUBCASE("real part reproduces the input") {
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(std::abs(a[i].real() - c.samples[i]) < 1e-9);
        }
    }

    SUBCASE("envelope of a tone is flat over the middle") {
        const std::size_t lo = c.size() / 20;
        const std::size_t hi = c.size() - c.size() / 20;
        for (std::size_t i = lo; i < hi; ++i) {
            CHECK(std::abs(std::abs(a[i]) - 1.0) < 0.01);
        }
    }

    SUBCASE("negative frequencies carry no energy") {
        std::vector<std::complex<double>> spec = fft_forward(a);
        double pos = 0.0, neg = 0.0;
        for (std::size_t k = 1; k < spec.size() / 2; ++k) {
            pos += std::norm(spec[k]);
            neg += std::norm(spec[spec.size() - k]);
        }
        CHECK(neg / pos < 1e-20);
    }

    SUBCASE("sin lags cos by pi/2") {
        const SampleBuffer s = tone(17500.0, 0.04, 44100.0, -M_PI / 2.0);  // sin
        const auto as = analytic(s);
        const std::size_t lo = c.size() / 10;
        const std::size_t hi = c.size() - c.size() / 10;
        for (std::size_t i = lo; i < hi; i += 17) {
            double d = std::arg(a[i]) - std::arg(as[i]);
            while (d > M_PI) d -= kTwoPi;
            while (d < -M_PI) d += kTwoPi;
            CHECK(std::abs(d - M_PI / 2.0) < 1e-3);
        }
    }
}

#include "chirpsense/fft.hpp"

TEST_CASE("dechirp maps delay to beat frequency") {
    ChirpConfig cfg;
    const std::size_t n_fft = default_n_fft(cfg.chirp_samples());
    CHECK(n_fft == 2048);
    const double bin_hz = cfg.sample_rate / double(n_fft);

    SUBCASE("zero delay beats at DC") {
        Scene scene;
        scene.reflectors.push_back(Reflector::static_path(0.0, 1.0));
        const FrameSpectrum spec = dechirped_frame(scene, cfg, n_fft);
        CHECK(argmax_bin(spec) == 0);
    }

    SUBCASE("1 ms delay beats at 75 Hz") {
        Scene scene;
        scene.reflectors.push_back(Reflector::static_path(1e-3, 0.7));
        const FrameSpectrum spec = dechirped_frame(scene, cfg, n_fft);
        const double expected_bin = cfg.chirp_rate() * 1e-3 / bin_hz;
        CHECK(std::abs(double(argmax_bin(spec)) - expected_bin) <= 1.0);
    }

    SUBCASE("two paths produce two local maxima") {
        Scene scene;
        scene.reflectors.push_back(Reflector::static_path(1e-3, 0.7));
        scene.reflectors.push_back(Reflector::static_path(3e-3, 0.7));
        const FrameSpectrum spec = dechirped_frame(scene, cfg, n_fft);
        for (double tau : {1e-3, 3e-3}) {
            const double expected = cfg.chirp_rate() * tau / bin_hz;
            bool found = false;
            for (std::size_t k = 1; k + 1 < spec.bins.size(); ++k) {
                const bool local_max = std::abs(spec.bins[k]) >= std::abs(spec.bins[k - 1]) &&
                                       std::abs(spec.bins[k]) >= std::abs(spec.bins[k + 1]);
                if (local_max && std::abs(double(k) - expected) <= 1.0) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }

    SUBCASE("length mismatch raises") {
        std::vector<std::complex<double>> a(16), b(17);
        CHECK_THROWS_AS(dechirp(a, b), std::invalid_argument);
    }
}

TEST_CASE("spectrum against the direct DFT oracle") {
    SUBCASE("all zeros") {
        const std::vector<double> x(256, 0.0);
        const FrameSpectrum spec = spectrum(x, 256, 44100.0);
        for (const auto& b : spec.bins) {
            CHECK(std::abs(b) == 0.0);
        }
    }

    SUBCASE("unit impulse is flat") {
        std::vector<double> x(256, 0.0);
        x[0] = 1.0;
        const FrameSpectrum spec = spectrum(x, 256, 44100.0);
        for (const auto& b : spec.bins) {
            CHECK(std::abs(b) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("random sequence matches the brute-force DFT") {
        Rng rng(12);
        std::vector<double> x(256);
        for (double& v : x) {
            v = rng.uniform(-1.0, 1.0);
        }
        const FrameSpectrum spec = spectrum(x, 256, 44100.0);
        const auto oracle = direct_dft(x);
        for (std::size_t k = 0; k < spec.bins.size(); ++k) {
            CHECK(std::abs(spec.bins[k] - oracle[k]) < 1e-9);
        }
    }

    SUBCASE("Parseval for the rectangular window") {
        Rng rng(13);
        std::vector<double> x(1024);
        for (double& v : x) {
            v = rng.uniform(-1.0, 1.0);
        }
        const std::size_t n_fft = 1024;
        const FrameSpectrum spec = spectrum(x, n_fft, 44100.0);
        double time_energy = 0.0;
        for (double v : x) {
            time_energy += v * v;
        }
        // Reassemble the two-sided sum from the one-sided bins.
        double freq_energy = std::norm(spec.bins[0]) + std::norm(spec.bins[n_fft / 2]);
        for (std::size_t k = 1; k < n_fft / 2; ++k) {
            freq_energy += 2.0 * std::norm(spec.bins[k]);
        }
        freq_energy /= double(n_fft);
        CHECK(std::abs(time_energy - freq_energy) / time_energy < 1e-6);
    }

    SUBCASE("n_fft below the frame length raises") {
        const std::vector<double> x(300, 0.0);
        CHECK_THROWS_AS(spectrum(x, 256, 44100.0), std::invalid_argument);
    }
}

TEST_CASE("beat-frequency property over random delays") {
    ChirpConfig cfg;
    const std::size_t n_fft = default_n_fft(cfg.chirp_samples());
    const double bin_hz = cfg.sample_rate / double(n_fft);
    Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const double tau = rng.uniform(0.1e-3, 5e-3);
        Scene scene;
        scene.reflectors.push_back(Reflector::static_path(tau, 0.8));
        const FrameSpectrum spec = dechirped_frame(scene, cfg, n_fft);
        const double expected = cfg.chirp_rate() * tau / bin_hz;
        CHECK(std::abs(double(argmax_bin(spec)) - expected) <= 1.0);
    }
}

namespace {

// Shared fixture: 5 static paths plus one delay-modulated "face", processed
// through the frame pipeline with cancellation.
struct CancellationRun {
    std::vector<FrameSpectrum> raw;
    std::vector<FrameSpectrum> residual;
    std::vector<std::size_t> static_bins;
    std::size_t mover_bin = 0;
};

CancellationRun make_cancellation_run(std::uint64_t seed, std::size_t n_frames = 48) {
    PipelineConfig cfg;
    cfg.use_highpass = false;  // noiseless scene, skip the FIR for speed
    cfg.sync_enabled = false;
    const double bin_hz = cfg.chirp.sample_rate / double(cfg.effective_n_fft());
    const double c = cfg.chirp.chirp_rate();

    Rng rng(seed);
    Scene statics;
    statics.seed = seed;
    CancellationRun run;
    const double bins[] = {6.0, 11.0, 16.0, 21.0, 26.0};
    for (double b : bins) {
        const double jitter = rng.uniform(-0.3, 0.3);
        const double tau = (b + jitter) * bin_hz / c;
        statics.reflectors.push_back(Reflector::static_path(tau, rng.uniform(0.4, 0.8)));
        run.static_bins.push_back(static_cast<std::size_t>(std::lround(b + jitter)));
    }

    Scene full = statics;
    const double mover_bin_f = 40.0 + rng.uniform(-0.3, 0.3);
    const double mover_tau = mover_bin_f * bin_hz / c;
    Reflector face;
    face.delay = Trajectory::sine(mover_tau, 25e-6, 1.7, rng.uniform(0.0, 6.28));
    face.attenuation = Trajectory::constant(0.7);
    face.name = "face";
    full.reflectors.push_back(face);
    run.mover_bin = static_cast<std::size_t>(std::lround(mover_bin_f));

    const Template tmpl = capture_template(statics, cfg, 8);
    const SampleBuffer tx = synthesize_stream(cfg.chirp, n_frames);
    const SampleBuffer rx = propagate(full, tx);
    run.raw = frame_spectra(rx, cfg);
    run.residual.reserve(run.raw.size());
    for (const auto& f : run.raw) {
        run.residual.push_back(cancel_static(f, tmpl));
    }
    return run;
}

double phase_var_at(const std::vector<FrameSpectrum>& frames, std::size_t bin) {
    std::vector<double> ph(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        ph[i] = std::arg(frames[i].bins[bin]);
    }
    for (std::size_t i = 1; i < ph.size(); ++i) {
        while (ph[i] - ph[i - 1] > M_PI) ph[i] -= kTwoPi;
        while (ph[i] - ph[i - 1] < -M_PI) ph[i] += kTwoPi;
    }
    double mean = 0.0;
    for (double p : ph) mean += p;
    mean /= double(ph.size());
    double var = 0.0;
    for (double p : ph) var += (p - mean) * (p - mean);
    return var / double(ph.size());
}

double mean_power_at(const std::vector<FrameSpectrum>& frames, std::size_t bin) {
    double acc = 0.0;
    for (const auto& f : frames) {
        acc += std::norm(f.bins[bin]);
    }
    return acc / double(frames.size());
}

}  // namespace

TEST_CASE("static cancellation clears clutter bins and keeps the mover") {
    const CancellationRun run = make_cancellation_run(404);

    SUBCASE("frame minus itself is zero") {
        Template tmpl;
        tmpl.mean_spectrum = run.raw[0].bins;
        tmpl.frames_averaged = 1;
        const FrameSpectrum residual = cancel_static(run.raw[0], tmpl);
        for (const auto& b : residual.bins) {
            CHECK(std::abs(b) == 0.0);
        }
    }

    SUBCASE("clutter bins drop by at least 30 dB") {
        for (std::size_t bin : run.static_bins) {
            const double before = mean_power_at(run.raw, bin);
            const double after = mean_power_at(run.residual, bin);
            CHECK(10.0 * std::log10(before / after) > 30.0);
        }
    }

    SUBCASE("mover bin keeps its phase modulation") {
        const double raw_var = phase_var_at(run.raw, run.mover_bin);
        const double res_var = phase_var_at(run.residual, run.mover_bin);
        CHECK(res_var > 0.9 * raw_var);
    }

    SUBCASE("subtraction is linear") {
        Template tmpl;
        tmpl.mean_spectrum = run.raw[1].bins;
        tmpl.frames_averaged = 1;
        const FrameSpectrum r0 = cancel_static(run.raw[0], tmpl);
        const FrameSpectrum r2 = cancel_static(run.raw[2], tmpl);
        // residual(f0 + f2 against 2 * template) == residual(f0) + residual(f2)
        FrameSpectrum sum = run.raw[0];
        for (std::size_t k = 0; k < sum.bins.size(); ++k) {
            sum.bins[k] += run.raw[2].bins[k];
        }
        Template dbl;
        dbl.frames_averaged = 1;
        dbl.mean_spectrum = tmpl.mean_spectrum;
        for (auto& b : dbl.mean_spectrum) {
            b *= 2.0;
        }
        const FrameSpectrum lhs = cancel_static(sum, dbl);
        for (std::size_t k = 0; k < lhs.bins.size(); ++k) {
            CHECK(std::abs(lhs.bins[k] - (r0.bins[k] + r2.bins[k])) < 1e-9);
        }
    }

    SUBCASE("bin-count mismatch raises") {
        Template bad;
        bad.mean_spectrum.assign(3, {0.0, 0.0});
        bad.frames_averaged = 1;
        CHECK_THROWS_AS(cancel_static(run.raw[0], bad), std::invalid_argument);
    }
}

TEST_CASE("select_bin lands on the mover") {
    const CancellationRun run = make_cancellation_run(808);
    const BinSelection sel = select_bin(run.residual);
    CHECK(sel.bin == run.mover_bin);
    CHECK_FALSE(sel.low_confidence);

    SUBCASE("global phase rotation does not change the pick") {
        std::vector<FrameSpectrum> rotated = run.residual;
        const std::complex<double> rot = std::polar(1.0, 1.234);
        for (auto& f : rotated) {
            for (auto& b : f.bins) {
                b *= rot;
            }
        }
        CHECK(select_bin(rotated).bin == sel.bin);
    }

    SUBCASE("fewer than two frames raises") {
        std::vector<FrameSpectrum> one(run.residual.begin(), run.residual.begin() + 1);
        CHECK_THROWS_AS(select_bin(one), std::invalid_argument);
    }
}

TEST_CASE("all-static scene with noise is flagged low confidence") {
    PipelineConfig cfg;
    cfg.use_highpass = false;
    cfg.sync_enabled = false;
    Scene statics;
    statics.seed = 31415;
    statics.reflectors.push_back(Reflector::static_path(1.2e-3, 0.7));
    statics.reflectors.push_back(Reflector::static_path(2.6e-3, 0.5));
    statics.ambient_noise = NoiseSpec{25.0, 100.0, 20000.0};

    const Template tmpl = capture_template(statics, cfg, 8);
    Scene session = statics;
    session.seed = 27182;  // different noise draw than the template
    const SampleBuffer tx = synthesize_stream(cfg.chirp, 24);
    const SampleBuffer rx = propagate(session, tx);
    std::vector<FrameSpectrum> frames = frame_spectra(rx, cfg);
    for (auto& f : frames) {
        f = cancel_static(f, tmpl);
    }
    const BinSelection sel = select_bin(frames);
    CHECK(sel.low_confidence);
}

TEST_CASE("capture_template basics") {
    PipelineConfig cfg;
    cfg.use_highpass = false;
    cfg.sync_enabled = false;
    Scene statics;
    statics.reflectors.push_back(Reflector::static_path(1.0e-3, 0.6));
    statics.reflectors.push_back(Reflector::static_path(2.2e-3, 0.4));

    SUBCASE("one frame equals that frame's spectrum") {
        const Template tmpl = capture_template(statics, cfg, 1);
        const SampleBuffer tx = synthesize_stream(cfg.chirp, 2);
        const SampleBuffer rx = propagate(statics, tx);
        const auto frames = frame_spectra(rx, cfg);
        REQUIRE(tmpl.mean_spectrum.size() == frames[0].bins.size());
        for (std::size_t k = 0; k < tmpl.mean_spectrum.size(); ++k) {
            CHECK(std::abs(tmpl.mean_spectrum[k] - frames[0].bins[k]) < 1e-12);
        }
    }

    SUBCASE("static noiseless frames are identical") {
        const SampleBuffer tx = synthesize_stream(cfg.chirp, 8);
        const SampleBuffer rx = propagate(statics, tx);
        const auto frames = frame_spectra(rx, cfg);
        for (std::size_t k = 0; k < frames[0].bins.size(); ++k) {
            std::complex<double> mean{0, 0};
            for (const auto& f : frames) {
                mean += f.bins[k];
            }
            mean /= double(frames.size());
            double var = 0.0;
            for (const auto& f : frames) {
                var += std::norm(f.bins[k] - mean);
            }
            CHECK(var / double(frames.size()) < 1e-9);
        }
    }

    SUBCASE("averaging shrinks the template noise by sqrt(n)") {
        Scene noisy = statics;
        noisy.ambient_noise = NoiseSpec{10.0, 100.0, 20000.0};

        // Single-frame std per bin from one long run.
        noisy.seed = 555;
        const SampleBuffer tx = synthesize_stream(cfg.chirp, 128);
        const SampleBuffer rx = propagate(noisy, tx);
        const auto frames = frame_spectra(rx, cfg);
        const std::size_t n_bins = frames[0].bins.size();
        std::vector<double> single_var(n_bins, 0.0);
        for (std::size_t k = 0; k < n_bins; ++k) {
            std::complex<double> mean{0, 0};
            for (const auto& f : frames) mean += f.bins[k];
            mean /= double(frames.size());
            for (const auto& f : frames) single_var[k] += std::norm(f.bins[k] - mean);
            single_var[k] /= double(frames.size());
        }

        // Template spread over independent 64-frame captures.
        const int runs = 24;
        std::vector<std::vector<std::complex<double>>> templates;
        for (int r = 0; r < runs; ++r) {
            noisy.seed = 1000 + static_cast<std::uint64_t>(r);
            templates.push_back(capture_template(noisy, cfg, 64).mean_spectrum);
        }
        std::vector<double> ratio;
        for (std::size_t k = 0; k < n_bins; ++k) {
            if (single_var[k] < 1e-12) {
                continue;  // out-of-band bin, no noise
            }
            std::complex<double> mean{0, 0};
            for (const auto& t : templates) mean += t[k];
            mean /= double(runs);
            double var = 0.0;
            for (const auto& t : templates) var += std::norm(t[k] - mean);
            var /= double(runs);
            ratio.push_back(std::sqrt(var / single_var[k]) * 8.0);
        }
        REQUIRE(!ratio.empty());
        std::sort(ratio.begin(), ratio.end());
        const double med = ratio[ratio.size() / 2];
        CHECK(med > 0.7);
        CHECK(med < 1.3);
    }
}

TEST_CASE("extract_features") {
    const CancellationRun run = make_cancellation_run(4242);

    SUBCASE("constant frames give zero differences") {
        std::vector<FrameSpectrum> frames(5, run.residual[0]);
        const auto rows = extract_features(frames, run.mover_bin, 0.070);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].d_amplitude == 0.0);
            CHECK(rows[i].d_phase == 0.0);
        }
        CHECK(rows[0].d_amplitude == 0.0);
        CHECK(rows[0].d_phase == 0.0);
    }

    SUBCASE("amplitude ignores a global phase rotation") {
        std::vector<FrameSpectrum> rotated = run.residual;
        for (auto& f : rotated) {
            for (auto& b : f.bins) {
                b *= std::polar(1.0, 0.777);
            }
        }
        const auto a = extract_features(run.residual, run.mover_bin, 0.070);
        const auto b = extract_features(rotated, run.mover_bin, 0.070);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].amplitude == doctest::Approx(b[i].amplitude).epsilon(1e-12));
        }
    }

    SUBCASE("unwrapped phase steps stay below pi") {
        const auto rows = extract_features(run.residual, run.mover_bin, 0.070);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].d_phase < M_PI);
        }
    }

    SUBCASE("a single blink pulse yields one prominent d_phase burst") {
        PipelineConfig cfg;
        cfg.use_highpass = false;
        cfg.sync_enabled = false;
        const double frame_s = cfg.chirp.frame_seconds();
        Scene scene;
        Reflector face;
        // Delay steps up for exactly one frame near t = 12 frames.
        face.delay = Trajectory::pulse(1.8e-3, 40e-6, 12.0 * frame_s, 13.0 * frame_s);
        face.attenuation = Trajectory::constant(0.7);
        scene.reflectors.push_back(face);

        const SampleBuffer tx = synthesize_stream(cfg.chirp, 32);
        const SampleBuffer rx = propagate(scene, tx);
        const auto frames = frame_spectra(rx, cfg);
        const BinSelection sel = select_bin(frames);
        const auto rows = extract_features(frames, sel.bin, frame_s);

        std::vector<double> dphase;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            dphase.push_back(rows[i].d_phase);
        }
        std::vector<double> sorted = dphase;
        std::sort(sorted.begin(), sorted.end());
        const double med = sorted[sorted.size() / 2];
        // Count contiguous runs above 5x the median: the pulse edge in and
        // out lands in adjacent rows, one burst total.
        int bursts = 0;
        bool in_burst = false;
        for (double d : dphase) {
            const bool hot = d > 5.0 * med;
            if (hot && !in_burst) {
                ++bursts;
            }
            in_burst = hot;
        }
        CHECK(bursts == 1);
    }
}

TEST_CASE("range resolution") {
    CHECK(range_resolution(3000.0, 343.0) == doctest::Approx(0.05716667).epsilon(1e-6));
    // Matches the published 5.6 cm within 3%.
    CHECK(std::abs(range_resolution(3000.0, 343.0) - 0.056) / 0.056 < 0.03);
    CHECK(range_resolution(6000.0, 343.0) ==
          doctest::Approx(range_resolution(3000.0, 343.0) / 2.0));
    CHECK(range_resolution(1.0, 343.0) == doctest::Approx(171.5));
    CHECK_THROWS_AS(range_resolution(0.0, 343.0), std::invalid_argument);
}

TEST_CASE("template JSON round trip") {
    Template tmpl;
    tmpl.frames_averaged = 4;
    tmpl.bin_resolution_hz = 21.533203125;
    tmpl.mean_spectrum = {{1.5, -2.25}, {0.0, 0.125}, {-3.75, 0.0}};
    const Template back = template_from_json(template_to_json(tmpl));
    CHECK(back.frames_averaged == 4);
    CHECK(back.bin_resolution_hz == tmpl.bin_resolution_hz);
    REQUIRE(back.mean_spectrum.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.mean_spectrum[i] == tmpl.mean_spectrum[i]);
    }
}
