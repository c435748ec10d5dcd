#include <doctest.h>

#include <cmath>

#include "chirpsense/chirp.hpp"
#include "chirpsense/dsp.hpp"
#include "chirpsense/random.hpp"

using namespace chirpsense;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ChirpConfig default_cfg() {
    return ChirpConfig{};  // 16-19 kHz, 40 ms + 30 ms, 44100 Hz
}

}  // namespace

TEST_CASE("instantaneous frequency is affine with slope c") {
    const ChirpConfig cfg = default_cfg();
    CHECK(cfg.chirp_rate() == doctest::Approx(75000.0));
    CHECK(instantaneous_frequency(cfg, 0.0) == doctest::Approx(16000.0));
    CHECK(instantaneous_frequency(cfg, 0.040) == doctest::Approx(19000.0));
    CHECK(instantaneous_frequency(cfg, 0.020) == doctest::Approx(17500.0));

    // Affine identity at random interior points.
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(0.0, cfg.duration_t);
        CHECK(instantaneous_frequency(cfg, t) ==
              doctest::Approx(16000.0 + 75000.0 * t).epsilon(1e-12));
    }

    CHECK_THROWS_AS(instantaneous_frequency(cfg, -1e-9), std::domain_error);
    CHECK_THROWS_AS(instantaneous_frequency(cfg, 0.040 + 1e-9), std::domain_error);
}

TEST_CASE("instantaneous phase follows the integral form") {
    ChirpConfig cfg = default_cfg();
    CHECK(instantaneous_phase(cfg, 0.0) == doctest::Approx(0.0));

    cfg.phi_min = 1.5;
    CHECK(instantaneous_phase(cfg, 0.0) == doctest::Approx(1.5));

    cfg.phi_min = 0.0;
    // t = 1 ms: 2*pi*(0.5*75000*1e-6 + 16000*0.001) = 2*pi*16.0375
    CHECK(instantaneous_phase(cfg, 0.001) ==
          doctest::Approx(kTwoPi * 16.0375).epsilon(1e-12));

    CHECK_THROWS_AS(instantaneous_phase(cfg, 1.0), std::domain_error);
}

TEST_CASE("phase derivative reproduces the frequency law") {
    const ChirpConfig cfg = default_cfg();
    Rng rng(11);
    const double h = 4e-6;
    for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform(h, cfg.duration_t - h);
        const double dphi =
            (instantaneous_phase(cfg, t + h) - instantaneous_phase(cfg, t - h)) / (2.0 * h);
        const double expected = kTwoPi * instantaneous_frequency(cfg, t);
        CHECK(std::abs(dphi - expected) / expected < 1e-6);
    }
}

TEST_CASE("synthesize_chirp sample grid and determinism") {
    const ChirpConfig cfg = default_cfg();
    const SampleBuffer buf = synthesize_chirp(cfg);
    CHECK(buf.size() == 1764);   // 0.040 * 44100
    CHECK(buf.samples[0] == 0.0);  // sin(phi_min) with phi_min = 0

    const SampleBuffer again = synthesize_chirp(cfg);
    CHECK(buf.samples == again.samples);

    for (double s : buf.samples) {
        CHECK(std::isfinite(s));
        CHECK(std::abs(s) <= 1.0);
    }
}

TEST_CASE("instantaneous frequency recovered from the synthesized buffer") {
    // Finite differences of the analytic-signal phase against the frequency
    // law, over the middle 90% of the frame.
    const ChirpConfig cfg = default_cfg();
    const SampleBuffer buf = synthesize_chirp(cfg);
    const auto a = analytic(buf);

    std::vector<double> phase(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        phase[i] = std::arg(a[i]);
    }
    // unwrap
    for (std::size_t i = 1; i < phase.size(); ++i) {
        while (phase[i] - phase[i - 1] > M_PI) phase[i] -= kTwoPi;
        while (phase[i] - phase[i - 1] < -M_PI) phase[i] += kTwoPi;
    }
    const std::size_t lo = buf.size() / 20;
    const std::size_t hi = buf.size() - buf.size() / 20;
    for (std::size_t n = lo; n < hi; ++n) {
        const double f_est =
            (phase[n + 1] - phase[n - 1]) * cfg.sample_rate / (2.0 * kTwoPi);
        const double f_true = instantaneous_frequency(cfg, double(n) / cfg.sample_rate);
        CHECK(std::abs(f_est - f_true) / f_true < 0.01);
    }
}

TEST_CASE("synthesize_frame appends exact silence") {
    ChirpConfig cfg = default_cfg();
    const SampleBuffer frame = synthesize_frame(cfg);
    CHECK(frame.size() == 3087);  // 1764 + 1323
    for (std::size_t i = 1764; i < frame.size(); ++i) {
        CHECK(frame.samples[i] == 0.0);
    }

    // Zero silence: frame equals the bare chirp.
    cfg.silence_t = 0.0;
    const SampleBuffer no_sil = synthesize_frame(cfg);
    CHECK(no_sil.samples == synthesize_chirp(cfg).samples);

    // Silence adds no energy.
    const SampleBuffer chirp = synthesize_chirp(default_cfg());
    double e_chirp = 0.0, e_frame = 0.0;
    for (double s : chirp.samples) e_chirp += s * s;
    for (double s : frame.samples) e_frame += s * s;
    CHECK(e_chirp == e_frame);
}

TEST_CASE("stream is the frame tiled") {
    const ChirpConfig cfg = default_cfg();
    const SampleBuffer stream = synthesize_stream(cfg, 3);
    const SampleBuffer frame = synthesize_frame(cfg);
    REQUIRE(stream.size() == 3 * frame.size());
    for (std::size_t f = 0; f < 3; ++f) {
        for (std::size_t i = 0; i < frame.size(); ++i) {
            CHECK(stream.samples[f * frame.size() + i] == frame.samples[i]);
        }
    }
}

TEST_CASE("config validation") {
    ChirpConfig cfg = default_cfg();
    cfg.f_min_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.f_max_hz = cfg.f_min_hz;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.f_max_hz = 23000.0;  // above Nyquist
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.duration_t = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("pcm16 round trip") {
    SampleBuffer buf;
    buf.samples = {0.0, 1.0, -1.0, 0.5};
    Pcm16Buffer pcm = quantize_pcm16(buf);
    CHECK(pcm.codes[0] == 0);
    CHECK(pcm.codes[1] == 32767);
    CHECK(pcm.codes[2] == -32767);  // symmetric encoding
    CHECK(pcm.clipped == 0);

    const SampleBuffer back = dequantize_pcm16(pcm);
    CHECK(back.samples[0] == 0.0);
    CHECK(std::abs(back.samples[1] - 1.0) <= 1.0 / 32767.0);
    CHECK(std::abs(back.samples[2] + 1.0) <= 1.0 / 32767.0);

    // Random buffer: worst-case round-trip error 1/32767.
    Rng rng(3);
    SampleBuffer rand_buf;
    rand_buf.samples.resize(4096);
    for (double& s : rand_buf.samples) {
        s = rng.uniform(-1.0, 1.0);
    }
    const SampleBuffer rt = dequantize_pcm16(quantize_pcm16(rand_buf));
    for (std::size_t i = 0; i < rand_buf.size(); ++i) {
        CHECK(std::abs(rt.samples[i] - rand_buf.samples[i]) <= 1.0 / 32767.0);
    }

    // Out-of-range samples clip and are counted.
    SampleBuffer hot;
    hot.samples = {1.5, -2.0, 0.25};
    Pcm16Buffer clipped = quantize_pcm16(hot);
    CHECK(clipped.clipped == 2);
    CHECK(clipped.codes[0] == 32767);
    CHECK(clipped.codes[1] == -32767);
}
