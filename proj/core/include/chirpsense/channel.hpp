#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chirpsense/chirp.hpp"
#include "chirpsense/label.hpp"

namespace chirpsense {

// Speed of sound in air, m/s, used when converting distances to delays.
inline constexpr double kSpeedOfSound = 343.0;

/// Scalar trajectory x(t). A small closed set of shapes keeps scenes
/// serializable; all of them are smooth in t except Pulse, which holds an
/// offset value over one interval.
struct Trajectory {
    enum class Kind { Constant, Sine, Pulse };

    Kind kind = Kind::Constant;
    double base = 0.0;
    double swing = 0.0;       // Sine amplitude or Pulse offset
    double tempo_hz = 0.0;    // Sine rate
    double phase0 = 0.0;      // Sine phase at t = 0
    double t_start = 0.0;     // Pulse interval [t_start, t_end)
    double t_end = 0.0;

    double at(double t) const;
    bool is_constant() const;

    static Trajectory constant(double value);
    static Trajectory sine(double base, double swing, double tempo_hz, double phase0 = 0.0);
    static Trajectory pulse(double base, double offset, double t_start, double t_end);
};

/// One propagation path: time-varying delay tau(t) seconds and attenuation
/// alpha(t) in [0, 1].
struct Reflector {
    Trajectory delay;
    Trajectory attenuation;
    std::string name;  // optional, carried into ground truth

    bool is_static() const { return delay.is_constant() && attenuation.is_constant(); }

    static Reflector static_path(double delay_s, double attenuation, std::string name = {});
};

/// Band-limited Gaussian noise at a target SNR relative to the clean signal.
struct NoiseSpec {
    double snr_db = 0.0;
    double band_lo_hz = 100.0;
    double band_hi_hz = 15000.0;
};

/// A full channel description. `seed` pins all randomness.
struct Scene {
    std::vector<Reflector> reflectors;
    std::optional<NoiseSpec> ambient_noise;       // typically below 16 kHz
    std::optional<NoiseSpec> out_of_band_noise;   // above 16 kHz, exercises the HPF
    std::uint64_t seed = 0;

    void validate() const;
};

/// Parameters for the synthetic facial reflector. The expression decides how
/// the available swing is split between delay and attenuation modulation.
struct AuTrajectoryParams {
    ExpressionLabel expression = ExpressionLabel::SadNeutral;
    double base_delay_s = 1.8e-3;
    double delay_swing_s = 0.0;
    double attenuation_base = 0.6;
    double attenuation_swing = 0.0;
    double tempo_hz = 1.5;
    double phase0 = 0.0;

    void validate() const;
};

// Builds the facial-path reflector for one expression class:
// happy is attenuation-dominant, surprise delay-dominant, angry mixed,
// sad/neutral near-constant.
Reflector au_trajectory(const AuTrajectoryParams& params);

// Eq.-style superposition: rx[n] = sum_p alpha_p(t_n) * tx(t_n - tau_p(t_n)),
// with fractional delays linearly interpolated and per-scene noise added
// afterwards. Deterministic for a fixed (scene, tx).
SampleBuffer propagate(const Scene& scene, const SampleBuffer& tx);

// Adds band-limited Gaussian noise at `snr_db` relative to buf's mean power.
// +infinity is the "no noise" sentinel; NaN or -infinity is an error.
SampleBuffer add_noise(const SampleBuffer& buf, double snr_db,
                       double band_lo_hz, double band_hi_hz, std::uint64_t seed);

// Scene JSON round-trip (schema documented in the README).
Scene scene_from_json(const std::string& text);
std::string scene_to_json(const Scene& scene);
Scene load_scene(const std::string& path);
void save_scene(const std::string& path, const Scene& scene);

}  // namespace chirpsense
