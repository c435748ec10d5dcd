#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chirpsense/channel.hpp"

namespace chirpsense {

using nlohmann::json;

namespace {

json trajectory_to_json(const Trajectory& tr) {
    switch (tr.kind) {
        case Trajectory::Kind::Constant:
            return json{{"kind", "constant"}, {"base", tr.base}};
        case Trajectory::Kind::Sine:
            return json{{"kind", "sine"},
                        {"base", tr.base},
                        {"swing", tr.swing},
                        {"tempo_hz", tr.tempo_hz},
                        {"phase0", tr.phase0}};
        case Trajectory::Kind::Pulse:
            return json{{"kind", "pulse"},
                        {"base", tr.base},
                        {"offset", tr.swing},
                        {"t_start", tr.t_start},
                        {"t_end", tr.t_end}};
    }
    throw std::logic_error("unhandled trajectory kind");
}

Trajectory trajectory_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        return Trajectory::constant(j.at("base").get<double>());
    }
    if (kind == "sine") {
        return Trajectory::sine(j.at("base").get<double>(), j.at("swing").get<double>(),
                                j.at("tempo_hz").get<double>(),
                                j.value("phase0", 0.0));
    }
    if (kind == "pulse") {
        return Trajectory::pulse(j.at("base").get<double>(), j.at("offset").get<double>(),
                                 j.at("t_start").get<double>(), j.at("t_end").get<double>());
    }
    throw std::runtime_error("unknown trajectory kind: " + kind);
}

Reflector reflector_from_json(const json& j) {
    const std::string kind = j.value("kind", "paths");
    if (kind == "static") {
        return Reflector::static_path(j.at("delay_s").get<double>(),
                                      j.at("attenuation").get<double>(),
                                      j.value("name", std::string{}));
    }
    if (kind == "au") {
        AuTrajectoryParams p;
        p.expression = label_from_string(j.at("expression").get<std::string>());
        p.base_delay_s = j.at("base_delay_s").get<double>();
        p.delay_swing_s = j.value("delay_swing_s", 0.0);
        p.attenuation_base = j.at("attenuation_base").get<double>();
        p.attenuation_swing = j.value("attenuation_swing", 0.0);
        p.tempo_hz = j.value("tempo_hz", 1.5);
        p.phase0 = j.value("phase0", 0.0);
        return au_trajectory(p);
    }
    Reflector r;
    r.delay = trajectory_from_json(j.at("delay"));
    r.attenuation = trajectory_from_json(j.at("attenuation"));
    r.name = j.value("name", std::string{});
    return r;
}

json noise_to_json(const NoiseSpec& spec) {
    return json{{"snr_db", spec.snr_db},
                {"band_hz", {spec.band_lo_hz, spec.band_hi_hz}}};
}

NoiseSpec noise_from_json(const json& j) {
    NoiseSpec spec;
    spec.snr_db = j.at("snr_db").get<double>();
    const auto& band = j.at("band_hz");
    spec.band_lo_hz = band.at(0).get<double>();
    spec.band_hi_hz = band.at(1).get<double>();
    return spec;
}

}  // namespace

Scene scene_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("scene JSON parse error: ") + e.what());
    }
    Scene scene;
    scene.seed = j.value("seed", std::uint64_t{0});
    for (const auto& rj : j.value("reflectors", json::array())) {
        scene.reflectors.push_back(reflector_from_json(rj));
    }
    if (j.contains("ambient_noise") && !j["ambient_noise"].is_null()) {
        scene.ambient_noise = noise_from_json(j["ambient_noise"]);
    }
    if (j.contains("out_of_band_noise") && !j["out_of_band_noise"].is_null()) {
        scene.out_of_band_noise = noise_from_json(j["out_of_band_noise"]);
    }
    scene.validate();
    return scene;
}

std::string scene_to_json(const Scene& scene) {
    json j;
    j["version"] = 1;
    j["seed"] = scene.seed;
    json refl = json::array();
    for (const Reflector& r : scene.reflectors) {
        json rj;
        rj["delay"] = trajectory_to_json(r.delay);
        rj["attenuation"] = trajectory_to_json(r.attenuation);
        if (!r.name.empty()) {
            rj["name"] = r.name;
        }
        refl.push_back(rj);
    }
    j["reflectors"] = refl;
    if (scene.ambient_noise) {
        j["ambient_noise"] = noise_to_json(*scene.ambient_noise);
    }
    if (scene.out_of_band_noise) {
        j["out_of_band_noise"] = noise_to_json(*scene.out_of_band_noise);
    }
    return j.dump(2) + "\n";
}

Scene load_scene(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open scene file: " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return scene_from_json(ss.str());
}

void save_scene(const std::string& path, const Scene& scene) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << scene_to_json(scene);
}

}  // namespace chirpsense
