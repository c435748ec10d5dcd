#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "chirpsense/channel.hpp"
#include "chirpsense/csv.hpp"
#include "chirpsense/engagement.hpp"
#include "chirpsense/features_io.hpp"
#include "chirpsense/ml.hpp"
#include "chirpsense/random.hpp"
#include "commands.hpp"

namespace chirpsense::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSessions = 3;
constexpr std::size_t kFramesPerRecording = 64;
constexpr std::size_t kTemplateFrames = 16;

// One sample of delay at 44.1 kHz is 22.68 us; the face sits near 53 samples
// (1.2 ms) so its beat lands around bin 4 and the class phase offsets below
// stay inside one branch of (-pi, pi].
constexpr double kFaceDelay = 53.0 / 44100.0;

struct FaceDesign {
    double delay_offset_s;
    double delay_swing_s;
    double attenuation_base;
    double attenuation_swing;
    double tempo_hz;
};

// Class geometry in (amplitude, phase): sad and happy share the face delay
// and separate by attenuation; angry and surprise separate by phase via
// distinct delay offsets and swings.
FaceDesign face_design(ExpressionLabel expr) {
    switch (expr) {
        case ExpressionLabel::Happy:
            return {0.0, 20e-6, 0.80, 0.14, 1.6};
        case ExpressionLabel::SadNeutral:
            return {0.0, 8e-6, 0.55, 0.10, 1.2};
        case ExpressionLabel::Angry:
            return {+14e-6, 12e-6, 0.70, 0.10, 1.9};
        case ExpressionLabel::Surprise:
            return {-16e-6, 10e-6, 0.68, 0.10, 1.4};
    }
    return {0.0, 0.0, 0.6, 0.0, 1.0};
}

Scene background_scene(int session, std::uint64_t seed) {
    Scene scene;
    scene.seed = seed;
    scene.reflectors.push_back(Reflector::static_path(0.0, 0.9, "direct"));
    scene.reflectors.push_back(Reflector::static_path(2.6e-3, 0.45, "wall"));
    scene.reflectors.push_back(
        Reflector::static_path(3.4e-3 + 40e-6 * session, 0.30, "desk"));
    scene.ambient_noise = NoiseSpec{25.0, 100.0, 15000.0};
    return scene;
}

Scene recording_scene(int session, ExpressionLabel expr, std::uint64_t seed, Rng& jitter) {
    Scene scene = background_scene(session, seed);
    const FaceDesign d = face_design(expr);

    AuTrajectoryParams p;
    p.expression = expr;
    p.base_delay_s = kFaceDelay + d.delay_offset_s + jitter.uniform(-1.5e-6, 1.5e-6);
    p.delay_swing_s = d.delay_swing_s;
    p.attenuation_base = d.attenuation_base + jitter.uniform(-0.015, 0.015);
    p.attenuation_swing = d.attenuation_swing;
    p.tempo_hz = d.tempo_hz * jitter.uniform(0.95, 1.05);
    p.phase0 = jitter.uniform(0.0, 6.283185307179586);
    scene.reflectors.push_back(au_trajectory(p));
    return scene;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << text;
}

}  // namespace

int cmd_demo(const Options& opt) {
    const std::string out = opt.out.empty() ? "demo_out" : opt.out;
    fs::create_directories(out);
    const auto join = [&](const std::string& name) {
        return (fs::path(out) / name).string();
    };

    PipelineConfig cfg = pipeline_config(opt);
    cfg.template_frames = kTemplateFrames;
    Rng root(opt.seed);

    // Simulate 3 sessions x 4 expressions and extract labeled features.
    ml::Dataset data;
    CsvTable combined;
    combined.header = {"frame_index", "time_s", "bin_index", "amplitude",
                       "phase",       "d_amplitude", "d_phase",   "label", "session"};
    json recordings = json::array();
    std::vector<std::vector<int>> truth_by_recording;
    std::vector<std::vector<FrameFeatures>> rows_by_recording;
    std::vector<std::string> session_of_recording;

    for (int session = 0; session < kSessions; ++session) {
        const std::string session_name = "s" + std::to_string(session + 1);
        Rng session_rng = root.fork(std::uint64_t(session) + 1);
        const Scene background = background_scene(session, session_rng.next_u64());
        const Template tmpl = capture_template(background, cfg, cfg.template_frames);

        for (ExpressionLabel expr : all_labels()) {
            Rng jitter = session_rng.fork(static_cast<std::uint64_t>(expr) + 17);
            const Scene scene =
                recording_scene(session, expr, jitter.next_u64(), jitter);

            const SampleBuffer tx = synthesize_stream(cfg.chirp, kFramesPerRecording);
            const SampleBuffer rx = propagate(scene, tx);
            const PipelineResult result = run_pipeline(rx, tmpl, cfg);

            for (const FrameFeatures& row : result.features) {
                data.x.push_back({row.amplitude, row.phase});
                data.y.push_back(static_cast<int>(expr));
                data.session.push_back(session_name);
                combined.rows.push_back({std::to_string(row.frame_index),
                                         format_double(row.time_s),
                                         std::to_string(result.selection.bin),
                                         format_double(row.amplitude),
                                         format_double(row.phase),
                                         format_double(row.d_amplitude),
                                         format_double(row.d_phase),
                                         to_string(expr), session_name});
            }
            recordings.push_back({{"session", session_name},
                                  {"expression", to_string(expr)},
                                  {"selected_bin", result.selection.bin},
                                  {"low_confidence", result.selection.low_confidence},
                                  {"sync_offset", result.sync_offset},
                                  {"rows", result.features.size()}});
            truth_by_recording.emplace_back(result.features.size(),
                                            static_cast<int>(expr));
            rows_by_recording.push_back(result.features);
            session_of_recording.push_back(session_name);
        }
    }
    write_csv(join("features_labeled.csv"), combined);
    write_text(join("recordings.json"), recordings.dump(2) + "\n");

    // Train on a stratified 4:1 split and evaluate the held-out rows.
    const auto folds = ml::splits(data, ml::SplitMode::Overall, opt.seed);
    const ml::Dataset train_set = ml::subset(data, folds[0].train_idx);
    const ml::Dataset test_set = ml::subset(data, folds[0].test_idx);

    ml::EnsembleConfig ens_cfg;
    ens_cfg.seed = opt.seed;
    const ml::EnsembleModel model = ml::train(train_set, ens_cfg);
    ml::save_model(join("model.json"), model);

    const ml::Metrics metrics = ml::evaluate(model, test_set);
    json mj;
    mj["accuracy"] = metrics.accuracy;
    mj["total"] = metrics.total;
    mj["confusion"] = metrics.confusion;
    json per_class = json::object();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        per_class[to_string(static_cast<ExpressionLabel>(k))] = {
            {"precision", metrics.precision[k]},
            {"recall", metrics.recall[k]},
            {"f1", metrics.f1[k]}};
    }
    mj["per_class"] = per_class;
    mj["train_rows"] = train_set.size();
    mj["test_rows"] = test_set.size();
    write_text(join("metrics.json"), mj.dump(2) + "\n");

    // A comedy viewing session: the model's prediction stream over the last
    // session's happy recording, scored against the comedy genre.
    const std::size_t comedy_recording =
        static_cast<std::size_t>((kSessions - 1) * kNumClasses) +
        static_cast<std::size_t>(ExpressionLabel::Happy);
    const auto& comedy_rows = rows_by_recording[comedy_recording];
    std::vector<int> stream_pred(comedy_rows.size());
    for (std::size_t i = 0; i < comedy_rows.size(); ++i) {
        stream_pred[i] =
            ml::predict(model, {comedy_rows[i].amplitude, comedy_rows[i].phase});
    }
    write_predictions_csv(join("predictions_comedy_session.csv"), comedy_rows,
                          stream_pred);
    const double length_min =
        double(comedy_rows.size()) * cfg.chirp.frame_seconds() / 60.0;
    const SessionStats stats = session_stats(stream_pred, length_min);
    const EngagementReport engagement = engagement_report(stats, GenreId::Comedy);
    write_text(join("engagement.json"),
               report_to_json(engagement, stats, GenreId::Comedy));

    // Self-checks; any failure flips the exit code to 2.
    std::size_t confusion_sum = 0;
    for (const auto& row : metrics.confusion) {
        for (std::size_t v : row) {
            confusion_sum += v;
        }
    }
    bool all_confident = true;
    for (const auto& r : recordings) {
        if (r.at("low_confidence").get<bool>()) {
            all_confident = false;
        }
    }
    const bool accuracy_ok = metrics.accuracy >= 0.90;
    const bool confusion_ok = confusion_sum == test_set.size();
    const bool engaged_ok =
        engagement.indicator.has_value() && *engagement.indicator;

    json summary;
    summary["seed"] = opt.seed;
    summary["rows"] = data.size();
    summary["accuracy"] = metrics.accuracy;
    summary["checks"] = {{"accuracy_at_least_0.90", accuracy_ok},
                         {"confusion_sums_to_test_rows", confusion_ok},
                         {"comedy_session_engaged", engaged_ok},
                         {"all_recordings_confident", all_confident}};
    const bool ok = accuracy_ok && confusion_ok && engaged_ok && all_confident;
    summary["ok"] = ok;
    write_text(join("demo_summary.json"), summary.dump(2) + "\n");

    std::cout << "demo: " << data.size() << " feature rows, held-out accuracy "
              << format_double(metrics.accuracy) << ", engagement "
              << (engaged_ok ? "true" : "false") << ", report in " << out << "\n";
    if (!ok) {
        std::cerr << "demo checks failed, see demo_summary.json\n";
        return 2;
    }
    return 0;
}

}  // namespace chirpsense::cli
