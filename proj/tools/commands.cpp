#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "chirpsense/channel.hpp"
#include "chirpsense/csv.hpp"
#include "chirpsense/engagement.hpp"
#include "chirpsense/features_io.hpp"
#include "chirpsense/ml.hpp"
#include "chirpsense/sus.hpp"
#include "chirpsense/wav.hpp"

namespace chirpsense::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) {
        fs::create_directories(dir);
    }
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << text;
}

json metrics_to_json(const ml::Metrics& m) {
    json j;
    j["accuracy"] = m.accuracy;
    j["total"] = m.total;
    j["confusion"] = m.confusion;
    json per_class = json::object();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        per_class[to_string(static_cast<ExpressionLabel>(k))] = {
            {"precision", m.precision[k]},
            {"recall", m.recall[k]},
            {"f1", m.f1[k]}};
    }
    j["per_class"] = per_class;
    return j;
}

}  // namespace

void apply_config_file(Options& opt) {
    if (opt.config_path.empty()) {
        return;
    }
    std::ifstream f(opt.config_path);
    if (!f) {
        throw std::runtime_error("cannot open config: " + opt.config_path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    const json j = json::parse(ss.str());

    if (j.contains("seed")) opt.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) opt.out = j["out"].get<std::string>();
    if (j.contains("scene")) opt.scene_path = j["scene"].get<std::string>();
    if (j.contains("split")) opt.split = j["split"].get<std::string>();
    if (j.contains("genre")) opt.genre = j["genre"].get<std::string>();
    if (j.contains("length_min")) opt.length_min = j["length_min"].get<double>();
    if (j.contains("frames")) opt.frames = j["frames"].get<std::size_t>();
    if (j.contains("pipeline")) {
        const json& p = j["pipeline"];
        if (p.contains("n_fft")) opt.n_fft = p["n_fft"].get<std::size_t>();
        if (p.contains("calib_sec")) opt.calib_sec = p["calib_sec"].get<double>();
        if (p.contains("cancel")) opt.no_cancel = !p["cancel"].get<bool>();
        if (p.contains("highpass")) opt.no_highpass = !p["highpass"].get<bool>();
        if (p.contains("sync")) opt.no_sync = !p["sync"].get<bool>();
        if (p.contains("hann_window")) opt.hann_window = p["hann_window"].get<bool>();
        if (p.contains("feature_window"))
            opt.feature_window = p["feature_window"].get<std::size_t>();
    }
}

PipelineConfig pipeline_config(const Options& opt) {
    PipelineConfig cfg;
    cfg.n_fft = opt.n_fft;
    cfg.cancellation = !opt.no_cancel;
    cfg.use_highpass = !opt.no_highpass;
    cfg.sync_enabled = !opt.no_sync;
    cfg.window = opt.hann_window ? WindowKind::Hann : WindowKind::Rectangular;
    cfg.calib_sec = opt.calib_sec;
    cfg.feature_window = opt.feature_window;
    return cfg;
}

int cmd_synth(const Options& opt) {
    if (opt.frames == 0) {
        throw std::invalid_argument("--frames must be at least 1");
    }
    const PipelineConfig cfg = pipeline_config(opt);
    const SampleBuffer stream = synthesize_stream(cfg.chirp, opt.frames);
    const std::string path = opt.out.empty() ? "chirps.wav" : opt.out;
    if (!fs::path(path).parent_path().empty()) {
        fs::create_directories(fs::path(path).parent_path());
    }
    const std::size_t clipped = write_wav(path, stream);
    std::cout << "wrote " << path << ": " << opt.frames << " frames, "
              << stream.size() << " samples, chirp rate "
              << format_double(cfg.chirp.chirp_rate()) << " Hz/s\n";
    if (clipped > 0) {
        std::cerr << "warning: " << clipped << " samples clipped\n";
    }
    return 0;
}

int cmd_simulate(const Options& opt) {
    if (opt.scene_path.empty()) {
        throw std::invalid_argument("simulate needs --scene");
    }
    if (opt.frames == 0) {
        throw std::invalid_argument("--frames must be at least 1");
    }
    Scene scene = load_scene(opt.scene_path);
    if (opt.seed != 0) {
        scene.seed = opt.seed;
    }
    const PipelineConfig cfg = pipeline_config(opt);
    ensure_dir(opt.out);

    const SampleBuffer tx = synthesize_stream(cfg.chirp, opt.frames);
    const SampleBuffer rx = propagate(scene, tx);
    write_wav(join(opt.out, "rx.wav"), rx);
    if (!opt.tx_out.empty()) {
        write_wav(opt.tx_out, tx);
    } else {
        write_wav(join(opt.out, "tx.wav"), tx);
    }

    // Ground truth: per-frame expression (when an AU path is present) and
    // the state of every reflector at the frame center.
    std::string expression;
    for (const Reflector& r : scene.reflectors) {
        try {
            label_from_string(r.name);
            expression = r.name;
            break;
        } catch (const std::invalid_argument&) {
        }
    }
    json truth;
    truth["version"] = 1;
    truth["seed"] = scene.seed;
    truth["frame_seconds"] = cfg.chirp.frame_seconds();
    truth["frames"] = opt.frames;
    json frames = json::array();
    for (std::size_t f = 0; f < opt.frames; ++f) {
        const double t = (double(f) + 0.5) * cfg.chirp.frame_seconds();
        json fj;
        fj["index"] = f;
        fj["time_s"] = t;
        fj["expression"] = expression.empty() ? json(nullptr) : json(expression);
        json refl = json::array();
        for (const Reflector& r : scene.reflectors) {
            refl.push_back({{"name", r.name},
                            {"delay_s", r.delay.at(t)},
                            {"attenuation", r.attenuation.at(t)}});
        }
        fj["reflectors"] = refl;
        frames.push_back(fj);
    }
    truth["per_frame"] = frames;
    write_text(join(opt.out, "truth.json"), truth.dump(2) + "\n");

    std::cout << "wrote " << join(opt.out, "rx.wav") << " (" << rx.size()
              << " samples) and truth.json\n";
    return 0;
}

int cmd_pipeline(const Options& opt) {
    if (opt.rx_path.empty()) {
        throw std::invalid_argument("pipeline needs --rx");
    }
    PipelineConfig cfg = pipeline_config(opt);
    ensure_dir(opt.out);

    std::optional<Template> tmpl;
    if (cfg.cancellation) {
        if (!opt.template_path.empty()) {
            tmpl = load_template(opt.template_path);
        } else if (!opt.template_scene_path.empty()) {
            const Scene background = load_scene(opt.template_scene_path);
            tmpl = capture_template(background, cfg, cfg.template_frames);
            save_template(join(opt.out, "template.json"), *tmpl);
        } else {
            throw std::invalid_argument(
                "cancellation enabled: pass --template/--template-scene or --no-cancel");
        }
    }

    const SampleBuffer rx = read_wav(opt.rx_path);
    const PipelineResult result = run_pipeline(rx, tmpl, cfg);

    write_features_csv(join(opt.out, "features.csv"), result.features,
                       result.selection.bin);

    json report;
    report["selected_bin"] = result.selection.bin;
    report["low_confidence"] = result.selection.low_confidence;
    report["phase_variance"] = result.selection.phase_variance;
    report["power_ratio"] = result.selection.power_ratio;
    report["sync_offset"] = result.sync_offset;
    report["bin_resolution_hz"] = result.bin_resolution_hz;
    report["frames"] = result.features.size();
    write_text(join(opt.out, "report.json"), report.dump(2) + "\n");

    for (const auto& t : result.timings) {
        std::cerr << "stage " << t.stage << ": " << t.seconds * 1e3 << " ms\n";
    }
    std::cout << "selected bin " << result.selection.bin << " ("
              << format_double(double(result.selection.bin) * result.bin_resolution_hz)
              << " Hz)" << (result.selection.low_confidence ? " [low confidence]" : "")
              << ", features: " << result.features.size() << " rows\n";
    return 0;
}

int cmd_train(const Options& opt) {
    if (opt.features_path.empty()) {
        throw std::invalid_argument("train needs --features");
    }
    const ml::Dataset data = read_labeled_dataset(opt.features_path);

    ml::EnsembleConfig cfg;
    cfg.seed = opt.seed;
    cfg.logreg.l2 = opt.l2;
    cfg.forest.n_trees = opt.trees;
    cfg.forest.max_depth = opt.max_depth;

    const ml::EnsembleModel model = ml::train(data, cfg);
    const std::string path = opt.model_out.empty() ? "model.json" : opt.model_out;
    if (!fs::path(path).parent_path().empty()) {
        fs::create_directories(fs::path(path).parent_path());
    }
    ml::save_model(path, model);

    const ml::Metrics m = ml::evaluate(model, data);
    std::cout << "trained on " << data.size() << " rows, training accuracy "
              << format_double(m.accuracy) << ", model written to " << path << "\n";
    return 0;
}

int cmd_predict(const Options& opt) {
    if (opt.model_path.empty() || opt.features_path.empty()) {
        throw std::invalid_argument("predict needs --model and --features");
    }
    const ml::EnsembleModel model = ml::load_model(opt.model_path);
    const auto rows = read_features_csv(opt.features_path);
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        labels[i] = ml::predict(model, {rows[i].amplitude, rows[i].phase});
    }
    const std::string path = opt.out.empty() ? "predictions.csv" : opt.out;
    if (!fs::path(path).parent_path().empty()) {
        fs::create_directories(fs::path(path).parent_path());
    }
    write_predictions_csv(path, rows, labels);
    std::cout << "wrote " << labels.size() << " predictions to " << path << "\n";
    return 0;
}

int cmd_eval(const Options& opt) {
    if (opt.features_path.empty()) {
        throw std::invalid_argument("eval needs --features");
    }
    const ml::Dataset data = read_labeled_dataset(opt.features_path);
    ensure_dir(opt.out);
    const std::string path = opt.out.empty() ? "metrics.json" : join(opt.out, "metrics.json");

    json j;
    if (!opt.model_path.empty()) {
        // Evaluate a fixed model on the whole file.
        const ml::EnsembleModel model = ml::load_model(opt.model_path);
        const ml::Metrics m = ml::evaluate(model, data);
        j = metrics_to_json(m);
        j["mode"] = "fixed_model";
        std::cout << "accuracy " << format_double(m.accuracy) << " on " << m.total
                  << " rows\n";
    } else {
        // Split-driven evaluation: train on each fold's training part.
        const ml::SplitMode mode = ml::split_mode_from_string(opt.split);
        const auto folds = ml::splits(data, mode, opt.seed);
        ml::EnsembleConfig cfg;
        cfg.seed = opt.seed;
        cfg.logreg.l2 = opt.l2;
        cfg.forest.n_trees = opt.trees;
        cfg.forest.max_depth = opt.max_depth;

        json fold_array = json::array();
        double acc_sum = 0.0;
        for (const auto& fold : folds) {
            const ml::Dataset train_set = ml::subset(data, fold.train_idx);
            const ml::Dataset test_set = ml::subset(data, fold.test_idx);
            const ml::EnsembleModel model = ml::train(train_set, cfg);
            const ml::Metrics m = ml::evaluate(model, test_set);
            json fj = metrics_to_json(m);
            fj["train_rows"] = fold.train_idx.size();
            fj["test_rows"] = fold.test_idx.size();
            if (!fold.held_out_session.empty()) {
                fj["held_out_session"] = fold.held_out_session;
            }
            fold_array.push_back(fj);
            acc_sum += m.accuracy;
        }
        j["mode"] = ml::to_string(mode);
        j["folds"] = fold_array;
        j["mean_accuracy"] = acc_sum / double(folds.size());
        std::cout << ml::to_string(mode) << " mean accuracy "
                  << format_double(acc_sum / double(folds.size())) << " over "
                  << folds.size() << " fold(s)\n";
    }
    write_text(path, j.dump(2) + "\n");
    return 0;
}

int cmd_engage(const Options& opt) {
    if (opt.predictions_path.empty()) {
        throw std::invalid_argument("engage needs --predictions");
    }
    const std::vector<int> labels = read_predictions_csv(opt.predictions_path);
    const GenreId genre = genre_from_string(opt.genre);
    const SessionStats stats = session_stats(labels, opt.length_min);
    const EngagementReport report = engagement_report(stats, genre);

    const std::string text = report_to_json(report, stats, genre);
    const std::string path =
        opt.out.empty() ? "engagement.json" : (fs::is_directory(opt.out)
                                                   ? join(opt.out, "engagement.json")
                                                   : opt.out);
    write_text(path, text);
    std::cout << text;
    return 0;
}

int cmd_sus(const Options& opt) {
    if (opt.responses_path.empty()) {
        throw std::invalid_argument("sus needs --responses");
    }
    const auto records = read_sus_csv(opt.responses_path);
    const SusSummary summary = aggregate(records);
    const std::string text = summary_to_json(summary);
    const std::string path =
        opt.out.empty() ? "sus.json" : (fs::is_directory(opt.out)
                                            ? join(opt.out, "sus.json")
                                            : opt.out);
    write_text(path, text);
    std::cout << "mean SUS " << format_double(summary.mean) << " over "
              << summary.count << " responses\n";
    return 0;
}

}  // namespace chirpsense::cli
