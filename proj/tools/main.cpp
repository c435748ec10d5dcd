#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using chirpsense::cli::Options;

int main(int argc, char** argv) {
    CLI::App app{"Near-ultrasound FMCW sensing pipeline: chirp synthesis, channel "
                 "simulation, feature extraction, expression classification and "
                 "engagement scoring"};
    app.require_subcommand(1);

    Options opt;
    int (*handler)(const Options&) = nullptr;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "JSON config file");
        cmd->add_option("--seed", opt.seed, "random seed");
        cmd->add_option("--out", opt.out, "output file or directory");
    };
    const auto add_pipeline_opts = [&](CLI::App* cmd) {
        cmd->add_option("--n-fft", opt.n_fft, "FFT size (0 = next power of two)");
        cmd->add_option("--calib-sec", opt.calib_sec, "bin-selection window seconds");
        cmd->add_flag("--no-cancel", opt.no_cancel, "skip static cancellation");
        cmd->add_flag("--no-highpass", opt.no_highpass, "skip the high-pass filter");
        cmd->add_flag("--no-sync", opt.no_sync, "skip cross-correlation sync");
        cmd->add_flag("--hann", opt.hann_window, "Hann window instead of rectangular");
        cmd->add_option("--feature-window", opt.feature_window,
                        "average features over blocks of N frames");
    };

    auto* synth = app.add_subcommand("synth", "write a WAV of chirp frames");
    add_common(synth);
    synth->add_option("--frames", opt.frames, "number of frames");
    synth->callback([&] { handler = chirpsense::cli::cmd_synth; });

    auto* simulate = app.add_subcommand("simulate", "propagate chirps through a scene");
    add_common(simulate);
    simulate->add_option("--scene", opt.scene_path, "scene JSON")->required();
    simulate->add_option("--frames", opt.frames, "number of frames");
    simulate->add_option("--tx-out", opt.tx_out, "where to write the tx WAV");
    simulate->callback([&] { handler = chirpsense::cli::cmd_simulate; });

    auto* pipeline = app.add_subcommand("pipeline", "run the receiver chain on a WAV");
    add_common(pipeline);
    pipeline->add_option("--rx", opt.rx_path, "received WAV")->required();
    pipeline->add_option("--template", opt.template_path, "template JSON");
    pipeline->add_option("--template-scene", opt.template_scene_path,
                         "subject-free scene JSON to capture a template from");
    add_pipeline_opts(pipeline);
    pipeline->callback([&] { handler = chirpsense::cli::cmd_pipeline; });

    auto* train = app.add_subcommand("train", "train the voting ensemble");
    add_common(train);
    train->add_option("--features", opt.features_path, "labeled feature CSV")->required();
    train->add_option("--model-out", opt.model_out, "model JSON path");
    train->add_option("--l2", opt.l2, "logistic L2 strength");
    train->add_option("--trees", opt.trees, "forest size");
    train->add_option("--max-depth", opt.max_depth, "forest depth cap");
    train->callback([&] { handler = chirpsense::cli::cmd_train; });

    auto* predict = app.add_subcommand("predict", "label a feature CSV");
    add_common(predict);
    predict->add_option("--model", opt.model_path, "model JSON")->required();
    predict->add_option("--features", opt.features_path, "feature CSV")->required();
    predict->callback([&] { handler = chirpsense::cli::cmd_predict; });

    auto* eval = app.add_subcommand("eval", "split-driven or fixed-model evaluation");
    add_common(eval);
    eval->add_option("--features", opt.features_path, "labeled feature CSV")->required();
    eval->add_option("--model", opt.model_path, "fixed model JSON (skips splitting)");
    eval->add_option("--split", opt.split, "overall | inter | intra");
    eval->add_option("--l2", opt.l2, "logistic L2 strength");
    eval->add_option("--trees", opt.trees, "forest size");
    eval->add_option("--max-depth", opt.max_depth, "forest depth cap");
    eval->callback([&] { handler = chirpsense::cli::cmd_eval; });

    auto* engage = app.add_subcommand("engage", "engagement report from predictions");
    add_common(engage);
    engage->add_option("--predictions", opt.predictions_path, "prediction CSV")
        ->required();
    engage->add_option("--genre", opt.genre, "comedy|tragedy|anger|horror|mixed");
    engage->add_option("--length-min", opt.length_min, "content length in minutes");
    engage->callback([&] { handler = chirpsense::cli::cmd_engage; });

    auto* sus = app.add_subcommand("sus", "score SUS questionnaire responses");
    add_common(sus);
    sus->add_option("--responses", opt.responses_path, "responses CSV")->required();
    sus->callback([&] { handler = chirpsense::cli::cmd_sus; });

    auto* demo = app.add_subcommand(
        "demo", "simulate sessions, train, evaluate and score engagement");
    add_common(demo);
    add_pipeline_opts(demo);
    demo->callback([&] { handler = chirpsense::cli::cmd_demo; });

    CLI11_PARSE(app, argc, argv);

    try {
        chirpsense::cli::apply_config_file(opt);
        return handler(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
