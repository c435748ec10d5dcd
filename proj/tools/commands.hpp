#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "chirpsense/pipeline.hpp"

namespace chirpsense::cli {

// Shared option bag filled by the CLI parser (and optionally preloaded from
// a JSON config file); each command reads the fields it cares about.
struct Options {
    std::string config_path;
    std::string out;
    std::string scene_path;
    std::string rx_path;
    std::string tx_out;
    std::string features_path;
    std::string model_path;
    std::string model_out;
    std::string predictions_path;
    std::string responses_path;
    std::string template_path;
    std::string template_scene_path;
    std::uint64_t seed = 1234;
    std::size_t frames = 64;
    std::string split = "overall";
    std::string genre = "comedy";
    double length_min = 10.0;
    std::size_t n_fft = 0;
    bool no_cancel = false;
    bool no_highpass = false;
    bool no_sync = false;
    bool hann_window = false;
    double calib_sec = 4.0;
    std::size_t feature_window = 1;
    double l2 = 1.0;
    int trees = 100;
    int max_depth = 10;
};

// Applies the JSON config file (when given), then returns the pipeline
// configuration implied by the options.
void apply_config_file(Options& opt);
PipelineConfig pipeline_config(const Options& opt);

int cmd_synth(const Options& opt);
int cmd_simulate(const Options& opt);
int cmd_pipeline(const Options& opt);
int cmd_train(const Options& opt);
int cmd_predict(const Options& opt);
int cmd_eval(const Options& opt);
int cmd_engage(const Options& opt);
int cmd_sus(const Options& opt);
int cmd_demo(const Options& opt);

}  // namespace chirpsense::cli
