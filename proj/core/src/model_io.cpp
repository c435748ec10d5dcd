#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chirpsense/ml.hpp"

namespace chirpsense::ml {

using nlohmann::json;

namespace {

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"label", n.label}});
    }
    const auto cfg = tree.config();
    return json{{"max_depth", cfg.max_depth},
                {"min_samples_split", cfg.min_samples_split},
                {"mtry", cfg.mtry},
                {"nodes", nodes}};
}

DecisionTree tree_from_json(const json& j) {
    std::vector<DecisionTree::Node> nodes;
    for (const auto& nj : j.at("nodes")) {
        DecisionTree::Node n;
        n.feature = nj.at("feature").get<int>();
        n.threshold = nj.at("threshold").get<double>();
        n.left = nj.at("left").get<int>();
        n.right = nj.at("right").get<int>();
        n.label = nj.at("label").get<int>();
        nodes.push_back(n);
    }
    DecisionTree::Config cfg;
    cfg.max_depth = j.value("max_depth", 0);
    cfg.min_samples_split = j.value("min_samples_split", 2);
    cfg.mtry = j.value("mtry", 0);
    DecisionTree tree;
    tree.restore(std::move(nodes), cfg);
    return tree;
}

}  // namespace

std::string model_to_json(const EnsembleModel& model) {
    if (!model.trained()) {
        throw std::runtime_error("cannot persist an untrained model");
    }
    json j;
    j["version"] = 1;
    j["type"] = "expression_ensemble";

    json policy = json::array();
    for (int k : model.tie_policy) {
        policy.push_back(to_string(static_cast<ExpressionLabel>(k)));
    }
    j["tie_policy"] = policy;

    const auto lr_cfg = model.logreg.config();
    j["logreg"] = {{"l2", lr_cfg.l2},
                   {"tolerance", lr_cfg.tolerance},
                   {"max_iterations", lr_cfg.max_iterations},
                   {"feature_mean", model.logreg.feature_mean()},
                   {"feature_scale", model.logreg.feature_scale()},
                   {"theta", model.logreg.theta()}};

    j["tree"] = tree_to_json(model.tree);

    const auto rf_cfg = model.forest.config();
    json trees = json::array();
    for (const auto& tree : model.forest.trees()) {
        trees.push_back(tree_to_json(tree));
    }
    j["forest"] = {{"n_trees", rf_cfg.n_trees},
                   {"max_depth", rf_cfg.max_depth},
                   {"bootstrap", rf_cfg.bootstrap},
                   {"mtry", rf_cfg.mtry},
                   {"seed", rf_cfg.seed},
                   {"trees", trees}};
    return j.dump(2) + "\n";
}

EnsembleModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("model JSON parse error: ") + e.what());
    }
    if (j.value("type", std::string{}) != "expression_ensemble") {
        throw std::runtime_error("not an expression_ensemble model file");
    }
    if (j.value("version", 0) != 1) {
        throw std::runtime_error("unsupported model version");
    }

    EnsembleModel model;
    const auto& policy = j.at("tie_policy");
    if (policy.size() != kNumClasses) {
        throw std::runtime_error("tie policy must list all four classes");
    }
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        model.tie_policy[i] =
            static_cast<int>(label_from_string(policy.at(i).get<std::string>()));
    }

    const auto& lr = j.at("logreg");
    LogisticRegression::Config lr_cfg;
    lr_cfg.l2 = lr.at("l2").get<double>();
    lr_cfg.tolerance = lr.value("tolerance", 1e-6);
    lr_cfg.max_iterations = lr.value("max_iterations", 500);
    std::array<double, kNumFeatures> mean{};
    std::array<double, kNumFeatures> scale{};
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        mean[i] = lr.at("feature_mean").at(i).get<double>();
        scale[i] = lr.at("feature_scale").at(i).get<double>();
    }
    model.logreg.restore(lr.at("theta").get<std::vector<double>>(), mean, scale, lr_cfg);

    model.tree = tree_from_json(j.at("tree"));

    const auto& rf = j.at("forest");
    RandomForest::Config rf_cfg;
    rf_cfg.n_trees = rf.at("n_trees").get<int>();
    rf_cfg.max_depth = rf.at("max_depth").get<int>();
    rf_cfg.bootstrap = rf.at("bootstrap").get<bool>();
    rf_cfg.mtry = rf.value("mtry", 0);
    rf_cfg.seed = rf.value("seed", std::uint64_t{0});
    std::vector<DecisionTree> trees;
    for (const auto& tj : rf.at("trees")) {
        trees.push_back(tree_from_json(tj));
    }
    model.forest.restore(std::move(trees), rf_cfg);
    return model;
}

void save_model(const std::string& path, const EnsembleModel& model) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << model_to_json(model);
}

EnsembleModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open model: " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace chirpsense::ml
