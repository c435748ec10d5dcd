#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chirpsense/label.hpp"

namespace chirpsense::ml {

/// (amplitude, unwrapped phase) of the selected bin.
using FeatureVector = std::array<double, 2>;
inline constexpr std::size_t kNumFeatures = 2;

struct Dataset {
    std::vector<FeatureVector> x;
    std::vector<int> y;                 // class index, see ExpressionLabel
    std::vector<std::string> session;   // optional per-row tag ("" = untagged)

    std::size_t size() const { return x.size(); }
    bool has_sessions() const;
    void validate() const;              // shape / label-range checks
};

Dataset subset(const Dataset& data, const std::vector<std::size_t>& idx);

/// Multinomial logistic regression with an L2 penalty on the weights
/// (biases exempt), fitted by L-BFGS on the convex objective. Features are
/// standardized internally with statistics taken from the training set.
class LogisticRegression {
public:
    struct Config {
        double l2 = 1.0;
        double tolerance = 1e-6;   // gradient-norm stop
        int max_iterations = 500;
    };

    void fit(const Dataset& data, const Config& cfg);
    void fit(const Dataset& data) { fit(data, Config{}); }
    int predict(const FeatureVector& x) const;
    std::vector<double> probabilities(const FeatureVector& x) const;
    bool trained() const { return trained_; }

    // Raw parameters, used by persistence.
    const std::vector<double>& theta() const { return theta_; }
    const std::array<double, kNumFeatures>& feature_mean() const { return mean_; }
    const std::array<double, kNumFeatures>& feature_scale() const { return scale_; }
    Config config() const { return cfg_; }
    void restore(std::vector<double> theta, std::array<double, kNumFeatures> mean,
                 std::array<double, kNumFeatures> scale, const Config& cfg);

private:
    std::vector<double> theta_;  // kNumClasses * (kNumFeatures + 1), bias last
    std::array<double, kNumFeatures> mean_{};
    std::array<double, kNumFeatures> scale_{};
    Config cfg_{};
    bool trained_ = false;
};

namespace detail {
// Objective and gradient of the (standardized-input) logistic model, exposed
// so tests can check the analytic gradient against finite differences.
double logreg_loss(const std::vector<double>& theta,
                   const std::vector<FeatureVector>& x, const std::vector<int>& y,
                   double l2);
std::vector<double> logreg_gradient(const std::vector<double>& theta,
                                    const std::vector<FeatureVector>& x,
                                    const std::vector<int>& y, double l2);
}  // namespace detail

/// CART classification tree on Gini impurity. Split search is exhaustive and
/// deterministic: best impurity decrease, ties toward the lower feature index
/// and then the lower threshold.
class DecisionTree {
public:
    struct Config {
        int max_depth = 0;          // 0 = unbounded
        int min_samples_split = 2;
        int mtry = 0;               // features tried per split; 0 = all
        std::uint64_t seed = 0;     // only used when mtry < kNumFeatures
    };

    struct Node {
        int feature = -1;           // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int label = -1;
    };

    void fit(const Dataset& data, const Config& cfg);
    void fit(const Dataset& data) { fit(data, Config{}); }
    void fit_indices(const Dataset& data, const std::vector<std::size_t>& idx,
                     const Config& cfg);
    int predict(const FeatureVector& x) const;
    bool trained() const { return !nodes_.empty(); }

    const std::vector<Node>& nodes() const { return nodes_; }
    void restore(std::vector<Node> nodes, const Config& cfg);
    Config config() const { return cfg_; }

private:
    std::vector<Node> nodes_;
    Config cfg_{};
};

// Gini impurity of a label multiset: 1 - sum p_k^2.
double gini_impurity(const std::array<std::size_t, kNumClasses>& counts);

/// Bootstrap-aggregated decision trees; per-tree vote, majority label wins
/// (ties toward the smaller class index).
class RandomForest {
public:
    struct Config {
        int n_trees = 100;
        int max_depth = 10;
        bool bootstrap = true;
        int mtry = 0;               // 0 = all features
        std::uint64_t seed = 0;
    };

    void fit(const Dataset& data, const Config& cfg);
    void fit(const Dataset& data) { fit(data, Config{}); }
    int predict(const FeatureVector& x) const;
    bool trained() const { return !trees_.empty(); }

    const std::vector<DecisionTree>& trees() const { return trees_; }
    void restore(std::vector<DecisionTree> trees, const Config& cfg);
    Config config() const { return cfg_; }

private:
    std::vector<DecisionTree> trees_;
    Config cfg_{};
};

/// Majority vote over the three members; when all three disagree the label
/// ranked first by tie_policy among the cast votes wins.
struct EnsembleConfig {
    LogisticRegression::Config logreg{};
    DecisionTree::Config tree{};
    RandomForest::Config forest{.n_trees = 100, .max_depth = 10};
    std::array<int, kNumClasses> tie_policy = {1, 0, 2, 3};  // sad, happy, angry, surprise
    std::uint64_t seed = 0;
};

struct EnsembleModel {
    LogisticRegression logreg;
    DecisionTree tree;
    RandomForest forest;
    std::array<int, kNumClasses> tie_policy = {1, 0, 2, 3};

    bool trained() const;
};

// Trains all three members on the same data. Throws std::invalid_argument
// with a diagnosis for degenerate datasets (fewer than two classes, fewer
// than 8 samples in a present class, or features carrying no information).
EnsembleModel train(const Dataset& data, const EnsembleConfig& cfg = {});

int predict(const EnsembleModel& model, const FeatureVector& x);

// Resolves raw member votes; exposed for the exhaustive voting checks.
int resolve_votes(const std::array<int, 3>& votes,
                  const std::array<int, kNumClasses>& tie_policy);

struct Metrics {
    double accuracy = 0.0;
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};  // [true][pred]
    std::array<double, kNumClasses> precision{};
    std::array<double, kNumClasses> recall{};
    std::array<double, kNumClasses> f1{};
    std::size_t total = 0;
};

Metrics evaluate(const EnsembleModel& model, const Dataset& test);
Metrics tally(const std::vector<int>& y_true, const std::vector<int>& y_pred);

enum class SplitMode { Overall, InterSession, IntraSession };

struct Split {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    std::string held_out_session;  // inter-session folds only
};

// Overall: one stratified 4:1 split. InterSession: one fold per session with
// that session held out. IntraSession: one split, 4:1 per class inside each
// session. Session modes require session tags on every row.
std::vector<Split> splits(const Dataset& data, SplitMode mode, std::uint64_t seed);

SplitMode split_mode_from_string(const std::string& name);
std::string to_string(SplitMode mode);

// Versioned JSON persistence of the whole ensemble.
std::string model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const std::string& text);
void save_model(const std::string& path, const EnsembleModel& model);
EnsembleModel load_model(const std::string& path);

}  // namespace chirpsense::ml
