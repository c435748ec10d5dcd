#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "chirpsense/ml.hpp"
#include "chirpsense/random.hpp"

namespace chirpsense::ml {

double gini_impurity(const std::array<std::size_t, kNumClasses>& counts) {
    const double total = static_cast<double>(
        std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    if (total == 0.0) {
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / total;
        acc += p * p;
    }
    return 1.0 - acc;
}

namespace {

int majority_label(const std::array<std::size_t, kNumClasses>& counts) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(kNumClasses); ++k) {
        if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(best)]) {
            best = k;
        }
    }
    return best;
}

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_after = 0.0;  // weighted child impurity
};

// Exhaustive threshold scan for one feature. Candidates are midpoints of
// consecutive distinct values, so the choice is invariant to sample order.
void scan_feature(const Dataset& data, const std::vector<std::size_t>& idx,
                  std::size_t feature, SplitChoice& best) {
    std::vector<std::size_t> order = idx;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.x[a][feature] < data.x[b][feature];
    });

    std::array<std::size_t, kNumClasses> left{}, right{};
    for (std::size_t i : order) {
        ++right[static_cast<std::size_t>(data.y[i])];
    }
    const double total = static_cast<double>(order.size());

    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const std::size_t cls = static_cast<std::size_t>(data.y[order[i]]);
        ++left[cls];
        --right[cls];
        const double v = data.x[order[i]][feature];
        const double v_next = data.x[order[i + 1]][feature];
        if (v == v_next) {
            continue;
        }
        const double n_left = static_cast<double>(i + 1);
        const double n_right = total - n_left;
        const double impurity =
            (n_left * gini_impurity(left) + n_right * gini_impurity(right)) / total;
        const double threshold = v + 0.5 * (v_next - v);
        const bool better =
            !best.found || impurity < best.impurity_after ||
            (impurity == best.impurity_after &&
             (feature < best.feature ||
              (feature == best.feature && threshold < best.threshold)));
        if (better) {
            best.found = true;
            best.feature = feature;
            best.threshold = threshold;
            best.impurity_after = impurity;
        }
    }
}

}  // namespace

void DecisionTree::fit(const Dataset& data, const Config& cfg) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    fit_indices(data, idx, cfg);
}

void DecisionTree::fit_indices(const Dataset& data, const std::vector<std::size_t>& idx,
                               const Config& cfg) {
    data.validate();
    if (idx.empty()) {
        throw std::invalid_argument("decision tree needs at least one sample");
    }
    cfg_ = cfg;
    nodes_.clear();

    Rng rng(cfg.seed);
    const std::size_t mtry = (cfg.mtry <= 0 ||
                              cfg.mtry > static_cast<int>(kNumFeatures))
                                 ? kNumFeatures
                                 : static_cast<std::size_t>(cfg.mtry);

    struct Work {
        std::vector<std::size_t> idx;
        int node;
        int depth;
    };
    nodes_.push_back({});
    std::vector<Work> stack;
    stack.push_back({idx, 0, 0});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        std::array<std::size_t, kNumClasses> counts{};
        for (std::size_t i : w.idx) {
            ++counts[static_cast<std::size_t>(data.y[i])];
        }
        const double impurity = gini_impurity(counts);

        const bool depth_stop = cfg.max_depth > 0 && w.depth >= cfg.max_depth;
        const bool size_stop =
            w.idx.size() < static_cast<std::size_t>(std::max(2, cfg.min_samples_split));
        if (impurity == 0.0 || depth_stop || size_stop) {
            nodes_[static_cast<std::size_t>(w.node)].label = majority_label(counts);
            continue;
        }

        // Feature subset for this split (all features unless mtry is set).
        std::array<std::size_t, kNumFeatures> features;
        std::iota(features.begin(), features.end(), std::size_t{0});
        std::size_t n_features = kNumFeatures;
        if (mtry < kNumFeatures) {
            for (std::size_t i = 0; i < mtry; ++i) {
                const std::size_t j = i + rng.below(kNumFeatures - i);
                std::swap(features[i], features[j]);
            }
            std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mtry));
            n_features = mtry;
        }

        SplitChoice best;
        for (std::size_t f = 0; f < n_features; ++f) {
            scan_feature(data, w.idx, features[f], best);
        }
        if (!best.found || best.impurity_after >= impurity) {
            nodes_[static_cast<std::size_t>(w.node)].label = majority_label(counts);
            continue;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t i : w.idx) {
            (data.x[i][best.feature] <= best.threshold ? left : right).push_back(i);
        }

        Node& node = nodes_[static_cast<std::size_t>(w.node)];
        node.feature = static_cast<int>(best.feature);
        node.threshold = best.threshold;
        node.left = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        node.right = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        const int left_id = nodes_[static_cast<std::size_t>(w.node)].left;
        const int right_id = nodes_[static_cast<std::size_t>(w.node)].right;
        // Right first so the left branch is processed (and numbered) first
        // on the next pops; layout stays deterministic either way.
        stack.push_back({std::move(right), right_id, w.depth + 1});
        stack.push_back({std::move(left), left_id, w.depth + 1});
    }
}

int DecisionTree::predict(const FeatureVector& x) const {
    if (nodes_.empty()) {
        throw std::runtime_error("decision tree is not trained");
    }
    int node = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
        const Node& n = nodes_[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(node)].label;
}

void DecisionTree::restore(std::vector<Node> nodes, const Config& cfg) {
    if (nodes.empty()) {
        throw std::invalid_argument("empty node list");
    }
    nodes_ = std::move(nodes);
    cfg_ = cfg;
}

}  // namespace chirpsense::ml
