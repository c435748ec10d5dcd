#include <numeric>
#include <stdexcept>

#include "chirpsense/ml.hpp"
#include "chirpsense/random.hpp"

namespace chirpsense::ml {

void RandomForest::fit(const Dataset& data, const Config& cfg) {
    data.validate();
    if (data.size() == 0) {
        throw std::invalid_argument("empty training set");
    }
    if (cfg.n_trees < 1) {
        throw std::invalid_argument("forest needs at least one tree");
    }
    cfg_ = cfg;
    trees_.clear();
    trees_.reserve(static_cast<std::size_t>(cfg.n_trees));

    Rng rng(cfg.seed ^ 0x8f2c1b3a5d4e6f70ULL);
    const std::size_t n = data.size();
    for (int t = 0; t < cfg.n_trees; ++t) {
        std::vector<std::size_t> idx(n);
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) {
                idx[i] = rng.below(n);
            }
        } else {
            std::iota(idx.begin(), idx.end(), std::size_t{0});
        }
        DecisionTree::Config tree_cfg;
        tree_cfg.max_depth = cfg.max_depth;
        tree_cfg.mtry = cfg.mtry;
        tree_cfg.seed = rng.next_u64();
        DecisionTree tree;
        tree.fit_indices(data, idx, tree_cfg);
        trees_.push_back(std::move(tree));
    }
}

int RandomForest::predict(const FeatureVector& x) const {
    if (trees_.empty()) {
        throw std::runtime_error("random forest is not trained");
    }
    std::array<std::size_t, kNumClasses> votes{};
    for (const DecisionTree& tree : trees_) {
        ++votes[static_cast<std::size_t>(tree.predict(x))];
    }
    int best = 0;
    for (int k = 1; k < static_cast<int>(kNumClasses); ++k) {
        if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) {
            best = k;
        }
    }
    return best;
}

void RandomForest::restore(std::vector<DecisionTree> trees, const Config& cfg) {
    if (trees.empty()) {
        throw std::invalid_argument("empty forest");
    }
    trees_ = std::move(trees);
    cfg_ = cfg;
}

}  // namespace chirpsense::ml
