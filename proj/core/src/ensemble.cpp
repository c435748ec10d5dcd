#include <algorithm>
#include <stdexcept>

#include "chirpsense/ml.hpp"

namespace chirpsense::ml {

bool EnsembleModel::trained() const {
    return logreg.trained() && tree.trained() && forest.trained();
}

EnsembleModel train(const Dataset& data, const EnsembleConfig& cfg) {
    data.validate();

    std::array<std::size_t, kNumClasses> counts{};
    for (int label : data.y) {
        ++counts[static_cast<std::size_t>(label)];
    }
    int present = 0;
    for (std::size_t c : counts) {
        if (c > 0) {
            ++present;
        }
    }
    if (present < 2) {
        throw std::invalid_argument(
            "degenerate dataset: training needs at least two classes");
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        if (counts[k] > 0 && counts[k] < 8) {
            throw std::invalid_argument("degenerate dataset: class '" +
                                        to_string(static_cast<ExpressionLabel>(k)) +
                                        "' has fewer than 8 samples");
        }
    }
    bool informative = false;
    for (std::size_t i = 1; i < data.size(); ++i) {
        if (data.x[i] != data.x[0]) {
            informative = true;
            break;
        }
    }
    if (!informative) {
        throw std::invalid_argument(
            "degenerate dataset: all feature vectors are identical across classes");
    }

    EnsembleModel model;
    model.tie_policy = cfg.tie_policy;

    LogisticRegression::Config lr_cfg = cfg.logreg;
    model.logreg.fit(data, lr_cfg);

    model.tree.fit(data, cfg.tree);

    RandomForest::Config rf_cfg = cfg.forest;
    rf_cfg.seed ^= cfg.seed;
    model.forest.fit(data, rf_cfg);
    return model;
}

int resolve_votes(const std::array<int, 3>& votes,
                  const std::array<int, kNumClasses>& tie_policy) {
    std::array<int, kNumClasses> tally{};
    for (int v : votes) {
        if (v < 0 || v >= static_cast<int>(kNumClasses)) {
            throw std::invalid_argument("vote outside the class range");
        }
        ++tally[static_cast<std::size_t>(v)];
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        if (tally[k] >= 2) {
            return static_cast<int>(k);
        }
    }
    // All three disagree: highest-priority class among the cast votes.
    for (int preferred : tie_policy) {
        if (tally[static_cast<std::size_t>(preferred)] > 0) {
            return preferred;
        }
    }
    return votes[0];  // unreachable with a complete tie policy
}

int predict(const EnsembleModel& model, const FeatureVector& x) {
    if (!model.trained()) {
        throw std::runtime_error("ensemble is not trained");
    }
    const std::array<int, 3> votes = {model.logreg.predict(x), model.tree.predict(x),
                                      model.forest.predict(x)};
    return resolve_votes(votes, model.tie_policy);
}

Metrics tally(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("prediction/label length mismatch");
    }
    if (y_true.empty()) {
        throw std::invalid_argument("empty evaluation set");
    }
    Metrics m;
    m.total = y_true.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        if (t >= kNumClasses || p >= kNumClasses) {
            throw std::invalid_argument("label outside the class range");
        }
        ++m.confusion[t][p];
        if (t == p) {
            ++correct;
        }
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        std::size_t row = 0, col = 0;
        for (std::size_t j = 0; j < kNumClasses; ++j) {
            row += m.confusion[k][j];
            col += m.confusion[j][k];
        }
        const double tp = static_cast<double>(m.confusion[k][k]);
        m.precision[k] = col > 0 ? tp / static_cast<double>(col) : 0.0;
        m.recall[k] = row > 0 ? tp / static_cast<double>(row) : 0.0;
        const double pr = m.precision[k] + m.recall[k];
        m.f1[k] = pr > 0.0 ? 2.0 * m.precision[k] * m.recall[k] / pr : 0.0;
    }
    return m;
}

Metrics evaluate(const EnsembleModel& model, const Dataset& test) {
    test.validate();
    if (test.size() == 0) {
        throw std::invalid_argument("empty evaluation set");
    }
    std::vector<int> pred(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        pred[i] = predict(model, test.x[i]);
    }
    return tally(test.y, pred);
}

}  // namespace chirpsense::ml
