#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "chirpsense/label.hpp"
#include "chirpsense/ml.hpp"
#include "chirpsense/random.hpp"

namespace chirpsense {

std::string to_string(ExpressionLabel label) {
    switch (label) {
        case ExpressionLabel::Happy:
            return "happy";
        case ExpressionLabel::SadNeutral:
            return "sad_neutral";
        case ExpressionLabel::Angry:
            return "angry";
        case ExpressionLabel::Surprise:
            return "surprise";
    }
    throw std::logic_error("invalid expression label");
}

ExpressionLabel label_from_string(const std::string& name) {
    std::string s;
    s.reserve(name.size());
    for (char c : name) {
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (s == "happy" || s == "happiness") {
        return ExpressionLabel::Happy;
    }
    if (s == "sad_neutral" || s == "sad" || s == "sadness" || s == "neutral") {
        return ExpressionLabel::SadNeutral;
    }
    if (s == "angry" || s == "anger") {
        return ExpressionLabel::Angry;
    }
    if (s == "surprise" || s == "surprised") {
        return ExpressionLabel::Surprise;
    }
    throw std::invalid_argument("unknown expression label: " + name);
}

namespace ml {

bool Dataset::has_sessions() const {
    if (session.size() != x.size()) {
        return false;
    }
    return std::all_of(session.begin(), session.end(),
                       [](const std::string& s) { return !s.empty(); });
}

void Dataset::validate() const {
    if (y.size() != x.size()) {
        throw std::invalid_argument("dataset feature/label counts differ");
    }
    if (!session.empty() && session.size() != x.size()) {
        throw std::invalid_argument("dataset session tags have the wrong length");
    }
    for (int label : y) {
        if (label < 0 || label >= static_cast<int>(kNumClasses)) {
            throw std::invalid_argument("label outside the class range");
        }
    }
    for (const auto& xi : x) {
        for (double v : xi) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("non-finite feature value");
            }
        }
    }
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.x.reserve(idx.size());
    out.y.reserve(idx.size());
    const bool tagged = data.session.size() == data.x.size();
    for (std::size_t i : idx) {
        out.x.push_back(data.x[i]);
        out.y.push_back(data.y[i]);
        if (tagged) {
            out.session.push_back(data.session[i]);
        }
    }
    return out;
}

namespace {

// Stratified 4:1 partition of the given rows (already restricted to one
// session when needed). Appends into the split.
void stratified_fill(const Dataset& data, const std::vector<std::size_t>& rows,
                     Rng& rng, Split& split) {
    std::map<int, std::vector<std::size_t>> per_class;
    for (std::size_t i : rows) {
        per_class[data.y[i]].push_back(i);
    }
    for (auto& [label, idx] : per_class) {
        rng.shuffle(idx);
        const std::size_t n_train = idx.size() * 4 / 5;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_train ? split.train_idx : split.test_idx).push_back(idx[i]);
        }
    }
    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
}

}  // namespace

std::vector<Split> splits(const Dataset& data, SplitMode mode, std::uint64_t seed) {
    data.validate();
    if (data.size() < 2) {
        throw std::invalid_argument("not enough rows to split");
    }
    if (mode != SplitMode::Overall && !data.has_sessions()) {
        throw std::invalid_argument("session-based split needs session tags on every row");
    }

    Rng rng(seed ^ 0x51a2b3c4d5e6f708ULL);
    std::vector<Split> out;

    if (mode == SplitMode::Overall) {
        std::vector<std::size_t> rows(data.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        Split split;
        stratified_fill(data, rows, rng, split);
        out.push_back(std::move(split));
        return out;
    }

    // Session order = first appearance, so folds are stable.
    std::vector<std::string> sessions;
    std::map<std::string, std::vector<std::size_t>> by_session;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto [it, inserted] = by_session.try_emplace(data.session[i]);
        if (inserted) {
            sessions.push_back(data.session[i]);
        }
        it->second.push_back(i);
    }

    if (mode == SplitMode::InterSession) {
        if (sessions.size() < 2) {
            throw std::invalid_argument("inter-session split needs at least two sessions");
        }
        for (const std::string& held : sessions) {
            Split split;
            split.held_out_session = held;
            for (std::size_t i = 0; i < data.size(); ++i) {
                (data.session[i] == held ? split.test_idx : split.train_idx).push_back(i);
            }
            out.push_back(std::move(split));
        }
        return out;
    }

    // Intra-session: 4:1 per class inside each session, merged into one split.
    Split split;
    for (const std::string& name : sessions) {
        stratified_fill(data, by_session[name], rng, split);
    }
    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
    out.push_back(std::move(split));
    return out;
}

SplitMode split_mode_from_string(const std::string& name) {
    if (name == "overall") {
        return SplitMode::Overall;
    }
    if (name == "inter" || name == "inter_session") {
        return SplitMode::InterSession;
    }
    if (name == "intra" || name == "intra_session") {
        return SplitMode::IntraSession;
    }
    throw std::invalid_argument("unknown split mode: " + name);
}

std::string to_string(SplitMode mode) {
    switch (mode) {
        case SplitMode::Overall:
            return "overall";
        case SplitMode::InterSession:
            return "inter_session";
        case SplitMode::IntraSession:
            return "intra_session";
    }
    throw std::logic_error("invalid split mode");
}

}  // namespace ml
}  // namespace chirpsense
