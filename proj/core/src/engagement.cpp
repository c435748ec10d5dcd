#include "chirpsense/engagement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace chirpsense {

GenreId genre_from_string(const std::string& name) {
    if (name == "comedy") return GenreId::Comedy;
    if (name == "tragedy") return GenreId::Tragedy;
    if (name == "anger") return GenreId::Anger;
    if (name == "horror") return GenreId::Horror;
    if (name == "mixed") return GenreId::Mixed;
    throw std::invalid_argument("unknown genre: " + name);
}

std::string to_string(GenreId genre) {
    switch (genre) {
        case GenreId::Comedy: return "comedy";
        case GenreId::Tragedy: return "tragedy";
        case GenreId::Anger: return "anger";
        case GenreId::Horror: return "horror";
        case GenreId::Mixed: return "mixed";
    }
    throw std::logic_error("invalid genre id");
}

void SessionStats::validate() const {
    if (!(length_min > 0.0) || !std::isfinite(length_min)) {
        throw std::invalid_argument("content length must be positive");
    }
}

std::uint64_t change_count(const std::vector<int>& labels) {
    if (labels.empty()) {
        throw std::invalid_argument("change_count needs at least one label");
    }
    std::uint64_t r = 0;
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (labels[i] != labels[i - 1]) {
            ++r;
        }
    }
    return r;
}

SessionStats session_stats(const std::vector<int>& labels, double length_min) {
    SessionStats stats;
    stats.length_min = length_min;
    stats.change_count = change_count(labels);
    for (int label : labels) {
        if (label < 0 || label >= static_cast<int>(kNumClasses)) {
            throw std::invalid_argument("label outside the class range");
        }
        ++stats.expression_counts[static_cast<std::size_t>(label)];
    }
    stats.validate();
    return stats;
}

namespace {

// argmax over E with ties resolved toward the genre index when it is among
// the maxima, then toward neutral, then toward the lowest index.
std::size_t dominant_expression(const std::array<std::uint64_t, kNumClasses>& counts,
                                int genre_index) {
    const std::uint64_t max = *std::max_element(counts.begin(), counts.end());
    if (genre_index >= 0 && counts[static_cast<std::size_t>(genre_index)] == max) {
        return static_cast<std::size_t>(genre_index);
    }
    if (counts[1] == max) {
        return 1;  // neutral
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        if (counts[k] == max) {
            return k;
        }
    }
    return 0;
}

}  // namespace

EngagementReport indicator(const SessionStats& stats, GenreId genre) {
    stats.validate();
    EngagementReport report;

    if (genre == GenreId::Mixed) {
        report.indicator = std::nullopt;  // rule 5: no target expression exists
        report.rule_fired = 5;
        return report;
    }

    const int k = static_cast<int>(genre);
    const auto& counts = stats.expression_counts;
    const std::size_t strongest = dominant_expression(counts, k);

    // Rule 1: the strongest expression matches the genre.
    if (static_cast<int>(strongest) == k) {
        report.indicator = true;
        report.rule_fired = 1;
        return report;
    }

    // Rules 2 and 3 only apply when the viewer stayed mostly neutral.
    if (strongest == 1) {
        double threshold;
        if (k != 1) {
            threshold = (static_cast<double>(counts[0]) + static_cast<double>(counts[2]) +
                         static_cast<double>(counts[3])) /
                        3.0;
        } else {
            // Tragedy variant: compare against the average of all four
            // counts. Unreachable in practice (k == 1 with neutral strongest
            // already fires rule 1) but kept as specified.
            threshold = (static_cast<double>(counts[0]) + static_cast<double>(counts[1]) +
                         static_cast<double>(counts[2]) + static_cast<double>(counts[3])) /
                        4.0;
        }
        if (static_cast<double>(counts[static_cast<std::size_t>(k)]) > threshold) {
            report.indicator = true;
            report.rule_fired = 2;
            return report;
        }
        if (static_cast<double>(stats.change_count) > 0.3 * stats.length_min) {
            report.indicator = true;
            report.rule_fired = 3;
            return report;
        }
    }

    report.indicator = false;
    report.rule_fired = 4;
    return report;
}

double score(const SessionStats& stats, GenreId genre, bool* degenerate) {
    stats.validate();
    if (genre == GenreId::Mixed) {
        throw std::invalid_argument("mixed genre has no single score; use mixed_distribution");
    }
    const std::size_t k = static_cast<std::size_t>(genre);
    const auto& counts = stats.expression_counts;
    double denom;
    if (k != 1) {
        denom = static_cast<double>(counts[0] + counts[2] + counts[3]);
    } else {
        denom = static_cast<double>(counts[0] + counts[1] + counts[2] + counts[3]);
    }
    if (degenerate) {
        *degenerate = false;
    }
    if (denom == 0.0) {
        if (degenerate) {
            *degenerate = true;
        }
        return 0.0;
    }
    const double value = 100.0 * static_cast<double>(counts[k]) / denom;
    return std::clamp(value, 0.0, 100.0);
}

std::array<double, kNumClasses> mixed_distribution(const SessionStats& stats) {
    const auto& counts = stats.expression_counts;
    const double total = static_cast<double>(counts[0] + counts[1] + counts[2] + counts[3]);
    if (total == 0.0) {
        throw std::invalid_argument("no expressions recorded");
    }
    std::array<double, kNumClasses> out{};
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        out[i] = 100.0 * static_cast<double>(counts[i]) / total;
    }
    return out;
}

EngagementReport engagement_report(const SessionStats& stats, GenreId genre) {
    EngagementReport report = indicator(stats, genre);
    if (genre == GenreId::Mixed) {
        report.distribution = mixed_distribution(stats);
    } else {
        report.score = score(stats, genre, &report.degenerate);
    }
    return report;
}

std::string report_to_json(const EngagementReport& report, const SessionStats& stats,
                           GenreId genre) {
    nlohmann::json j;
    j["genre"] = to_string(genre);
    j["genre_id"] = genre == GenreId::Mixed ? nlohmann::json(nullptr)
                                            : nlohmann::json(static_cast<int>(genre));
    j["indicator"] = report.indicator ? nlohmann::json(*report.indicator)
                                      : nlohmann::json(nullptr);
    j["rule_fired"] = report.rule_fired;
    if (genre == GenreId::Mixed) {
        j["distribution"] = report.distribution;
    } else {
        j["score"] = report.score;
    }
    j["expression_counts"] = stats.expression_counts;
    j["change_count"] = stats.change_count;
    j["length_min"] = stats.length_min;
    nlohmann::json flags = nlohmann::json::array();
    if (report.degenerate) {
        flags.push_back("degenerate_session");
    }
    j["flags"] = flags;
    return j.dump(2) + "\n";
}

}  // namespace chirpsense
