#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chirpsense/label.hpp"

namespace chirpsense {

/// Content genre; the numeric id pairs with the expression of the same index
/// (comedy<->happy, tragedy<->sad, anger<->angry, horror<->surprise).
enum class GenreId : int {
    Comedy = 0,
    Tragedy = 1,
    Anger = 2,
    Horror = 3,
    Mixed = 4,
};

GenreId genre_from_string(const std::string& name);
std::string to_string(GenreId genre);

/// Aggregates of one viewing session.
struct SessionStats {
    std::array<std::uint64_t, kNumClasses> expression_counts{};  // E[4]
    std::uint64_t change_count = 0;                              // R
    double length_min = 1.0;                                     // l

    void validate() const;
};

/// Outcome of the rule evaluation. `indicator` is empty for mixed-genre
/// content (rule 5); `score` holds the single percentage for a fixed genre
/// and `distribution` the per-expression percentages for mixed content.
struct EngagementReport {
    std::optional<bool> indicator;
    int rule_fired = 0;  // 1..5
    double score = 0.0;
    std::array<double, kNumClasses> distribution{};
    bool degenerate = false;  // score denominator was zero
};

// Number of adjacent unequal label pairs; throws on an empty stream.
std::uint64_t change_count(const std::vector<int>& labels);

// Convenience tally of a prediction stream into SessionStats.
SessionStats session_stats(const std::vector<int>& labels, double length_min);

// Rules evaluated in order 1 -> 2 -> 3, first match wins; 4 is the fallback
// "not engaged" and mixed content short-circuits to rule 5 (null).
EngagementReport indicator(const SessionStats& stats, GenreId genre);

// Percentage of the genre-matching expression: against non-neutral counts for
// k != 1 and against all counts for tragedy. Zero denominator flags the
// session as degenerate and scores 0. Throws for mixed content.
double score(const SessionStats& stats, GenreId genre, bool* degenerate = nullptr);

// Per-expression percentages (mixed-genre display); throws when no
// expressions were recorded.
std::array<double, kNumClasses> mixed_distribution(const SessionStats& stats);

// Full report plus JSON rendering used by the CLI.
EngagementReport engagement_report(const SessionStats& stats, GenreId genre);
std::string report_to_json(const EngagementReport& report, const SessionStats& stats,
                           GenreId genre);

}  // namespace chirpsense
