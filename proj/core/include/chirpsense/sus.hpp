#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace chirpsense {

/// One questionnaire response: Q1..Q10, each answered on 1..5.
struct SusResponse {
    std::array<int, 10> answers{};

    void validate() const;  // throws on out-of-range answers
};

/// Response plus optional demographic tags used for aggregation.
struct SusRecord {
    SusResponse response;
    std::map<std::string, std::string> demographics;  // age/gender/profession/country
};

// 2.5 * sum over items of (odd answer - 1) + (5 - even answer); always a
// multiple of 2.5 in [0, 100].
double sus_score(const SusResponse& r);

struct SusSummary {
    double mean = 0.0;
    std::size_t count = 0;
    std::vector<double> scores;
    // group key -> (mean, count) per demographic column that was present.
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> groups;
};

// Mean score overall and per group for every requested demographic column
// present in the records. Throws on empty input.
SusSummary aggregate(const std::vector<SusRecord>& records,
                     const std::vector<std::string>& group_by = {
                         "age", "gender", "profession", "country"});

// CSV ingest: header q1..q10 plus optional demographic columns.
std::vector<SusRecord> read_sus_csv(const std::string& path);

std::string summary_to_json(const SusSummary& summary);

}  // namespace chirpsense
