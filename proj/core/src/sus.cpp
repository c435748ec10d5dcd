#include "chirpsense/sus.hpp"

#include <stdexcept>

#include <json.hpp>

#include "chirpsense/csv.hpp"

namespace chirpsense {

void SusResponse::validate() const {
    for (int a : answers) {
        if (a < 1 || a > 5) {
            throw std::invalid_argument("SUS answers must lie in [1, 5]");
        }
    }
}

double sus_score(const SusResponse& r) {
    r.validate();
    int acc = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        const bool odd_item = (i % 2) == 0;  // Q1, Q3, ... are the positive items
        acc += odd_item ? r.answers[i] - 1 : 5 - r.answers[i];
    }
    return 2.5 * static_cast<double>(acc);
}

SusSummary aggregate(const std::vector<SusRecord>& records,
                     const std::vector<std::string>& group_by) {
    if (records.empty()) {
        throw std::invalid_argument("no SUS responses to aggregate");
    }
    SusSummary summary;
    summary.count = records.size();
    summary.scores.reserve(records.size());
    double total = 0.0;
    for (const SusRecord& rec : records) {
        const double s = sus_score(rec.response);
        summary.scores.push_back(s);
        total += s;
    }
    summary.mean = total / static_cast<double>(records.size());

    for (const std::string& column : group_by) {
        std::map<std::string, std::pair<double, std::size_t>> groups;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto it = records[i].demographics.find(column);
            if (it == records[i].demographics.end() || it->second.empty()) {
                continue;
            }
            auto& [sum, count] = groups[it->second];
            sum += summary.scores[i];
            ++count;
        }
        if (groups.empty()) {
            continue;
        }
        for (auto& [key, entry] : groups) {
            entry.first /= static_cast<double>(entry.second);
        }
        summary.groups[column] = std::move(groups);
    }
    return summary;
}

std::vector<SusRecord> read_sus_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    std::array<std::ptrdiff_t, 10> q_cols{};
    for (int q = 1; q <= 10; ++q) {
        const std::ptrdiff_t c = t.column("q" + std::to_string(q));
        if (c < 0) {
            throw std::runtime_error("SUS CSV misses column q" + std::to_string(q) +
                                     ": " + path);
        }
        q_cols[static_cast<std::size_t>(q - 1)] = c;
    }
    std::vector<std::string> demo_cols;
    for (const std::string& name : t.header) {
        if (name.size() >= 2 && name[0] == 'q' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            continue;
        }
        demo_cols.push_back(name);
    }

    std::vector<SusRecord> out;
    for (const auto& row : t.rows) {
        SusRecord rec;
        for (std::size_t i = 0; i < 10; ++i) {
            rec.response.answers[i] =
                std::stoi(row[static_cast<std::size_t>(q_cols[i])]);
        }
        rec.response.validate();
        for (const std::string& name : demo_cols) {
            const std::ptrdiff_t c = t.column(name);
            if (c >= 0) {
                rec.demographics[name] = row[static_cast<std::size_t>(c)];
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::string summary_to_json(const SusSummary& summary) {
    nlohmann::json j;
    j["count"] = summary.count;
    j["mean"] = summary.mean;
    j["scores"] = summary.scores;
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [column, entries] : summary.groups) {
        nlohmann::json g = nlohmann::json::object();
        for (const auto& [key, entry] : entries) {
            g[key] = {{"mean", entry.first}, {"count", entry.second}};
        }
        groups[column] = g;
    }
    j["groups"] = groups;
    return j.dump(2) + "\n";
}

}  // namespace chirpsense
