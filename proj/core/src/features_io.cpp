#include "chirpsense/features_io.hpp"

#include <stdexcept>

#include "chirpsense/csv.hpp"

namespace chirpsense {

namespace {

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
        throw std::runtime_error("malformed number in CSV: " + s);
    }
    return v;
}

std::vector<std::string> feature_row(const FrameFeatures& r, std::size_t bin_index) {
    return {std::to_string(r.frame_index), format_double(r.time_s),
            std::to_string(bin_index),     format_double(r.amplitude),
            format_double(r.phase),        format_double(r.d_amplitude),
            format_double(r.d_phase)};
}

}  // namespace

void write_features_csv(const std::string& path, const std::vector<FrameFeatures>& rows,
                        std::size_t bin_index) {
    CsvTable t;
    t.header = {"frame_index", "time_s", "bin_index", "amplitude",
                "phase",       "d_amplitude", "d_phase"};
    for (const auto& r : rows) {
        t.rows.push_back(feature_row(r, bin_index));
    }
    write_csv(path, t);
}

std::vector<FrameFeatures> read_features_csv(const std::string& path,
                                             std::size_t* bin_index) {
    const CsvTable t = read_csv(path);
    const auto col = [&](const char* name) {
        const std::ptrdiff_t c = t.column(name);
        if (c < 0) {
            throw std::runtime_error(std::string("feature CSV misses column ") + name);
        }
        return static_cast<std::size_t>(c);
    };
    const std::size_t c_frame = col("frame_index");
    const std::size_t c_time = col("time_s");
    const std::size_t c_bin = col("bin_index");
    const std::size_t c_amp = col("amplitude");
    const std::size_t c_phase = col("phase");
    const std::size_t c_da = col("d_amplitude");
    const std::size_t c_dp = col("d_phase");

    std::vector<FrameFeatures> out;
    for (const auto& row : t.rows) {
        FrameFeatures r;
        r.frame_index = static_cast<std::size_t>(std::stoull(row[c_frame]));
        r.time_s = parse_double(row[c_time]);
        r.amplitude = parse_double(row[c_amp]);
        r.phase = parse_double(row[c_phase]);
        r.d_amplitude = parse_double(row[c_da]);
        r.d_phase = parse_double(row[c_dp]);
        if (bin_index) {
            *bin_index = static_cast<std::size_t>(std::stoull(row[c_bin]));
        }
        out.push_back(r);
    }
    return out;
}

void write_labeled_csv(const std::string& path, const std::vector<FrameFeatures>& rows,
                       std::size_t bin_index, const std::vector<int>& labels,
                       const std::string& session) {
    if (rows.size() != labels.size()) {
        throw std::invalid_argument("feature/label count mismatch");
    }
    CsvTable t;
    t.header = {"frame_index", "time_s", "bin_index", "amplitude",
                "phase",       "d_amplitude", "d_phase",   "label"};
    if (!session.empty()) {
        t.header.push_back("session");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = feature_row(rows[i], bin_index);
        row.push_back(to_string(static_cast<ExpressionLabel>(labels[i])));
        if (!session.empty()) {
            row.push_back(session);
        }
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

ml::Dataset read_labeled_dataset(const std::string& path) {
    const CsvTable t = read_csv(path);
    const std::ptrdiff_t c_amp = t.column("amplitude");
    const std::ptrdiff_t c_phase = t.column("phase");
    const std::ptrdiff_t c_label = t.column("label");
    if (c_amp < 0 || c_phase < 0 || c_label < 0) {
        throw std::runtime_error("labeled CSV needs amplitude, phase and label columns: " +
                                 path);
    }
    const std::ptrdiff_t c_session = t.column("session");

    ml::Dataset data;
    for (const auto& row : t.rows) {
        data.x.push_back({parse_double(row[static_cast<std::size_t>(c_amp)]),
                          parse_double(row[static_cast<std::size_t>(c_phase)])});
        data.y.push_back(static_cast<int>(
            label_from_string(row[static_cast<std::size_t>(c_label)])));
        if (c_session >= 0) {
            data.session.push_back(row[static_cast<std::size_t>(c_session)]);
        }
    }
    data.validate();
    return data;
}

void write_predictions_csv(const std::string& path,
                           const std::vector<FrameFeatures>& rows,
                           const std::vector<int>& labels) {
    if (rows.size() != labels.size()) {
        throw std::invalid_argument("feature/label count mismatch");
    }
    CsvTable t;
    t.header = {"frame_index", "time_s", "label"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.rows.push_back({std::to_string(rows[i].frame_index),
                          format_double(rows[i].time_s),
                          to_string(static_cast<ExpressionLabel>(labels[i]))});
    }
    write_csv(path, t);
}

std::vector<int> read_predictions_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const std::ptrdiff_t c_label = t.column("label");
    if (c_label < 0) {
        throw std::runtime_error("prediction CSV needs a label column: " + path);
    }
    std::vector<int> out;
    for (const auto& row : t.rows) {
        out.push_back(static_cast<int>(
            label_from_string(row[static_cast<std::size_t>(c_label)])));
    }
    return out;
}

}  // namespace chirpsense
