#include "chirpsense/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace chirpsense {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ptrdiff_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return static_cast<std::ptrdiff_t>(i);
        }
    }
    return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open CSV: " + path);
    }
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (first) {
            table.header = split_line(line);
            first = false;
        } else {
            auto row = split_line(line);
            if (row.size() != table.header.size()) {
                throw std::runtime_error("CSV row width mismatch in " + path);
            }
            table.rows.push_back(std::move(row));
        }
    }
    if (first) {
        throw std::runtime_error("CSV has no header row: " + path);
    }
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    auto emit = [&f](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                f << ',';
            }
            f << row[i];
        }
        f << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) {
        emit(row);
    }
}

}  // namespace chirpsense
