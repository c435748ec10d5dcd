#pragma once

#include <string>
#include <vector>

namespace chirpsense {

// Shortest round-trip decimal form (std::to_chars), so emitted files are
// reproducible byte for byte and parse back to the identical double.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by header name; -1 when absent.
    std::ptrdiff_t column(const std::string& name) const;
};

// Minimal comma-separated format: no quoting, values must not contain commas
// or newlines. Sufficient for the numeric/label tables this project emits.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace chirpsense
