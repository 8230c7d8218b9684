#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tiltopt::csv {

// Shortest decimal form that round-trips the exact double; keeps CSV files
// lossless so reports regenerated from traces are byte-identical.
std::string num(double v);
std::string num(int64_t v);

double to_double(const std::string& field);
int64_t to_int(const std::string& field);

std::vector<std::string> split_line(const std::string& line);

// Parses an entire CSV file (no quoting; our writers never emit commas in
// fields). Returns rows including the header.
std::vector<std::vector<std::string>> read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace tiltopt::csv
