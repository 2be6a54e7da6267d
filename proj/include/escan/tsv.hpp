#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace escan::tsv {

// Splits one line on tabs. Empty fields are kept.
std::vector<std::string> split(std::string_view line);

std::string join(const std::vector<std::string>& fields);

// Reads all lines of a UTF-8 text file. Lines starting with '#' and blank
// lines are skipped when skip_comments is set. Throws IoError if the file
// cannot be opened.
std::vector<std::string> read_lines(const std::string& path, bool skip_comments = true);

// Reads a whole file as bytes (for byte-identity comparisons).
std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);

// Shortest round-trip decimal form of a double, identical on every run.
std::string fmt_double(double v);

double parse_double(std::string_view s);
long parse_long(std::string_view s);

std::string to_lower(std::string_view s);

}  // namespace escan::tsv
