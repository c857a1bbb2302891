#ifndef EBPROF_CSV_HPP
#define EBPROF_CSV_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ebprof::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and `""` escapes.
std::vector<std::string> split(std::string_view line);

std::string_view trim(std::string_view s);

/// Strict decimal parse of the whole (trimmed) field. Rejects thousands separators,
/// trailing garbage and non-finite spellings.
std::optional<double> parse_number(std::string_view field);

/// Shortest text that round-trips to the same double.
std::string format_number(double v);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace ebprof::csv

#endif
