#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace faceshape::text {

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> lines(std::string_view text);

/// Whole-field strict parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// 17 significant digits, as used by the model format.
std::string format_double17(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace faceshape::text
