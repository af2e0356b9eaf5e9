#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdcg::csv {

/// Splits one line on commas. Surrounding double quotes and a trailing CR are
/// stripped; embedded commas inside quotes are not supported.
std::vector<std::string> split_line(std::string_view line);

/// Full-string decimal/scientific parse; nullopt when anything is left over.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Fixed 17-significant-digit formatting used by every numeric CSV writer.
std::string format_double(double v);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

} // namespace cdcg::csv
