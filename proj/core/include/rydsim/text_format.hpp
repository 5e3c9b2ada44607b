#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small helpers for deterministic text output.
namespace rydsim::text {

/// Shortest round-trippable representation ("%.17g" trimmed where exact).
std::string format_double(double x);

/// Fixed-point with `decimals` digits.
std::string format_fixed(double x, int decimals);

/// 64-bit FNV-1a hash, rendered as 16 lowercase hex digits by hex64().
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
/// Writes bytes verbatim (binary mode, so LF stays LF).
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string_view> split(std::string_view line, char sep);
double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);

}  // namespace rydsim::text
