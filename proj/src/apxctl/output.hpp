#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace apxctl {

/// 17 significant digits, dot decimal; round-trips every finite double.
std::string format_double(double value);

/// Writes the leading `# ` schema comment line followed by the header row.
void write_csv_schema(std::ostream& out, const std::vector<std::string>& columns);

/// FNV-1a, used for config hashes; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Writes `contents` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace apxctl
