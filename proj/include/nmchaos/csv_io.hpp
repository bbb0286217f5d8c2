#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace nmchaos {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_double(double v);

/// Writes through a temporary sibling file and renames it onto `path` only
/// after `writer` returns; on any exception the temporary is removed and
/// `path` is untouched.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

}  // namespace nmchaos
