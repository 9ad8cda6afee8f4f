#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcqr {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string to_hex(std::uint64_t value);

// Splits text into UTF-8 code points; invalid bytes pass through one by one.
std::vector<std::string> utf8_chars(std::string_view text);

std::string lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);

// Fixed-format double for reports: deterministic bytes for identical values.
std::string fmt_double(double value);

}  // namespace mcqr
