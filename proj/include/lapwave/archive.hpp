#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lapwave/errors.hpp"

namespace lapwave {

// Minimal decompressors for the dataset fetch helper (zlib-backed).

// gzip (RFC 1952) stream -> raw bytes.
std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in);

// Extracts one entry from a zip archive: the first whose name ends with
// name_suffix (empty = first entry). Supports stored and deflated entries.
std::vector<std::uint8_t> unzip_single(const std::vector<std::uint8_t>& in,
                                       const std::string& name_suffix = "");

} // namespace lapwave
