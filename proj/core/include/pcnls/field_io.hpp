#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcnls/grid.hpp"

namespace pcnls {

/// Binary field layout, all integers and floats little-endian:
///
///   "NLSF" | u32 version | u32 N | u32 m | N x (u32 n_a, f64 L_a) | f64 values...
///
/// Values are row-major with axis 0 slowest.
inline constexpr std::uint32_t kFieldFormatVersion = 1;

std::vector<std::uint8_t> encode_field(const Field& u);
/// Throws FormatError on bad magic, unknown version or a length mismatch.
Field decode_field(std::span<const std::uint8_t> bytes);

void write_field(const std::filesystem::path& path, const Field& u);
Field read_field(const std::filesystem::path& path);

}  // namespace pcnls
