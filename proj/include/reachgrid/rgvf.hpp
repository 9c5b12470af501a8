#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reachgrid/grid.hpp"

namespace reachgrid {

// Binary value field container, version 1. Layout, all little endian:
//   "RGVF"  u16 version  u16 ndim
//   per dim: f64 min, f64 max, u32 count, u8 periodic
//   u16 label_len, label bytes (UTF-8)
//   values as f64, row major, last dim contiguous
//   u32 CRC32 (IEEE polynomial) of every preceding byte
inline constexpr std::uint16_t kRgvfVersion = 1;

void write_rgvf(const std::filesystem::path& path, const ValueField& field);

/// Axis names are not stored in the file. When `axis_names` is absent they
/// are assigned by dimension convention: 5 dims get the relative-state
/// layout (x_rel, y_rel, v_h, v_r, psi_rel), 4 dims the world-frame car
/// layout (x_r, y_r, v_r, psi_r), anything else d0, d1, ...
ValueField read_rgvf(const std::filesystem::path& path,
                     std::optional<std::vector<std::string>> axis_names = std::nullopt);

std::uint32_t crc32_ieee(const std::uint8_t* data, std::size_t len);

std::vector<std::string> default_axis_names(int ndim);

}  // namespace reachgrid
