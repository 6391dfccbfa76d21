#pragma once

#include "panoworld/common/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace panoworld::io {

using Bytes = std::vector<std::uint8_t>;

/// 8-bit RGB PNG. Channels are rounded to the nearest of 256 levels, so
/// images already on the 8-bit grid (see quantize8) round-trip exactly.
Bytes encode_png(const Image& image);
Image decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

/// Writes `<path>` and a `<stem>.json` sidecar recording the projection.
void write_panorama(const std::filesystem::path& path, const Panorama& pano);

/// Portable float map (little-endian). Lossless for float channels; used by
/// the session store and trajectory logs where views are not on the 8-bit grid.
void write_pfm(const std::filesystem::path& path, const Image& image);
Image read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const ScalarMap& map);
ScalarMap read_pfm_scalar(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
Bytes base64_decode(std::string_view text);

}  // namespace panoworld::io
