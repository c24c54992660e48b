#pragma once

#include "satsynth/image.hpp"
#include "satsynth/labels.hpp"

#include <filesystem>

namespace satsynth {

/// 8-bit PNG, gray or RGB. Encoding settings are fixed and no timestamp
/// chunk is written, so identical pixels give identical files.
void write_png(const std::filesystem::path& path, const ByteImage& image);
/// Loads 8-bit gray, gray+alpha, RGB or RGBA; alpha is dropped and gray is
/// returned with 1 channel, everything else with 3. Throws kIo.
ByteImage read_png(const std::filesystem::path& path);

/// Portable float map: header "PF" (3 channels) or "Pf" (1 channel), then
/// "<width> <height>", then "-1.0" (little-endian), each line ending in
/// '\n', followed by float32 samples with rows stored bottom-to-top.
/// `image` rows are top-to-bottom in memory.
void write_pfm(const std::filesystem::path& path, const FloatImage& image);
FloatImage read_pfm(const std::filesystem::path& path);

/// Heatmap tensor file: "SPNH", u32 version (1), u32 height, u32 width,
/// u32 channels, then height*width*channels little-endian float32 values in
/// row-major (row, col, channel) order.
void write_heatmaps(const std::filesystem::path& path, const HeatmapTensor& tensor);
HeatmapTensor read_heatmaps(const std::filesystem::path& path);

}  // namespace satsynth
