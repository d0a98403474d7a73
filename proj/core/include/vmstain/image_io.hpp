#pragma once

#include "vmstain/image.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vmstain {

/// Loads an 8-bit RGB PNG or TIFF file; values map to [0,1] via x/255.
PlanarImage load_image(const std::filesystem::path& path);

/// Saves as 8-bit RGB (format chosen by extension: .png or .tif/.tiff).
/// Values map via round(x*255), half away from zero, clamped to [0,255].
void save_image(const std::filesystem::path& path, const PlanarImage& img);

/// In-memory PNG encode/decode of an 8-bit RGB image (wire format for the
/// external backend protocol and the on-disk patch files).
std::vector<std::uint8_t> encode_png(const PlanarImage& img);
PlanarImage decode_png(const std::vector<std::uint8_t>& bytes);

/// Quantize one [0,1] sample to 8 bits (round half away from zero).
std::uint8_t quantize8(double v);

} // namespace vmstain
