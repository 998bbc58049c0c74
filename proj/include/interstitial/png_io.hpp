#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "interstitial/imaging.hpp"

namespace interstitial::imaging {

class PngError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decodes 8-bit RGB/RGBA/gray PNG data; alpha is dropped, not composited.
RgbRaster decode_png(std::span<const std::uint8_t> bytes);
RgbRaster read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const RgbRaster& img);
void write_png(const RgbRaster& img, const std::filesystem::path& path);

}  // namespace interstitial::imaging
