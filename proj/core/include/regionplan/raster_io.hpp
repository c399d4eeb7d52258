#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "regionplan/raster.hpp"

namespace regionplan {

using GreyImage = Raster<std::uint8_t>;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
using RgbImage = Raster<Rgb>;

/// Reads a binary greyscale PGM (P5) with maxval 255. Comments in the header
/// are skipped.
GreyImage read_pgm(const std::filesystem::path& path);
GreyImage parse_pgm(std::span<const std::uint8_t> bytes);

void write_pgm(const std::filesystem::path& path, const GreyImage& image);
std::vector<std::uint8_t> encode_pgm(const GreyImage& image);

/// Binary PPM (P6), maxval 255.
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

}  // namespace regionplan
