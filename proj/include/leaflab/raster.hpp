#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leaflab/julia.hpp"

namespace leaflab {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, row 0 at the top
};

/// Bounded pixels black, escaping pixels brighter the faster they escape.
GrayImage shade(const EscapeRaster& raster);

/// Mark every finite point that falls in the window.
GrayImage splat(const std::vector<Complex>& points, const Window& window, int resolution);

std::string encode_pgm(const GrayImage& img);
std::string encode_png(const GrayImage& img);

/// One "re,im" line per point; infinity is written as "inf,inf".
std::string cloud_csv(const std::vector<SpherePoint>& points);

void write_binary_file(const std::string& path, const std::string& bytes);

}  // namespace leaflab
