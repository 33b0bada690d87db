#include "leaflab/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <zlib.h>

#include "leaflab/errors.hpp"

namespace leaflab {

GrayImage shade(const EscapeRaster& raster) {
    GrayImage img{raster.resolution, raster.resolution, {}};
    img.pixels.resize(raster.counts.size());
    const double scale = std::log1p(static_cast<double>(raster.max_iter));
    for (std::size_t i = 0; i < raster.counts.size(); ++i) {
        const auto n = raster.counts[i];
        img.pixels[i] = n >= raster.max_iter
                            ? 0
                            : static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::log1p(static_cast<double>(n)) / scale)));
    }
    return img;
}

GrayImage splat(const std::vector<Complex>& points, const Window& window, int resolution) {
    GrayImage img{resolution, resolution, std::vector<std::uint8_t>(static_cast<std::size_t>(resolution) * resolution, 255)};
    const double step = 2.0 * window.half_width / resolution;
    for (const auto& z : points) {
        if (!window.contains(z)) continue;
        int col = static_cast<int>(std::floor((z.real() - (window.center.real() - window.half_width)) / step));
        int row = static_cast<int>(std::floor(((window.center.imag() + window.half_width) - z.imag()) / step));
        col = std::clamp(col, 0, resolution - 1);
        row = std::clamp(row, 0, resolution - 1);
        img.pixels[static_cast<std::size_t>(row) * resolution + col] = 0;
    }
    return img;
}

std::string encode_pgm(const GrayImage& img) {
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

namespace {

void put_u32(std::string& s, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) s.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    put_u32(out, static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                                                  static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png(const GrayImage& img) {
    std::string raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
    for (int r = 0; r < img.height; ++r) {
        raw.push_back('\0');  // filter: none
        raw.append(reinterpret_cast<const char*>(img.pixels.data()) + static_cast<std::size_t>(r) * img.width,
                   static_cast<std::size_t>(img.width));
    }
    uLongf len = compressBound(static_cast<uLong>(raw.size()));
    std::string packed(len, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &len, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK)
        fail(ErrorCode::IoError, "zlib compression failed");
    packed.resize(len);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(img.width));
    put_u32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr += std::string("\x08\x00\x00\x00\x00", 5);  // 8-bit grayscale
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", "");
    return out;
}

std::string cloud_csv(const std::vector<SpherePoint>& points) {
    std::string out;
    std::array<char, 96> buf{};
    for (const auto& p : points) {
        if (p.is_infinite()) {
            out += "inf,inf\n";
            continue;
        }
        std::snprintf(buf.data(), buf.size(), "%.17g,%.17g\n", p.value().real(), p.value().imag());
        out += buf.data();
    }
    return out;
}

void write_binary_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace leaflab
