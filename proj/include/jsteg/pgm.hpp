#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "jsteg/jpeg_model.hpp"

namespace jsteg {

// Binary PGM (P5), 8-bit only. The spatial-domain exchange format.

namespace detail {

inline int pgm_next_token(std::istream& in) {
    // skip whitespace and '#' comments, then parse a decimal integer
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw std::runtime_error("pgm: malformed header token");
    }
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > 1 << 20) throw std::runtime_error("pgm: header value out of range");
        ch = in.get();
    }
    return value;
}

}  // namespace detail

inline SpatialImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path.string());
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') {
        throw std::runtime_error("read_pgm: " + path.string() + ": not a binary PGM (P5)");
    }
    const int w = detail::pgm_next_token(in);
    const int h = detail::pgm_next_token(in);
    const int maxval = detail::pgm_next_token(in);
    if (w <= 0 || h <= 0) throw std::runtime_error("read_pgm: bad dimensions");
    if (maxval <= 0 || maxval > 255) {
        throw std::runtime_error("read_pgm: only 8-bit PGM supported (maxval <= 255)");
    }
    // single whitespace byte separates header from raster
    std::string raster(static_cast<std::size_t>(w) * h, '\0');
    in.read(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
        throw std::runtime_error("read_pgm: " + path.string() + ": truncated raster");
    }
    SpatialImage img{Grid<double>(h, w)};
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        img.pixels[k] = static_cast<double>(static_cast<unsigned char>(raster[k]));
    }
    return img;
}

inline void write_pgm(const std::filesystem::path& path, const SpatialImage& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::string raster(img.pixels.size(), '\0');
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        const double v = img.pixels[k];
        if (v != std::floor(v) || v < 0.0 || v > 255.0) {
            throw std::invalid_argument("write_pgm: pixels must be integers in [0,255]");
        }
        raster[k] = static_cast<char>(static_cast<unsigned char>(v));
    }
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path.string());
}

}  // namespace jsteg
