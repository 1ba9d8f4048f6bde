#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jsteg/jpeg_model.hpp"
#include "jsteg/pgm.hpp"
#include "jsteg/rng.hpp"
#include "jsteg/sideinfo_est.hpp"

namespace jsteg {

/// Deterministic synthetic precover: a random illumination ramp plus a few
/// sinusoidal gratings plus band-limited noise whose amplitude varies
/// smoothly across the image, so every image mixes flat and busy regions.
/// Integer 8-bit pixels; fully determined by (height, width, seed).
inline SpatialImage make_synthetic_image(std::size_t height, std::size_t width,
                                         std::uint64_t seed) {
    rng::Stream stream(seed);
    const double pi = std::acos(-1.0);
    Grid<double> img(height, width, 0.0);

    // illumination ramp
    const double gx = (stream.next_uniform() - 0.5) * 120.0 / static_cast<double>(width);
    const double gy = (stream.next_uniform() - 0.5) * 120.0 / static_cast<double>(height);
    const double base = 80.0 + stream.next_uniform() * 96.0;
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            img(r, c) = base + gx * static_cast<double>(c) + gy * static_cast<double>(r);
        }
    }

    // sinusoidal gratings
    const int n_waves = 2 + static_cast<int>(stream.next_below(3));
    for (int k = 0; k < n_waves; ++k) {
        const double fx = (stream.next_uniform() - 0.5) * 0.35;
        const double fy = (stream.next_uniform() - 0.5) * 0.35;
        const double amp = 4.0 + stream.next_uniform() * 18.0;
        const double phase = stream.next_uniform() * 2.0 * pi;
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t c = 0; c < width; ++c) {
                img(r, c) += amp * std::sin(2.0 * pi * (fx * c + fy * r) + phase);
            }
        }
    }

    // band-limited noise, gated by a smooth amplitude field so texture
    // density varies across the image
    Grid<double> noise(height, width);
    Grid<double> gate(height, width);
    for (std::size_t k = 0; k < noise.size(); ++k) noise[k] = stream.next_uniform() - 0.5;
    for (std::size_t k = 0; k < gate.size(); ++k) gate[k] = stream.next_uniform();
    SpatialImage noise_img{std::move(noise)};
    SpatialImage gate_img{std::move(gate)};
    noise_img = gaussian_blur(noise_img, 0.8);
    gate_img = gaussian_blur(gate_img, static_cast<double>(std::min(height, width)) / 10.0);
    // stretch the gate to [0, 1]
    double gmin = gate_img.pixels[0], gmax = gate_img.pixels[0];
    for (double v : gate_img.pixels) {
        gmin = std::min(gmin, v);
        gmax = std::max(gmax, v);
    }
    const double gspan = gmax > gmin ? gmax - gmin : 1.0;
    const double noise_amp = 30.0 + stream.next_uniform() * 50.0;
    for (std::size_t k = 0; k < img.size(); ++k) {
        const double g = (gate_img.pixels[k] - gmin) / gspan;
        img[k] += noise_amp * g * noise_img.pixels[k];
    }

    for (auto& v : img) v = std::clamp(std::round(v), 0.0, 255.0);
    return SpatialImage{std::move(img)};
}

/// Writes `count` synthetic precovers into `dir` as img_NNNN.pgm. Image k
/// uses the derived stream (seed, k), so corpora are reproducible and
/// extendable.
inline std::vector<std::filesystem::path> generate_corpus(const std::filesystem::path& dir,
                                                          std::size_t count,
                                                          std::size_t height, std::size_t width,
                                                          std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    paths.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "img_%04zu.pgm", k);
        const auto path = dir / name;
        write_pgm(path, make_synthetic_image(height, width, rng::derive_stream(seed, k)));
        paths.push_back(path);
    }
    return paths;
}

}  // namespace jsteg
