#pragma once

#include <cmath>

#include "jsteg/coding_rate.hpp"
#include "jsteg/jpeg_model.hpp"

namespace jsteg {

// Built-in cost sources for self-contained runs. Both are plain baselines
// standing in for a learned probability map; neither claims any security
// pedigree beyond "flat is non-adaptive, energy is content-adaptive".

/// Uniform cost 1 everywhere, DC included.
inline CostMap flat_costs(const CoefficientPlane& plane) {
    return CostMap::symmetric(Grid<double>(plane.height(), plane.width(), 1.0));
}

/// Content-adaptive baseline: within each block every AC coefficient costs
/// 1 / (0.1 + E) where E is the block's mean dequantized AC magnitude, so
/// busy blocks are cheap and flat blocks are expensive. DC coefficients are
/// wet.
inline CostMap energy_costs(const CoefficientPlane& plane) {
    const std::size_t h = plane.height(), w = plane.width();
    detail::require_block_aligned(h, w, "energy_costs");
    Grid<double> rho(h, w);
    for (std::size_t by = 0; by < h; by += kBlock) {
        for (std::size_t bx = 0; bx < w; bx += kBlock) {
            double energy = 0.0;
            for (std::size_t i = 0; i < kBlock; ++i) {
                for (std::size_t j = 0; j < kBlock; ++j) {
                    if (i == 0 && j == 0) continue;
                    energy += std::abs(plane.values(by + i, bx + j)) * plane.quant(i, j);
                }
            }
            energy /= 63.0;
            const double cost = 1.0 / (0.1 + energy);
            for (std::size_t i = 0; i < kBlock; ++i) {
                for (std::size_t j = 0; j < kBlock; ++j) {
                    rho(by + i, bx + j) = (i == 0 && j == 0) ? kInfCost : cost;
                }
            }
        }
    }
    return CostMap::symmetric(std::move(rho));
}

}  // namespace jsteg
