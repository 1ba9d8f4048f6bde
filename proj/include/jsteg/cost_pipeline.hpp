#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "jsteg/coding_rate.hpp"
#include "jsteg/jpeg_model.hpp"

namespace jsteg {

/// Knobs for estimated-side-information cost adjustment. delta is the
/// amplitude-trust threshold, eta the polarity factor applied when the
/// estimate's magnitude exceeds delta. eta = 1 with delta = 0 disables the
/// asymmetry entirely.
struct EsiParams {
    double delta = 0.05;
    double eta = 0.65;

    void validate() const {
        if (!(delta >= 0.0 && delta <= 0.5)) {
            throw std::invalid_argument("EsiParams: delta must lie in [0, 0.5]");
        }
        if (!(eta > 0.0 && eta <= 1.0)) {
            throw std::invalid_argument("EsiParams: eta must lie in (0, 1]");
        }
    }
};

/// Smooths a symmetric cost map across blocks, one DCT mode at a time: the
/// cross-block grid of costs at each of the 64 mode positions is convolved
/// with a normalized 2-D Gaussian (std sigma, size (2 radius + 1)^2, edge
/// replication). Modes never mix.
inline CostMap smooth_costs(const CostMap& costs, double sigma, int radius) {
    if (!costs.is_symmetric()) {
        throw std::invalid_argument("smooth_costs: expects a symmetric map");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("smooth_costs: sigma must be > 0");
    if (radius < 0) throw std::invalid_argument("smooth_costs: radius must be >= 0");
    const std::size_t h = costs.height(), w = costs.width();
    detail::require_block_aligned(h, w, "smooth_costs");

    const int ksize = 2 * radius + 1;
    std::vector<double> kernel(static_cast<std::size_t>(ksize) * ksize);
    double norm = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const double v = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            kernel[static_cast<std::size_t>(dy + radius) * ksize + (dx + radius)] = v;
            norm += v;
        }
    }
    for (double& v : kernel) v /= norm;

    const long bh = static_cast<long>(h / kBlock);
    const long bw = static_cast<long>(w / kBlock);
    Grid<double> out(h, w);
    for (std::size_t mu = 0; mu < kBlock; ++mu) {
        for (std::size_t mv = 0; mv < kBlock; ++mv) {
            for (long by = 0; by < bh; ++by) {
                for (long bx = 0; bx < bw; ++bx) {
                    double acc = 0.0;
                    for (int dy = -radius; dy <= radius; ++dy) {
                        long sy = by + dy;
                        sy = sy < 0 ? 0 : (sy >= bh ? bh - 1 : sy);
                        for (int dx = -radius; dx <= radius; ++dx) {
                            long sx = bx + dx;
                            sx = sx < 0 ? 0 : (sx >= bw ? bw - 1 : sx);
                            acc += kernel[static_cast<std::size_t>(dy + radius) * ksize +
                                          (dx + radius)] *
                                   costs.rho_plus(static_cast<std::size_t>(sy) * kBlock + mu,
                                                  static_cast<std::size_t>(sx) * kBlock + mv);
                        }
                    }
                    out(static_cast<std::size_t>(by) * kBlock + mu,
                        static_cast<std::size_t>(bx) * kBlock + mv) = acc;
                }
            }
        }
    }
    return CostMap::symmetric(std::move(out));
}

/// True side-information adjustment: the change toward sign(e) costs
/// (1 - 2|e|) rho, the opposite direction keeps rho. Requires |e| <= 0.5
/// (genuine rounding error); e = 0 leaves the coefficient symmetric. Wet
/// coefficients (rho = inf) stay wet no matter what e says.
inline CostMap adjust_costs_si(const CostMap& costs, const SideInfoMap& e) {
    if (!costs.is_symmetric()) {
        throw std::invalid_argument("adjust_costs_si: expects a symmetric map");
    }
    require_same_shape(costs.rho_plus, e.values, "adjust_costs_si");
    Grid<double> plus = costs.rho_plus;
    Grid<double> minus = costs.rho_minus;
    for (std::size_t k = 0; k < e.values.size(); ++k) {
        const double ev = e.values[k];
        if (!(std::abs(ev) <= 0.5)) {
            throw std::invalid_argument(
                "adjust_costs_si: |e| > 0.5; use adjust_costs_esi for estimates");
        }
        // wet coefficients stay wet: |e| = 0.5 would otherwise turn
        // infinity * 0 into NaN
        if (ev > 0.0 && !std::isinf(plus[k])) {
            plus[k] = (1.0 - 2.0 * std::abs(ev)) * plus[k];
        } else if (ev < 0.0 && !std::isinf(minus[k])) {
            minus[k] = (1.0 - 2.0 * std::abs(ev)) * minus[k];
        }
    }
    return CostMap{std::move(plus), std::move(minus)};
}

/// Estimated side-information adjustment: the change toward sign(e_hat)
/// costs g(e_hat) rho with g = 1 - 2|e_hat| when |e_hat| <= delta and eta
/// otherwise. Estimates may exceed 0.5 in magnitude; delta = 0 reduces to
/// polarity-only adjustment and e_hat = 0 leaves the coefficient symmetric.
inline CostMap adjust_costs_esi(const CostMap& costs, const SideInfoMap& e_hat,
                                const EsiParams& params) {
    if (!costs.is_symmetric()) {
        throw std::invalid_argument("adjust_costs_esi: expects a symmetric map");
    }
    params.validate();
    require_same_shape(costs.rho_plus, e_hat.values, "adjust_costs_esi");
    Grid<double> plus = costs.rho_plus;
    Grid<double> minus = costs.rho_minus;
    for (std::size_t k = 0; k < e_hat.values.size(); ++k) {
        const double ev = e_hat.values[k];
        if (std::isnan(ev)) {
            throw std::invalid_argument("adjust_costs_esi: NaN side-information");
        }
        if (ev == 0.0) continue;
        const double g =
            std::abs(ev) <= params.delta ? (1.0 - 2.0 * std::abs(ev)) : params.eta;
        if (ev > 0.0 && !std::isinf(plus[k])) {
            plus[k] = g * plus[k];
        } else if (ev < 0.0 && !std::isinf(minus[k])) {
            minus[k] = g * minus[k];
        }
    }
    return CostMap{std::move(plus), std::move(minus)};
}

}  // namespace jsteg
