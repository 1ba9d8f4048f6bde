#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsteg/grid.hpp"
#include "jsteg/jpeg_model.hpp"

namespace jsteg {

/// A guess at the uncompressed spatial image that preceded some rounded
/// coefficient plane. Always real reconstruction form.
struct PrecoverEstimate {
    SpatialImage image;
    std::string estimator_id;
};

/// Separable spatial Gaussian blur with edge replication; std sigma,
/// radius ceil(3 sigma). sigma = 0 is the identity.
inline SpatialImage gaussian_blur(const SpatialImage& img, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) return img;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        kernel[d + radius] = std::exp(-d * d / (2.0 * sigma * sigma));
        norm += kernel[d + radius];
    }
    for (double& v : kernel) v /= norm;

    const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
    Grid<double> tmp(img.height(), img.width());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int d = -radius; d <= radius; ++d) {
                long sc = c + d;
                sc = sc < 0 ? 0 : (sc >= w ? w - 1 : sc);
                acc += kernel[d + radius] * img.pixels(r, sc);
            }
            tmp(r, c) = acc;
        }
    }
    Grid<double> out(img.height(), img.width());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int d = -radius; d <= radius; ++d) {
                long sr = r + d;
                sr = sr < 0 ? 0 : (sr >= h ? h - 1 : sr);
                acc += kernel[d + radius] * tmp(sr, c);
            }
            out(r, c) = acc;
        }
    }
    return SpatialImage{std::move(out)};
}

/// Deterministic precover estimator: dequantize, invert the block DCT, then
/// denoise with a spatial Gaussian of std `strength`. strength = 0 is plain
/// decompression. A trained network can replace this through the GridFile
/// import path without touching anything downstream.
inline PrecoverEstimate estimate_precover_baseline(const CoefficientPlane& plane,
                                                   double strength) {
    if (plane.kind != PlaneKind::rounded) {
        throw std::invalid_argument("estimate_precover_baseline: expects a rounded plane");
    }
    SpatialImage est = gaussian_blur(decompress(plane), strength);
    return PrecoverEstimate{std::move(est), "baseline:sigma=" + std::to_string(strength)};
}

/// Estimated rounding error: e_hat = DCT(estimate)/Q - C. The magnitude is
/// deliberately not clipped; estimates can and do exceed 0.5.
inline SideInfoMap estimated_side_info(const CoefficientPlane& plane,
                                       const PrecoverEstimate& est) {
    if (plane.kind != PlaneKind::rounded) {
        throw std::invalid_argument("estimated_side_info: expects a rounded plane");
    }
    if (est.image.height() != plane.height() || est.image.width() != plane.width()) {
        throw std::invalid_argument("estimated_side_info: estimate shape mismatch");
    }
    Grid<double> coeffs = forward_block_dct(est.image);
    Grid<double> e(plane.height(), plane.width());
    for (std::size_t r = 0; r < plane.height(); ++r) {
        for (std::size_t c = 0; c < plane.width(); ++c) {
            const double q = plane.quant(r % kBlock, c % kBlock);
            e(r, c) = coeffs(r, c) / q - plane.values(r, c);
        }
    }
    return SideInfoMap{std::move(e)};
}

inline double mse(const SpatialImage& x, const SpatialImage& y) {
    require_same_shape(x.pixels, y.pixels, "mse");
    if (x.pixels.empty()) throw std::invalid_argument("mse: empty images");
    double acc = 0.0;
    for (std::size_t k = 0; k < x.pixels.size(); ++k) {
        const double d = x.pixels[k] - y.pixels[k];
        acc += d * d;
    }
    return acc / static_cast<double>(x.pixels.size());
}

/// SSIM configuration. Defaults follow the common reference choice: 11x11
/// Gaussian window with std 1.5, unit exponents, C1 = (0.01 * 255)^2,
/// C2 = (0.03 * 255)^2, C3 = C2 / 2.
struct SsimParams {
    int window = 11;
    double window_sigma = 1.5;
    double c1 = 0.01 * 255.0 * 0.01 * 255.0;
    double c2 = 0.03 * 255.0 * 0.03 * 255.0;
    double c3 = 0.03 * 255.0 * 0.03 * 255.0 / 2.0;
    double exp_l = 1.0;
    double exp_c = 1.0;
    double exp_s = 1.0;

    void validate() const {
        if (window < 1 || window % 2 == 0) {
            throw std::invalid_argument("SsimParams: window must be odd and >= 1");
        }
        if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) {
            throw std::invalid_argument("SsimParams: stability constants must be > 0");
        }
        if (!(exp_l > 0.0 && exp_c > 0.0 && exp_s > 0.0)) {
            throw std::invalid_argument("SsimParams: exponents must be > 0");
        }
        if (!(window_sigma > 0.0)) {
            throw std::invalid_argument("SsimParams: window_sigma must be > 0");
        }
    }
};

namespace detail {

inline double pow_or_identity(double base, double e) {
    return e == 1.0 ? base : std::pow(base, e);
}

}  // namespace detail

/// Mean structural similarity over all fully-contained sliding windows:
/// per window L^l * C^m * S^n from Gaussian-weighted means, deviations and
/// covariance. sigma_x sigma_y is evaluated as sqrt(var_x * var_y) so that
/// identical windows score exactly 1.
inline double ssim(const SpatialImage& x, const SpatialImage& y, const SsimParams& params = {}) {
    params.validate();
    require_same_shape(x.pixels, y.pixels, "ssim");
    const std::size_t h = x.height(), w = x.width();
    const std::size_t win = static_cast<std::size_t>(params.window);
    if (h < win || w < win) throw std::invalid_argument("ssim: window larger than image");

    // normalized 2-D Gaussian window
    const int radius = params.window / 2;
    Grid<double> weights(win, win);
    double norm = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const double v =
                std::exp(-(dy * dy + dx * dx) / (2.0 * params.window_sigma * params.window_sigma));
            weights(dy + radius, dx + radius) = v;
            norm += v;
        }
    }
    for (auto& v : weights) v /= norm;

    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r0 = 0; r0 + win <= h; ++r0) {
        for (std::size_t c0 = 0; c0 + win <= w; ++c0) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < win; ++i)
                for (std::size_t j = 0; j < win; ++j) {
                    const double wt = weights(i, j);
                    mx += wt * x.pixels(r0 + i, c0 + j);
                    my += wt * y.pixels(r0 + i, c0 + j);
                }
            double vx = 0.0, vy = 0.0, cxy = 0.0;
            for (std::size_t i = 0; i < win; ++i)
                for (std::size_t j = 0; j < win; ++j) {
                    const double wt = weights(i, j);
                    const double dx = x.pixels(r0 + i, c0 + j) - mx;
                    const double dy = y.pixels(r0 + i, c0 + j) - my;
                    vx += wt * dx * dx;
                    vy += wt * dy * dy;
                    cxy += wt * dx * dy;
                }
            const double sxsy = std::sqrt(vx * vy);
            const double lum = (2.0 * mx * my + params.c1) / (mx * mx + my * my + params.c1);
            const double con = (2.0 * sxsy + params.c2) / (vx + vy + params.c2);
            const double str = (cxy + params.c3) / (sxsy + params.c3);
            total += detail::pow_or_identity(lum, params.exp_l) *
                     detail::pow_or_identity(con, params.exp_c) *
                     detail::pow_or_identity(str, params.exp_s);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

enum class EstimationLossMode { minimization_consistent, paper_literal };

struct EstimationLoss {
    double value = 0.0;
    double ssim_value = 0.0;
    double mse_value = 0.0;
    EstimationLossMode mode = EstimationLossMode::minimization_consistent;
};

/// Estimator training objective. The default combines the two metrics so
/// that smaller means more similar: (1 - SSIM) + MSE. The literal SSIM + MSE
/// form is kept behind a mode switch; which one was used travels with the
/// result.
inline EstimationLoss estimation_loss(
    const SpatialImage& x, const SpatialImage& y, const SsimParams& params = {},
    EstimationLossMode mode = EstimationLossMode::minimization_consistent) {
    const double s = ssim(x, y, params);
    const double m = mse(x, y);
    const double value = mode == EstimationLossMode::paper_literal ? s + m : (1.0 - s) + m;
    return EstimationLoss{value, s, m, mode};
}

/// Fraction of selected coefficients whose estimated sign matches the true
/// sign; sign(0) agrees only with sign 0.
inline double polarity_agreement(const SideInfoMap& e_true, const SideInfoMap& e_hat,
                                 const Grid<std::uint8_t>& mask) {
    require_same_shape(e_true.values, e_hat.values, "polarity_agreement");
    if (e_true.values.height() != mask.height() || e_true.values.width() != mask.width()) {
        throw std::invalid_argument("polarity_agreement: mask shape mismatch");
    }
    auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
    std::size_t selected = 0, agree = 0;
    for (std::size_t k = 0; k < mask.size(); ++k) {
        if (!mask[k]) continue;
        ++selected;
        if (sgn(e_true.values[k]) == sgn(e_hat.values[k])) ++agree;
    }
    if (selected == 0) throw std::invalid_argument("polarity_agreement: empty mask");
    return static_cast<double>(agree) / static_cast<double>(selected);
}

/// Mask of coefficients with nonzero true side-information.
inline Grid<std::uint8_t> nonzero_mask(const SideInfoMap& e) {
    Grid<std::uint8_t> mask(e.values.height(), e.values.width());
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = e.values[k] != 0.0 ? 1 : 0;
    return mask;
}

}  // namespace jsteg
