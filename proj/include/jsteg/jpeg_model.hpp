#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <stdexcept>

#include "jsteg/grid.hpp"

namespace jsteg {

inline constexpr std::size_t kBlock = 8;

/// 8-bit grayscale raster. Pixels are stored as doubles so the same type can
/// carry both integer-form images (values in [0,255]) and real-valued
/// reconstructions coming out of the inverse DCT, which are deliberately
/// neither rounded nor clamped.
struct SpatialImage {
    Grid<double> pixels;

    std::size_t height() const { return pixels.height(); }
    std::size_t width() const { return pixels.width(); }
};

/// Baseline JPEG luminance quantization table, entries in [1, 255].
struct QuantTable {
    std::array<std::uint16_t, 64> entries{};

    std::uint16_t operator()(std::size_t u, std::size_t v) const {
        return entries[u * kBlock + v];
    }
    std::uint16_t& operator()(std::size_t u, std::size_t v) {
        return entries[u * kBlock + v];
    }

    friend bool operator==(const QuantTable&, const QuantTable&) = default;
};

enum class PlaneKind { rounded, nonrounded };

/// Grid of quantized DCT coefficients plus the table that produced them.
/// `rounded` planes hold integers (stored as doubles), `nonrounded` planes
/// hold the pre-rounding real values.
struct CoefficientPlane {
    Grid<double> values;
    QuantTable quant;
    PlaneKind kind = PlaneKind::rounded;

    std::size_t height() const { return values.height(); }
    std::size_t width() const { return values.width(); }
};

/// Per-coefficient rounding error e = U - C (or an estimate of it).
struct SideInfoMap {
    Grid<double> values;
};

namespace detail {

// Orthonormal 8-point DCT-II basis: basis[u][i] = c(u) cos((2i+1)u pi / 16),
// c(0) = sqrt(1/8), c(u>0) = 1/2. Rows are orthonormal, so forward/inverse
// transforms are transposes of each other and energy is preserved.
inline const std::array<std::array<double, kBlock>, kBlock>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, kBlock>, kBlock> b{};
        const double pi = std::acos(-1.0);
        for (std::size_t u = 0; u < kBlock; ++u) {
            const double c = (u == 0) ? std::sqrt(1.0 / 8.0) : 0.5;
            for (std::size_t i = 0; i < kBlock; ++i) {
                b[u][i] = c * std::cos((2.0 * i + 1.0) * u * pi / 16.0);
            }
        }
        return b;
    }();
    return basis;
}

inline void require_block_aligned(std::size_t h, std::size_t w, const char* what) {
    if (h == 0 || w == 0 || h % kBlock != 0 || w % kBlock != 0) {
        throw std::invalid_argument(std::string(what) +
                                    ": dimensions must be nonzero multiples of 8");
    }
}

}  // namespace detail

/// Replicates edge pixels so both dimensions become multiples of 8. Callers
/// that want padding must invoke this explicitly; the transforms below reject
/// non-aligned input.
inline SpatialImage pad_to_blocks(const SpatialImage& img) {
    const std::size_t h = img.height(), w = img.width();
    if (h == 0 || w == 0) throw std::invalid_argument("pad_to_blocks: empty image");
    const std::size_t ph = (h + kBlock - 1) / kBlock * kBlock;
    const std::size_t pw = (w + kBlock - 1) / kBlock * kBlock;
    SpatialImage out{Grid<double>(ph, pw)};
    for (std::size_t r = 0; r < ph; ++r) {
        const std::size_t sr = r < h ? r : h - 1;
        for (std::size_t c = 0; c < pw; ++c) {
            const std::size_t sc = c < w ? c : w - 1;
            out.pixels(r, c) = img.pixels(sr, sc);
        }
    }
    return out;
}

/// Per-block orthonormal 2-D DCT-II of the level-shifted image (pixels - 128).
inline Grid<double> forward_block_dct(const SpatialImage& img) {
    const std::size_t h = img.height(), w = img.width();
    detail::require_block_aligned(h, w, "forward_block_dct");
    const auto& basis = detail::dct_basis();

    Grid<double> out(h, w);
    double shifted[kBlock][kBlock];
    double tmp[kBlock][kBlock];
    for (std::size_t by = 0; by < h; by += kBlock) {
        for (std::size_t bx = 0; bx < w; bx += kBlock) {
            for (std::size_t i = 0; i < kBlock; ++i)
                for (std::size_t j = 0; j < kBlock; ++j)
                    shifted[i][j] = img.pixels(by + i, bx + j) - 128.0;
            // rows: tmp = shifted * B^T
            for (std::size_t i = 0; i < kBlock; ++i) {
                for (std::size_t v = 0; v < kBlock; ++v) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < kBlock; ++j) s += shifted[i][j] * basis[v][j];
                    tmp[i][v] = s;
                }
            }
            // columns: out = B * tmp
            for (std::size_t u = 0; u < kBlock; ++u) {
                for (std::size_t v = 0; v < kBlock; ++v) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < kBlock; ++i) s += basis[u][i] * tmp[i][v];
                    out(by + u, bx + v) = s;
                }
            }
        }
    }
    return out;
}

/// Exact inverse of forward_block_dct (up to floating point). The result is
/// the real-valued reconstruction with the +128 shift restored; it is not
/// rounded or clamped so it can feed estimators and evaluators losslessly.
inline SpatialImage inverse_block_dct(const Grid<double>& coeffs) {
    const std::size_t h = coeffs.height(), w = coeffs.width();
    detail::require_block_aligned(h, w, "inverse_block_dct");
    const auto& basis = detail::dct_basis();

    SpatialImage out{Grid<double>(h, w)};
    double block[kBlock][kBlock];
    double tmp[kBlock][kBlock];
    for (std::size_t by = 0; by < h; by += kBlock) {
        for (std::size_t bx = 0; bx < w; bx += kBlock) {
            for (std::size_t u = 0; u < kBlock; ++u)
                for (std::size_t v = 0; v < kBlock; ++v)
                    block[u][v] = coeffs(by + u, bx + v);
            // tmp = B^T * block
            for (std::size_t i = 0; i < kBlock; ++i) {
                for (std::size_t v = 0; v < kBlock; ++v) {
                    double s = 0.0;
                    for (std::size_t u = 0; u < kBlock; ++u) s += basis[u][i] * block[u][v];
                    tmp[i][v] = s;
                }
            }
            // out = tmp * B
            for (std::size_t i = 0; i < kBlock; ++i) {
                for (std::size_t j = 0; j < kBlock; ++j) {
                    double s = 0.0;
                    for (std::size_t v = 0; v < kBlock; ++v) s += tmp[i][v] * basis[v][j];
                    out.pixels(by + i, bx + j) = s + 128.0;
                }
            }
        }
    }
    return out;
}

/// Standard luminance base table (JPEG Annex K) at quality 50.
inline const QuantTable& base_luminance_table() {
    static const QuantTable table = [] {
        constexpr std::uint16_t base[64] = {
            16, 11, 10, 16, 24,  40,  51,  61,
            12, 12, 14, 19, 26,  58,  60,  55,
            14, 13, 16, 24, 40,  57,  69,  56,
            14, 17, 22, 29, 51,  87,  80,  62,
            18, 22, 37, 56, 68,  109, 103, 77,
            24, 35, 55, 64, 81,  104, 113, 92,
            49, 64, 78, 87, 103, 121, 120, 101,
            72, 92, 95, 98, 112, 100, 103, 99};
        QuantTable t;
        for (std::size_t k = 0; k < 64; ++k) t.entries[k] = base[k];
        return t;
    }();
    return table;
}

/// Luminance table for a quality factor in [1, 100] using the conventional
/// IJG scaling: scale = 5000/qf (qf < 50) or 200 - 2 qf, entry =
/// clamp(floor((base*scale + 50)/100), 1, 255).
inline QuantTable quant_table_for(int qf) {
    if (qf < 1 || qf > 100) {
        throw std::invalid_argument("quant_table_for: quality factor must be in [1,100]");
    }
    const int scale = qf < 50 ? 5000 / qf : 200 - 2 * qf;
    QuantTable t;
    for (std::size_t k = 0; k < 64; ++k) {
        int v = (static_cast<int>(base_luminance_table().entries[k]) * scale + 50) / 100;
        if (v < 1) v = 1;
        if (v > 255) v = 255;
        t.entries[k] = static_cast<std::uint16_t>(v);
    }
    return t;
}

struct CompressResult {
    CoefficientPlane rounded;     // C
    CoefficientPlane nonrounded;  // U
};

/// JPEG-style compression down to quantized coefficients: U = DCT(img)/Q
/// positionwise per block, C = round-half-away-from-zero(U). No entropy
/// coding; the coefficient planes are the artifact of interest.
inline CompressResult compress(const SpatialImage& img, const QuantTable& quant) {
    Grid<double> u = forward_block_dct(img);
    const std::size_t h = u.height(), w = u.width();
    Grid<double> c(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < w; ++col) {
            const double q = quant(r % kBlock, col % kBlock);
            const double val = u(r, col) / q;
            u(r, col) = val;
            c(r, col) = std::round(val);  // round half away from zero
        }
    }
    return {CoefficientPlane{std::move(c), quant, PlaneKind::rounded},
            CoefficientPlane{std::move(u), quant, PlaneKind::nonrounded}};
}

inline CompressResult compress(const SpatialImage& img, int qf) {
    return compress(img, quant_table_for(qf));
}

/// Dequantizes a coefficient plane back to unquantized DCT values.
inline Grid<double> dequantize(const CoefficientPlane& plane) {
    Grid<double> out(plane.height(), plane.width());
    for (std::size_t r = 0; r < plane.height(); ++r)
        for (std::size_t c = 0; c < plane.width(); ++c)
            out(r, c) = plane.values(r, c) * plane.quant(r % kBlock, c % kBlock);
    return out;
}

/// Straight decompression to the real-valued spatial reconstruction.
inline SpatialImage decompress(const CoefficientPlane& plane) {
    return inverse_block_dct(dequantize(plane));
}

/// Rounding error e = U - C. |e| <= 0.5 holds by construction of the
/// rounding rule.
inline SideInfoMap rounding_error(const CoefficientPlane& nonrounded,
                                  const CoefficientPlane& rounded) {
    if (nonrounded.kind != PlaneKind::nonrounded || rounded.kind != PlaneKind::rounded) {
        throw std::invalid_argument("rounding_error: expects (nonrounded, rounded) planes");
    }
    require_same_shape(nonrounded.values, rounded.values, "rounding_error");
    Grid<double> e(rounded.height(), rounded.width());
    for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] = nonrounded.values[k] - rounded.values[k];
    }
    return SideInfoMap{std::move(e)};
}

/// Number of nonzero coefficients excluding the DC position of every block.
/// This is the epsilon in payload accounting (bits = q * epsilon).
inline std::size_t count_nnz_ac(const CoefficientPlane& plane) {
    if (plane.kind != PlaneKind::rounded) {
        throw std::invalid_argument("count_nnz_ac: expects a rounded plane");
    }
    std::size_t n = 0;
    for (std::size_t r = 0; r < plane.height(); ++r) {
        for (std::size_t c = 0; c < plane.width(); ++c) {
            if (r % kBlock == 0 && c % kBlock == 0) continue;
            if (plane.values(r, c) != 0.0) ++n;
        }
    }
    return n;
}

}  // namespace jsteg
