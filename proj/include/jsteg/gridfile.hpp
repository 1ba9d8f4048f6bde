#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "jsteg/grid.hpp"
#include "jsteg/jpeg_model.hpp"

namespace jsteg {

// GridFile: the one binary container for everything grid-shaped (coefficient
// planes, probability/cost maps, side-info maps, feature matrices).
//
//   magic   "JSGD"            4 bytes
//   version u16 LE            = 1
//   dtype   u8                0 = int32, 1 = float32
//   reserved u8               = 0
//   height  u32 LE
//   width   u32 LE
//   qflag   u8                1 -> 64 u16 LE quant entries follow
//   payload height*width values, row-major, little-endian
//
// Rounded coefficient planes are int32; probabilities, costs, side-info and
// non-rounded planes are float32.

enum class GridDType : std::uint8_t { int32 = 0, float32 = 1 };

struct GridFileData {
    GridDType dtype = GridDType::float32;
    Grid<double> values;
    std::optional<QuantTable> quant;
};

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline void write_gridfile(const std::filesystem::path& path, const Grid<double>& values,
                           GridDType dtype, const QuantTable* quant = nullptr) {
    if (values.height() > 0xFFFFFFFFull || values.width() > 0xFFFFFFFFull) {
        throw std::invalid_argument("write_gridfile: dimensions exceed u32");
    }
    std::string buf;
    buf.reserve(17 + (quant ? 128 : 0) + values.size() * 4);
    buf += "JSGD";
    detail::put_u16(buf, 1);
    buf.push_back(static_cast<char>(dtype));
    buf.push_back(0);  // reserved
    detail::put_u32(buf, static_cast<std::uint32_t>(values.height()));
    detail::put_u32(buf, static_cast<std::uint32_t>(values.width()));
    buf.push_back(quant ? 1 : 0);
    if (quant) {
        for (std::size_t k = 0; k < 64; ++k) detail::put_u16(buf, quant->entries[k]);
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (dtype == GridDType::int32) {
            const double v = values[k];
            if (v != std::floor(v) || v < -2147483648.0 || v > 2147483647.0) {
                throw std::invalid_argument("write_gridfile: value not representable as int32");
            }
            const std::int32_t i = static_cast<std::int32_t>(v);
            detail::put_u32(buf, static_cast<std::uint32_t>(i));
        } else {
            const float f = static_cast<float>(values[k]);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            detail::put_u32(buf, u);
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_gridfile: cannot open " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write_gridfile: write failed for " + path.string());
}

inline GridFileData read_gridfile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_gridfile: cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

    const auto fail = [&](const std::string& why) -> GridFileData {
        throw std::runtime_error("read_gridfile: " + path.string() + ": " + why);
    };

    if (buf.size() < 17) return fail("truncated header");
    if (std::memcmp(buf.data(), "JSGD", 4) != 0) return fail("bad magic");
    const std::uint16_t version = detail::get_u16(buf.data() + 4);
    if (version != 1) return fail("unsupported version " + std::to_string(version));
    const std::uint8_t dtype_raw = buf[6];
    if (dtype_raw > 1) return fail("unknown dtype " + std::to_string(dtype_raw));
    if (buf[7] != 0) return fail("nonzero reserved byte");
    const std::size_t h = detail::get_u32(buf.data() + 8);
    const std::size_t w = detail::get_u32(buf.data() + 12);
    const std::uint8_t qflag = buf[16];
    if (qflag > 1) return fail("bad quant flag");

    std::size_t off = 17;
    GridFileData out;
    out.dtype = static_cast<GridDType>(dtype_raw);
    if (qflag == 1) {
        if (buf.size() < off + 128) return fail("truncated quant table");
        QuantTable q;
        for (std::size_t k = 0; k < 64; ++k) {
            q.entries[k] = detail::get_u16(buf.data() + off + 2 * k);
            if (q.entries[k] < 1) return fail("quant entry < 1");
        }
        out.quant = q;
        off += 128;
    }
    const std::size_t expect = h * w * 4;
    if (buf.size() - off != expect) {
        return fail("payload size mismatch: declared " + std::to_string(expect) +
                    " bytes, found " + std::to_string(buf.size() - off));
    }
    out.values = Grid<double>(h, w);
    for (std::size_t k = 0; k < h * w; ++k) {
        const std::uint32_t u = detail::get_u32(buf.data() + off + 4 * k);
        if (out.dtype == GridDType::int32) {
            out.values[k] = static_cast<double>(static_cast<std::int32_t>(u));
        } else {
            float f;
            std::memcpy(&f, &u, 4);
            out.values[k] = static_cast<double>(f);
        }
    }
    return out;
}

/// Writes a coefficient plane with its quant table embedded. Rounded planes
/// go out as int32, non-rounded as float32.
inline void write_plane(const std::filesystem::path& path, const CoefficientPlane& plane) {
    write_gridfile(path, plane.values,
                   plane.kind == PlaneKind::rounded ? GridDType::int32 : GridDType::float32,
                   &plane.quant);
}

inline CoefficientPlane read_plane(const std::filesystem::path& path) {
    GridFileData d = read_gridfile(path);
    if (!d.quant) {
        throw std::runtime_error("read_plane: " + path.string() + ": missing quant table");
    }
    return CoefficientPlane{std::move(d.values), *d.quant,
                            d.dtype == GridDType::int32 ? PlaneKind::rounded
                                                        : PlaneKind::nonrounded};
}

/// Float32 map without quant table (probabilities, costs, side-info).
inline void write_map(const std::filesystem::path& path, const Grid<double>& values) {
    write_gridfile(path, values, GridDType::float32);
}

inline Grid<double> read_map(const std::filesystem::path& path) {
    GridFileData d = read_gridfile(path);
    if (d.dtype != GridDType::float32) {
        throw std::runtime_error("read_map: " + path.string() + ": expected float32 payload");
    }
    return std::move(d.values);
}

}  // namespace jsteg
