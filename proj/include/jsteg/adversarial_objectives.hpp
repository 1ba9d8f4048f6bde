#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "jsteg/coding_rate.hpp"
#include "jsteg/gridfile.hpp"

namespace jsteg {

/// A discriminator verdict: two softmax scores plus the one-hot truth.
struct ClassifierOutput {
    std::array<double, 2> z{};      // softmax outputs, sum to 1
    std::array<double, 2> label{};  // one-hot ground truth

    void validate() const {
        if (!(z[0] >= 0.0 && z[1] >= 0.0 && std::abs(z[0] + z[1] - 1.0) <= 1e-9)) {
            throw std::invalid_argument("ClassifierOutput: scores must be a softmax pair");
        }
        const bool one_hot = (label[0] == 1.0 && label[1] == 0.0) ||
                             (label[0] == 0.0 && label[1] == 1.0);
        if (!one_hot) throw std::invalid_argument("ClassifierOutput: label must be one-hot");
    }
};

/// Weights combining the adversarial and capacity losses.
struct ObjectiveWeights {
    double alpha = 1.0;
    double beta = 1e-7;

    void validate() const {
        if (alpha < 0.0 || beta < 0.0) {
            throw std::invalid_argument("ObjectiveWeights: weights must be >= 0");
        }
    }
};

/// Discriminator cross-entropy -sum(z_i' ln z_i), natural log, clamped below
/// at ln(1e-12) so exact-zero scores stay finite.
inline double loss_discriminator(const ClassifierOutput& out) {
    out.validate();
    const double floor_log = std::log(1e-12);
    double loss = 0.0;
    for (int i = 0; i < 2; ++i) {
        if (out.label[i] == 0.0) continue;
        const double lg = out.z[i] > 0.0 ? std::max(std::log(out.z[i]), floor_log) : floor_log;
        loss -= out.label[i] * lg;
    }
    return loss;
}

/// The generator fights the discriminator head-on: its adversarial loss is
/// the exact negation.
inline double loss_generator_adversarial(double l_d) { return -l_d; }

enum class CapacityMode { paper_literal, standard_ternary };

/// Embedding capacity of a symmetric probability map in bits.
///
/// standard_ternary is the usual entropy -p+ log2 p+ - p- log2 p- -
/// p0 log2 p0 and is what payload accounting uses. paper_literal replaces
/// the last term with -(1 - p0) log2(1 - p0); the two coincide exactly when
/// p0 = 1/2 and differ elsewhere.
inline double capacity(const ProbabilityMap& p, CapacityMode mode) {
    if (!p.is_symmetric()) throw std::invalid_argument("capacity: expects a symmetric map");
    auto h = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
    double total = 0.0;
    for (std::size_t k = 0; k < p.p_plus.size(); ++k) {
        const double split = p.p_plus[k];  // p+ = p- = p/2
        const double p0 = p.p_zero(k);
        total += 2.0 * h(split);
        total += mode == CapacityMode::paper_literal ? h(1.0 - p0) : h(p0);
    }
    return total;
}

/// d capacity / d p (total change probability), per coefficient. Closed
/// form; pairs with the finite-difference checks on the capacity loss.
inline Grid<double> capacity_gradient(const ProbabilityMap& p, CapacityMode mode) {
    if (!p.is_symmetric()) {
        throw std::invalid_argument("capacity_gradient: expects a symmetric map");
    }
    constexpr double inv_ln2 = 1.4426950408889634074;
    Grid<double> g(p.height(), p.width());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double total = p.total(k);
        if (total <= 0.0 || total >= 1.0) {
            g[k] = 0.0;  // boundary of the domain; derivative not used there
            continue;
        }
        // d/dp [-p log2(p/2)] = -log2(p/2) - 1/ln2
        const double d_changed = -std::log2(total / 2.0) - inv_ln2;
        if (mode == CapacityMode::paper_literal) {
            // third term is -p log2 p
            g[k] = d_changed - std::log2(total) - inv_ln2;
        } else {
            // third term is -(1-p) log2(1-p)
            g[k] = d_changed + std::log2(1.0 - total) + inv_ln2;
        }
    }
    return g;
}

/// Capacity loss (C_a - epsilon q)^2: zero exactly when the map's capacity
/// meets the payload target.
inline double loss_generator_capacity(const ProbabilityMap& p, const PayloadSpec& payload,
                                      CapacityMode mode) {
    const double d = capacity(p, mode) - payload.message_bits();
    return d * d;
}

/// Gradient of the capacity loss w.r.t. each total change probability.
inline Grid<double> loss_generator_capacity_gradient(const ProbabilityMap& p,
                                                     const PayloadSpec& payload,
                                                     CapacityMode mode) {
    const double outer = 2.0 * (capacity(p, mode) - payload.message_bits());
    Grid<double> g = capacity_gradient(p, mode);
    for (auto& v : g) v *= outer;
    return g;
}

/// Total generator objective alpha * l1 + beta * l2.
inline double loss_generator_total(double l1, double l2, const ObjectiveWeights& w) {
    w.validate();
    return w.alpha * l1 + w.beta * l2;
}

/// Loads an externally learned probability map (GridFile float32, values in
/// [0,1], block-aligned). This is the boundary where a trained generator
/// plugs into the pipeline.
inline ProbabilityMap import_probability_map(const std::filesystem::path& path) {
    GridFileData d = read_gridfile(path);
    if (d.dtype != GridDType::float32) {
        throw std::runtime_error("import_probability_map: " + path.string() +
                                 ": expected float32 payload");
    }
    if (d.values.height() % kBlock != 0 || d.values.width() % kBlock != 0 ||
        d.values.empty()) {
        throw std::runtime_error("import_probability_map: " + path.string() +
                                 ": shape not block-aligned");
    }
    for (std::size_t r = 0; r < d.values.height(); ++r) {
        for (std::size_t c = 0; c < d.values.width(); ++c) {
            const double v = d.values(r, c);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::runtime_error("import_probability_map: " + path.string() +
                                         ": value " + std::to_string(v) + " at (" +
                                         std::to_string(r) + "," + std::to_string(c) +
                                         ") outside [0,1]");
            }
        }
    }
    return ProbabilityMap::symmetric(d.values);
}

}  // namespace jsteg
