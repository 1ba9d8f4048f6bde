#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "jsteg/coding_rate.hpp"
#include "jsteg/jpeg_model.hpp"
#include "jsteg/rng.hpp"

namespace jsteg {

enum class ModForm { integer_form, real_form };

/// Per-coefficient modification map. Integer form holds exact ternary values
/// {-1, 0, +1}; real form holds the relaxed simulator's values in [-1, 1]
/// and exists only to feed differentiable objectives, never actual embedding.
struct ModificationMap {
    Grid<double> values;
    ModForm form = ModForm::integer_form;
};

/// Uniform [0,1) noise with a pinned seed. Same (seed, shape) always yields
/// the same field; see rng.hpp for the generator contract.
struct NoiseField {
    Grid<double> values;
    std::uint64_t seed = 0;
};

inline NoiseField sample_noise(std::size_t height, std::size_t width, std::uint64_t seed) {
    Grid<double> n(height, width);
    for (std::size_t k = 0; k < n.size(); ++k) n[k] = rng::uniform_at(seed, k);
    return NoiseField{std::move(n), seed};
}

/// Classic staircase simulator: m = -1 if n < p/2, +1 if n > 1 - p/2, else 0.
/// Comparisons are strict as stated; marginal change probability equals p.
inline ModificationMap staircase_simulate(const ProbabilityMap& p, const NoiseField& noise) {
    if (!p.is_symmetric()) {
        throw std::invalid_argument("staircase_simulate: expects a symmetric map");
    }
    require_same_shape(p.p_plus, noise.values, "staircase_simulate");
    Grid<double> m(p.height(), p.width());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double total = p.total(k);
        const double n = noise.values[k];
        if (n < total / 2.0) {
            m[k] = -1.0;
        } else if (n > 1.0 - total / 2.0) {
            m[k] = 1.0;
        } else {
            m[k] = 0.0;
        }
    }
    return ModificationMap{std::move(m), ModForm::integer_form};
}

/// Staircase generalized to asymmetric probabilities: m = +1 if n < p+,
/// -1 if n >= 1 - p-, else 0. Marginals equal (p+, p-) exactly.
inline ModificationMap asymmetric_simulate(const ProbabilityMap& probs,
                                           const NoiseField& noise) {
    require_same_shape(probs.p_plus, noise.values, "asymmetric_simulate");
    Grid<double> m(probs.height(), probs.width());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double pp = probs.p_plus[k];
        const double pm = probs.p_minus[k];
        if (pp + pm > 1.0 + 1e-12) {
            throw std::invalid_argument("asymmetric_simulate: p+ + p- > 1");
        }
        const double n = noise.values[k];
        if (n < pp) {
            m[k] = 1.0;
        } else if (n >= 1.0 - pm) {
            m[k] = -1.0;
        } else {
            m[k] = 0.0;
        }
    }
    return ModificationMap{std::move(m), ModForm::integer_form};
}

/// The gradient-friendly simulator: m = p * (1 - 2 [n > 0.5]). Zero-mean,
/// |m| = p pointwise, and dm/dp = +-1 everywhere, which is the property the
/// staircase lacks.
inline ModificationMap relaxed_simulate(const ProbabilityMap& p, const NoiseField& noise) {
    if (!p.is_symmetric()) {
        throw std::invalid_argument("relaxed_simulate: expects a symmetric map");
    }
    require_same_shape(p.p_plus, noise.values, "relaxed_simulate");
    Grid<double> m(p.height(), p.width());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double sign = noise.values[k] > 0.5 ? -1.0 : 1.0;
        m[k] = p.total(k) * sign;
    }
    return ModificationMap{std::move(m), ModForm::real_form};
}

enum class SimulatorKind { staircase, relaxed };

/// Analytic derivative of the modification map w.r.t. the (total) change
/// probability. The staircase is flat almost everywhere, so its derivative
/// is 0 off the breakpoints n = p/2 and n = 1 - p/2; the relaxed simulator
/// is linear in p with slope +-1.
inline Grid<double> simulator_gradient(SimulatorKind kind, const ProbabilityMap& p,
                                       const NoiseField& noise) {
    if (!p.is_symmetric()) {
        throw std::invalid_argument("simulator_gradient: expects a symmetric map");
    }
    require_same_shape(p.p_plus, noise.values, "simulator_gradient");
    Grid<double> g(p.height(), p.width());
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (kind == SimulatorKind::staircase) {
            g[k] = 0.0;
        } else {
            g[k] = noise.values[k] > 0.5 ? -1.0 : 1.0;
        }
    }
    return g;
}

/// S = C + M for an integer-form map. Real-form maps are rejected: the
/// relaxed simulator's output is an objective-evaluation device, not a
/// realizable modification.
inline CoefficientPlane apply_modifications(const CoefficientPlane& cover,
                                            const ModificationMap& mods) {
    if (cover.kind != PlaneKind::rounded) {
        throw std::invalid_argument("apply_modifications: cover must be a rounded plane");
    }
    if (mods.form != ModForm::integer_form) {
        throw std::invalid_argument("apply_modifications: real-form map rejected");
    }
    require_same_shape(cover.values, mods.values, "apply_modifications");
    CoefficientPlane stego = cover;
    for (std::size_t k = 0; k < stego.values.size(); ++k) {
        const double m = mods.values[k];
        if (m != -1.0 && m != 0.0 && m != 1.0) {
            throw std::invalid_argument("apply_modifications: non-ternary modification");
        }
        stego.values[k] += m;
    }
    return stego;
}

struct ChangeRates {
    double plus = 0.0;
    double minus = 0.0;
    double zero = 0.0;
};

/// Observed frequencies of +1 / -1 / 0 differences between a cover/stego
/// pair. Validates that the pair differs ternarily.
inline ChangeRates empirical_change_rates(const CoefficientPlane& cover,
                                          const CoefficientPlane& stego) {
    require_same_shape(cover.values, stego.values, "empirical_change_rates");
    const std::size_t n = cover.values.size();
    if (n == 0) throw std::invalid_argument("empirical_change_rates: empty planes");
    std::size_t plus = 0, minus = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = stego.values[k] - cover.values[k];
        if (d == 1.0) {
            ++plus;
        } else if (d == -1.0) {
            ++minus;
        } else if (d != 0.0) {
            throw std::invalid_argument("empirical_change_rates: non-ternary difference");
        }
    }
    const double dn = static_cast<double>(n);
    return ChangeRates{plus / dn, minus / dn, (n - plus - minus) / dn};
}

}  // namespace jsteg
