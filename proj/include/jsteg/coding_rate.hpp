#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "jsteg/grid.hpp"
#include "jsteg/jpeg_model.hpp"

namespace jsteg {

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

/// Per-coefficient embedding costs for +1 and -1 changes. +inf marks a wet
/// (unmodifiable) coefficient.
struct CostMap {
    Grid<double> rho_plus;
    Grid<double> rho_minus;

    static CostMap symmetric(Grid<double> rho) {
        for (double v : rho) {
            if (std::isnan(v) || v < 0.0) {
                throw std::invalid_argument("CostMap: costs must be >= 0");
            }
        }
        Grid<double> copy = rho;
        return CostMap{std::move(rho), std::move(copy)};
    }

    bool is_symmetric() const { return rho_plus == rho_minus; }
    std::size_t height() const { return rho_plus.height(); }
    std::size_t width() const { return rho_plus.width(); }
};

/// Per-coefficient change probabilities (p+, p-); p0 = 1 - p+ - p-.
struct ProbabilityMap {
    Grid<double> p_plus;
    Grid<double> p_minus;

    /// Symmetric construction from a total change probability map:
    /// p+ = p- = p/2.
    static ProbabilityMap symmetric(const Grid<double>& total_p) {
        Grid<double> plus(total_p.height(), total_p.width());
        for (std::size_t k = 0; k < total_p.size(); ++k) {
            const double p = total_p[k];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("ProbabilityMap: p must lie in [0,1]");
            }
            plus[k] = p / 2.0;
        }
        Grid<double> minus = plus;
        return ProbabilityMap{std::move(plus), std::move(minus)};
    }

    bool is_symmetric() const { return p_plus == p_minus; }
    std::size_t height() const { return p_plus.height(); }
    std::size_t width() const { return p_plus.width(); }

    double p_zero(std::size_t k) const { return 1.0 - p_plus[k] - p_minus[k]; }
    double total(std::size_t k) const { return p_plus[k] + p_minus[k]; }
};

/// Payload in bits per non-zero AC coefficient plus the count it applies to.
struct PayloadSpec {
    double q = 0.0;          // bpnzAC
    std::size_t nnz_ac = 0;  // epsilon

    double message_bits() const { return q * static_cast<double>(nnz_ac); }
};

struct LambdaSolution {
    double lambda = 0.0;
    ProbabilityMap probabilities;
    double achieved_entropy = 0.0;  // bits
};

struct InfeasiblePayload : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Total embedding distortion sum(rho+ where S-C=+1) + sum(rho- where
/// S-C=-1). Throws if any |S - C| > 1.
inline double distortion(const CoefficientPlane& cover, const CoefficientPlane& stego,
                         const CostMap& costs) {
    require_same_shape(cover.values, stego.values, "distortion");
    require_same_shape(cover.values, costs.rho_plus, "distortion");
    double total = 0.0;
    for (std::size_t k = 0; k < cover.values.size(); ++k) {
        const double d = stego.values[k] - cover.values[k];
        if (d == 0.0) continue;
        if (d == 1.0) {
            total += costs.rho_plus[k];
        } else if (d == -1.0) {
            total += costs.rho_minus[k];
        } else {
            throw std::invalid_argument("distortion: |S - C| > 1 at some coefficient");
        }
    }
    return total;
}

/// Optimal per-coefficient change distribution at inverse temperature
/// lambda: pi(+-) = exp(-lambda rho(+-)) / Z, Z = 1 + both exponentials.
inline ProbabilityMap gibbs_probabilities(const CostMap& costs, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("gibbs_probabilities: lambda must be > 0");
    const std::size_t n = costs.rho_plus.size();
    Grid<double> plus(costs.height(), costs.width());
    Grid<double> minus(costs.height(), costs.width());
    for (std::size_t k = 0; k < n; ++k) {
        const double ep = std::exp(-lambda * costs.rho_plus[k]);   // 0 for +inf cost
        const double em = std::exp(-lambda * costs.rho_minus[k]);
        const double z = 1.0 + ep + em;
        plus[k] = ep / z;
        minus[k] = em / z;
    }
    return ProbabilityMap{std::move(plus), std::move(minus)};
}

/// Total ternary entropy in bits, with 0 log 0 = 0.
inline double ternary_entropy(const ProbabilityMap& probs) {
    auto h = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
    double total = 0.0;
    for (std::size_t k = 0; k < probs.p_plus.size(); ++k) {
        total += h(probs.p_plus[k]) + h(probs.p_minus[k]) + h(probs.p_zero(k));
    }
    return total;
}

namespace detail {

// Entropy of the Gibbs distribution in bits, computed per coefficient as
// (ln Z + lambda * E[rho]) / ln 2. Algebraically equal to ternary_entropy of
// gibbs_probabilities but needs one log instead of three.
inline double gibbs_entropy_bits(const CostMap& costs, double lambda) {
    constexpr double inv_ln2 = 1.4426950408889634074;
    double total = 0.0;
    for (std::size_t k = 0; k < costs.rho_plus.size(); ++k) {
        const double rp = costs.rho_plus[k];
        const double rm = costs.rho_minus[k];
        const double ep = std::exp(-lambda * rp);
        const double em = std::exp(-lambda * rm);
        const double z = 1.0 + ep + em;
        double mean_rho = 0.0;
        if (ep > 0.0) mean_rho += rp * ep;  // guards inf * 0
        if (em > 0.0) mean_rho += rm * em;
        total += (std::log(z) + lambda * mean_rho / z) * inv_ln2;
    }
    return total;
}

}  // namespace detail

/// Solves the payload constraint: finds lambda > 0 such that the entropy of
/// the Gibbs distribution equals the message size m = q * nnz_ac bits.
///
/// Entropy is strictly decreasing in lambda, so a bracketing bisection
/// converges; the bracket starts at [1e-6, 1e4] and expands geometrically,
/// and bisection runs until the bracket collapses (relative width 1e-13) so
/// the returned lambda depends only on the cost map and payload, not on the
/// tolerance. The tolerance is then verified: |H - m| <= tol * m (absolute
/// tol when m = 0).
inline LambdaSolution solve_lambda(const CostMap& costs, const PayloadSpec& payload,
                                   double tol = 1e-8) {
    require_same_shape(costs.rho_plus, costs.rho_minus, "solve_lambda");
    const double m = payload.message_bits();
    if (m < 0.0 || std::isnan(m)) throw std::invalid_argument("solve_lambda: negative payload");

    double lo = 1e-6, hi = 1e4;

    if (m == 0.0) {
        // Degenerate request: report the upper-bracket lambda where change
        // probabilities are effectively zero for positive costs.
        ProbabilityMap probs = gibbs_probabilities(costs, hi);
        const double achieved = ternary_entropy(probs);
        return LambdaSolution{hi, std::move(probs), achieved};
    }

    const auto solution_at = [&](double lambda) {
        ProbabilityMap probs = gibbs_probabilities(costs, lambda);
        const double achieved = ternary_entropy(probs);
        return LambdaSolution{lambda, std::move(probs), achieved};
    };

    double h_lo = detail::gibbs_entropy_bits(costs, lo);
    if (h_lo < m) {
        if (std::abs(h_lo - m) <= tol * m) return solution_at(lo);  // full-capacity request
        throw InfeasiblePayload("solve_lambda: payload of " + std::to_string(m) +
                                " bits exceeds capacity " + std::to_string(h_lo) + " bits");
    }
    double h_hi = detail::gibbs_entropy_bits(costs, hi);
    int expansions = 0;
    while (h_hi > m && expansions < 8) {
        hi *= 10.0;
        h_hi = detail::gibbs_entropy_bits(costs, hi);
        ++expansions;
    }
    if (h_hi > m) {
        if (std::abs(h_hi - m) <= tol * m) return solution_at(hi);
        // zero-cost coefficients keep the entropy above m at any lambda
        throw InfeasiblePayload("solve_lambda: payload below the entropy floor " +
                                std::to_string(h_hi) + " bits of the cost map");
    }

    int iters = 0;
    while (hi - lo > 1e-13 * hi && iters < 200) {
        const double mid = 0.5 * (lo + hi);
        if (detail::gibbs_entropy_bits(costs, mid) > m) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++iters;
    }

    const double lambda = 0.5 * (lo + hi);
    ProbabilityMap probs = gibbs_probabilities(costs, lambda);
    const double achieved = ternary_entropy(probs);
    if (std::abs(achieved - m) > tol * m) {
        throw InfeasiblePayload("solve_lambda: converged entropy " + std::to_string(achieved) +
                                " misses target " + std::to_string(m) + " bits");
    }
    return LambdaSolution{lambda, std::move(probs), achieved};
}

/// Cost from total change probability: rho = ln(2/p - 1). p is clamped below
/// at 1e-9 so saturated generator outputs at exactly 0 stay embeddable;
/// p = 1 maps to rho = 0 exactly.
inline CostMap cost_from_probability(const ProbabilityMap& p) {
    if (!p.is_symmetric()) {
        throw std::invalid_argument("cost_from_probability: expects a symmetric map");
    }
    constexpr double p_min = 1e-9;
    Grid<double> rho(p.height(), p.width());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        const double total = std::max(p.total(k), p_min);
        rho[k] = std::log(2.0 / total - 1.0);
    }
    return CostMap::symmetric(std::move(rho));
}

/// Exact algebraic inverse of cost_from_probability: total p = 2/(e^rho + 1),
/// split evenly between the two directions.
inline ProbabilityMap probability_from_cost(const CostMap& costs) {
    if (!costs.is_symmetric()) {
        throw std::invalid_argument("probability_from_cost: expects a symmetric map");
    }
    Grid<double> total(costs.height(), costs.width());
    for (std::size_t k = 0; k < total.size(); ++k) {
        total[k] = 2.0 / (std::exp(costs.rho_plus[k]) + 1.0);
    }
    return ProbabilityMap::symmetric(total);
}

}  // namespace jsteg
