#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsteg/coding_rate.hpp"
#include "jsteg/cost_pipeline.hpp"
#include "jsteg/cost_sources.hpp"
#include "jsteg/embedding_sim.hpp"
#include "jsteg/jpeg_model.hpp"
#include "jsteg/parallel.hpp"
#include "jsteg/steg_eval.hpp"

namespace jsteg {

enum class EmbedMode { symmetric, si, esi };

inline const char* to_string(EmbedMode m) {
    switch (m) {
        case EmbedMode::symmetric: return "sym";
        case EmbedMode::si: return "si";
        case EmbedMode::esi: return "esi";
    }
    return "?";
}

/// Everything cmd_embed needs beyond its inputs. Smoothing runs on the
/// symmetric cost map before any side-information adjustment; sigma = 0
/// disables it.
struct EmbedConfig {
    double payload_q = 0.4;  // bpnzAC
    EmbedMode mode = EmbedMode::symmetric;
    EsiParams esi{};
    double smooth_sigma = 1.0;
    int smooth_radius = 2;
    std::uint64_t seed = 0;
    double solver_tol = 1e-8;
};

struct EmbedResult {
    CoefficientPlane stego;
    double lambda = 0.0;
    double achieved_entropy = 0.0;  // bits
    double target_bits = 0.0;
    std::size_t nnz_ac = 0;
    ChangeRates rates;
};

/// One full (cost -> smooth -> adjust -> lambda solve -> simulate) pass.
/// `sideinfo` is required for si/esi modes: the true rounding error for si,
/// an estimate for esi.
inline EmbedResult embed_plane(const CoefficientPlane& cover, const CostMap& base_costs,
                               const std::optional<SideInfoMap>& sideinfo,
                               const EmbedConfig& config) {
    if (cover.kind != PlaneKind::rounded) {
        throw std::invalid_argument("embed_plane: cover must be a rounded plane");
    }
    if (config.payload_q < 0.0) throw std::invalid_argument("embed_plane: negative payload");
    if (config.mode != EmbedMode::symmetric && !sideinfo) {
        throw std::invalid_argument("embed_plane: si/esi modes require side-information");
    }

    EmbedResult result{cover, 0.0, 0.0, 0.0, count_nnz_ac(cover), {}};
    result.target_bits = config.payload_q * static_cast<double>(result.nnz_ac);
    if (config.payload_q == 0.0) {
        result.rates = ChangeRates{0.0, 0.0, 1.0};
        return result;  // S = C, nothing to embed
    }

    CostMap costs = config.smooth_sigma > 0.0
                        ? smooth_costs(base_costs, config.smooth_sigma, config.smooth_radius)
                        : base_costs;
    switch (config.mode) {
        case EmbedMode::symmetric:
            break;
        case EmbedMode::si:
            costs = adjust_costs_si(costs, *sideinfo);
            break;
        case EmbedMode::esi:
            costs = adjust_costs_esi(costs, *sideinfo, config.esi);
            break;
    }

    const LambdaSolution sol =
        solve_lambda(costs, PayloadSpec{config.payload_q, result.nnz_ac}, config.solver_tol);
    const NoiseField noise = sample_noise(cover.height(), cover.width(), config.seed);
    const ModificationMap mods = asymmetric_simulate(sol.probabilities, noise);
    result.stego = apply_modifications(cover, mods);
    result.lambda = sol.lambda;
    result.achieved_entropy = sol.achieved_entropy;
    result.rates = empirical_change_rates(cover, result.stego);
    return result;
}

enum class CostSource { flat, energy };

inline const char* to_string(CostSource s) {
    return s == CostSource::flat ? "flat" : "energy";
}

inline CostMap make_costs(CostSource source, const CoefficientPlane& plane) {
    return source == CostSource::flat ? flat_costs(plane) : energy_costs(plane);
}

/// Decompresses a plane and extracts its Gabor feature vector.
inline FeatureVector plane_features(const CoefficientPlane& plane, const GaborBank& bank,
                                    const FeatureParams& params, std::string provenance) {
    return extract_features(decompress(plane), bank, params, std::move(provenance));
}

/// Feature extraction over a whole set of planes, worker-pool parallel.
inline std::vector<FeatureVector> corpus_features(const std::vector<CoefficientPlane>& planes,
                                                  const GaborBank& bank,
                                                  const FeatureParams& params,
                                                  const std::string& tag) {
    std::vector<FeatureVector> features(planes.size());
    parallel_for(planes.size(), [&](std::size_t i) {
        features[i] = plane_features(planes[i], bank, params, tag + "#" + std::to_string(i));
    });
    return features;
}

}  // namespace jsteg
