// jsteg: JPEG-domain adaptive steganography laboratory.
//
// Verbs: compress, embed, estimate-si, evaluate, sweep. All grid-shaped data
// travels as GridFile (.jsgd); spatial images as 8-bit binary PGM. Every
// command is deterministic given its inputs and --seed, and reports embed the
// full parameter set. Existing outputs are never overwritten without --force.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jsteg/jsteg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_writable(const fs::path& path, bool force) {
    if (!force && fs::exists(path)) {
        throw std::runtime_error(path.string() +
                                 " already exists; pass --force to overwrite");
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

jsteg::EmbedMode parse_mode(const std::string& mode) {
    if (mode == "sym") return jsteg::EmbedMode::symmetric;
    if (mode == "si") return jsteg::EmbedMode::si;
    if (mode == "esi") return jsteg::EmbedMode::esi;
    throw CLI::ValidationError("--mode", "expected sym, si or esi");
}

jsteg::CostSource parse_cost_source(const std::string& source) {
    if (source == "flat") return jsteg::CostSource::flat;
    if (source == "energy") return jsteg::CostSource::energy;
    throw CLI::ValidationError("--cost-source", "expected flat or energy");
}

// ---------------------------------------------------------------- compress

struct CompressArgs {
    std::string input;
    std::string out_prefix;
    int qf = 75;
    bool pad = false;
    bool force = false;
};

int run_compress(const CompressArgs& args) {
    jsteg::SpatialImage img = jsteg::read_pgm(args.input);
    if (args.pad) img = jsteg::pad_to_blocks(img);
    const jsteg::CompressResult r = jsteg::compress(img, args.qf);

    const fs::path c_path = args.out_prefix + ".C.jsgd";
    const fs::path u_path = args.out_prefix + ".U.jsgd";
    require_writable(c_path, args.force);
    require_writable(u_path, args.force);
    jsteg::write_plane(c_path, r.rounded);
    jsteg::write_plane(u_path, r.nonrounded);

    const std::size_t eps = jsteg::count_nnz_ac(r.rounded);
    std::printf("compressed %s at qf %d: %zux%zu, nnz-AC %zu\n", args.input.c_str(), args.qf,
                r.rounded.height(), r.rounded.width(), eps);
    std::printf("wrote %s and %s\n", c_path.c_str(), u_path.c_str());
    return 0;
}

// ------------------------------------------------------------------- embed

struct EmbedArgs {
    std::string cover;
    std::string out;
    std::string probs;
    std::string costs;
    std::string cost_source = "energy";
    std::string mode = "sym";
    std::string precover;
    std::string sideinfo;
    double payload = 0.4;
    double delta = 0.05;
    double eta = 0.65;
    double smooth_sigma = 1.0;
    int smooth_radius = 2;
    std::uint64_t seed = 0;
    bool force = false;
};

jsteg::CostMap load_base_costs(const EmbedArgs& args, const jsteg::CoefficientPlane& cover) {
    if (!args.probs.empty()) {
        const jsteg::ProbabilityMap p = jsteg::import_probability_map(args.probs);
        if (p.height() != cover.height() || p.width() != cover.width()) {
            throw std::runtime_error("--probs shape does not match the cover plane");
        }
        return jsteg::cost_from_probability(p);
    }
    if (!args.costs.empty()) {
        jsteg::Grid<double> rho = jsteg::read_map(args.costs);
        if (rho.height() != cover.height() || rho.width() != cover.width()) {
            throw std::runtime_error("--costs shape does not match the cover plane");
        }
        return jsteg::CostMap::symmetric(std::move(rho));
    }
    return jsteg::make_costs(parse_cost_source(args.cost_source), cover);
}

std::optional<jsteg::SideInfoMap> load_sideinfo(const EmbedArgs& args,
                                                const jsteg::CoefficientPlane& cover,
                                                jsteg::EmbedMode mode) {
    if (mode == jsteg::EmbedMode::symmetric) return std::nullopt;
    if (!args.precover.empty()) {
        const jsteg::SpatialImage pre = jsteg::read_pgm(args.precover);
        const jsteg::CompressResult r = jsteg::compress(pre, cover.quant);
        if (!r.rounded.values.same_shape(cover.values)) {
            throw std::runtime_error("--precover dimensions do not match the cover plane");
        }
        return jsteg::rounding_error(r.nonrounded, r.rounded);
    }
    if (!args.sideinfo.empty()) {
        const jsteg::GridFileData data = jsteg::read_gridfile(args.sideinfo);
        if (data.dtype != jsteg::GridDType::float32) {
            throw std::runtime_error("--sideinfo must be a float32 GridFile");
        }
        if (!data.values.same_shape(cover.values)) {
            throw std::runtime_error("--sideinfo shape does not match the cover plane");
        }
        if (data.quant) {
            // a non-rounded coefficient plane, e.g. the .U.jsgd from compress
            jsteg::CoefficientPlane u{data.values, *data.quant, jsteg::PlaneKind::nonrounded};
            return jsteg::rounding_error(u, cover);
        }
        return jsteg::SideInfoMap{data.values};  // a raw e / e-hat map
    }
    throw std::runtime_error("mode " + std::string(jsteg::to_string(mode)) +
                             " requires --precover or --sideinfo");
}

int run_embed(const EmbedArgs& args) {
    const jsteg::CoefficientPlane cover = jsteg::read_plane(args.cover);
    if (cover.kind != jsteg::PlaneKind::rounded) {
        throw std::runtime_error("--cover must be a rounded (int32) plane");
    }

    jsteg::EmbedConfig config;
    config.payload_q = args.payload;
    config.mode = parse_mode(args.mode);
    config.esi = jsteg::EsiParams{args.delta, args.eta};
    config.smooth_sigma = args.smooth_sigma;
    config.smooth_radius = args.smooth_radius;
    config.seed = args.seed;

    const jsteg::CostMap base = load_base_costs(args, cover);
    const std::optional<jsteg::SideInfoMap> sideinfo = load_sideinfo(args, cover, config.mode);
    const jsteg::EmbedResult result = jsteg::embed_plane(cover, base, sideinfo, config);

    // hard invariant before anything touches disk
    for (std::size_t k = 0; k < result.stego.values.size(); ++k) {
        const double d = result.stego.values[k] - cover.values[k];
        if (d != 0.0 && d != 1.0 && d != -1.0) {
            throw std::runtime_error("internal error: |S - C| > 1 at coefficient " +
                                     std::to_string(k));
        }
    }

    const fs::path out_path = args.out;
    const fs::path report_path = args.out + ".report.json";
    require_writable(out_path, args.force);
    require_writable(report_path, args.force);
    jsteg::write_plane(out_path, result.stego);

    json report;
    report["cover"] = args.cover;
    report["stego"] = args.out;
    report["variant"] = args.mode;
    report["payload_bpnzac"] = args.payload;
    report["nnz_ac"] = result.nnz_ac;
    report["target_bits"] = result.target_bits;
    report["lambda"] = result.lambda;
    report["achieved_entropy_bits"] = result.achieved_entropy;
    report["change_rate_plus"] = result.rates.plus;
    report["change_rate_minus"] = result.rates.minus;
    report["change_rate_zero"] = result.rates.zero;
    report["cost_source"] =
        !args.probs.empty() ? "probs:" + args.probs
                            : (!args.costs.empty() ? "costs:" + args.costs : args.cost_source);
    report["smooth_sigma"] = args.smooth_sigma;
    report["smooth_radius"] = args.smooth_radius;
    report["delta"] = args.delta;
    report["eta"] = args.eta;
    report["seed"] = args.seed;
    write_json(report_path, report);

    std::printf("embedded %.3f bpnzAC (%s): lambda %.6g, entropy %.2f / %.2f bits, "
                "rates +%.5f/-%.5f\n",
                args.payload, args.mode.c_str(), result.lambda, result.achieved_entropy,
                result.target_bits, result.rates.plus, result.rates.minus);
    std::printf("wrote %s and %s\n", out_path.c_str(), report_path.c_str());
    return 0;
}

// ------------------------------------------------------------- estimate-si

struct EstimateArgs {
    std::string cover;
    std::string out;
    std::string estimator = "baseline";
    std::string import_path;
    std::string true_u;
    double strength = 0.8;
    bool force = false;
};

int run_estimate_si(const EstimateArgs& args) {
    const jsteg::CoefficientPlane cover = jsteg::read_plane(args.cover);

    jsteg::PrecoverEstimate estimate{{}, ""};
    if (args.estimator == "baseline") {
        estimate = jsteg::estimate_precover_baseline(cover, args.strength);
    } else if (args.estimator == "import") {
        if (args.import_path.empty()) {
            throw std::runtime_error("--estimator import requires --import <gridfile>");
        }
        jsteg::Grid<double> pixels = jsteg::read_map(args.import_path);
        if (!pixels.same_shape(cover.values)) {
            throw std::runtime_error("imported estimate shape does not match the cover plane");
        }
        estimate = jsteg::PrecoverEstimate{jsteg::SpatialImage{std::move(pixels)},
                                           "import:" + args.import_path};
    } else {
        throw CLI::ValidationError("--estimator", "expected baseline or import");
    }

    const jsteg::SideInfoMap e_hat = jsteg::estimated_side_info(cover, estimate);
    require_writable(args.out, args.force);
    jsteg::write_map(args.out, e_hat.values);

    double mean_abs = 0.0;
    std::size_t above_half = 0;
    for (double v : e_hat.values) {
        mean_abs += std::abs(v);
        above_half += std::abs(v) > 0.5;
    }
    mean_abs /= static_cast<double>(e_hat.values.size());
    std::printf("estimator %s: mean |e| %.4f, frac |e| > 0.5 %.4f\n",
                estimate.estimator_id.c_str(), mean_abs,
                static_cast<double>(above_half) / e_hat.values.size());

    if (!args.true_u.empty()) {
        const jsteg::CoefficientPlane u = jsteg::read_plane(args.true_u);
        const jsteg::SideInfoMap e_true = jsteg::rounding_error(u, cover);
        const double agreement =
            jsteg::polarity_agreement(e_true, e_hat, jsteg::nonzero_mask(e_true));
        std::printf("polarity agreement with true side-information: %.4f\n", agreement);
    }
    std::printf("wrote %s\n", args.out.c_str());
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string covers;
    std::string stegos;
    std::string out;
    std::uint64_t seed = 0;
    bool force = false;
};

std::vector<fs::path> list_gridfiles(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsgd") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

jsteg::DetectionReport evaluate_dirs(const fs::path& covers_dir, const fs::path& stegos_dir,
                                     std::uint64_t seed) {
    const std::vector<fs::path> cover_files = list_gridfiles(covers_dir);
    std::set<std::string> stego_names;
    for (const auto& p : list_gridfiles(stegos_dir)) stego_names.insert(p.filename().string());

    std::vector<fs::path> paired;
    for (const auto& c : cover_files) {
        if (stego_names.count(c.filename().string())) paired.push_back(c.filename());
    }
    if (paired.size() < cover_files.size() || paired.size() < stego_names.size()) {
        std::fprintf(stderr, "warning: %zu unpaired files ignored\n",
                     cover_files.size() + stego_names.size() - 2 * paired.size());
    }
    if (paired.size() < 40) {
        throw std::runtime_error("need at least 40 paired cover/stego planes, found " +
                                 std::to_string(paired.size()));
    }

    const jsteg::GaborBank bank = jsteg::gabor_bank();
    const jsteg::FeatureParams params;
    std::vector<jsteg::FeatureVector> cover_features(paired.size());
    std::vector<jsteg::FeatureVector> stego_features(paired.size());
    jsteg::parallel_for(paired.size(), [&](std::size_t i) {
        cover_features[i] = jsteg::plane_features(jsteg::read_plane(covers_dir / paired[i]),
                                                  bank, params, "cover:" + paired[i].string());
        stego_features[i] = jsteg::plane_features(jsteg::read_plane(stegos_dir / paired[i]),
                                                  bank, params, "stego:" + paired[i].string());
    });
    jsteg::DetectionReport report =
        jsteg::train_eval_detector(cover_features, stego_features, seed);
    if (report.dropped_features > 0) {
        std::fprintf(stderr, "warning: dropped %zu zero-variance features\n",
                     report.dropped_features);
    }
    report.variant_cover = covers_dir.string();
    report.variant_stego = stegos_dir.string();
    return report;
}

json report_to_json(const jsteg::DetectionReport& r) {
    json j;
    j["p_e"] = r.p_e;
    j["acc_cover"] = r.acc_cover;
    j["acc_stego"] = r.acc_stego;
    j["n_train"] = r.n_train;
    j["n_test"] = r.n_test;
    j["seed"] = r.seed;
    j["ridge"] = r.ridge;
    j["dropped_features"] = r.dropped_features;
    j["split"] = r.split;
    j["covers"] = r.variant_cover;
    j["stegos"] = r.variant_stego;
    return j;
}

int run_evaluate(const EvaluateArgs& args) {
    require_writable(args.out, args.force);
    const jsteg::DetectionReport report = evaluate_dirs(args.covers, args.stegos, args.seed);
    write_json(args.out, report_to_json(report));
    std::printf("P_E %.4f over %zu test pairs (train %zu, seed %llu)\n", report.p_e,
                report.n_test, report.n_train,
                static_cast<unsigned long long>(report.seed));
    std::printf("wrote %s\n", args.out.c_str());
    return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    std::string covers;
    std::string out;
    int qf = 75;
    std::vector<double> payloads{0.4};
    std::vector<std::string> modes{"sym"};
    std::vector<double> deltas{0.05};
    std::vector<double> etas{0.65};
    std::vector<std::uint64_t> seeds{1};
    std::string cost_source = "energy";
    double strength = 0.8;
    double smooth_sigma = 1.0;
    int smooth_radius = 2;
    std::size_t synth = 0;
    std::size_t synth_size = 96;
    std::uint64_t corpus_seed = 42;
    bool force = false;
};

struct SweepCell {
    std::string mode;
    double q;
    double delta;
    double eta;
    std::uint64_t seed;

    std::string name() const {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s_q%.3f_d%.3f_e%.3f_s%llu", mode.c_str(), q, delta,
                      eta, static_cast<unsigned long long>(seed));
        return buf;
    }
};

// Per-image inputs shared by every cell of the sweep.
struct SweepCorpus {
    std::vector<jsteg::CoefficientPlane> covers;
    std::vector<jsteg::SideInfoMap> true_e;
    std::vector<jsteg::SideInfoMap> est_e;
    std::vector<jsteg::CostMap> base_costs;
    std::vector<jsteg::FeatureVector> cover_features;
};

SweepCorpus prepare_sweep_corpus(const std::vector<fs::path>& pgms, const SweepArgs& args,
                                 const jsteg::GaborBank& bank,
                                 const jsteg::FeatureParams& fparams) {
    SweepCorpus corpus;
    const std::size_t n = pgms.size();
    corpus.covers.resize(n);
    corpus.true_e.resize(n);
    corpus.est_e.resize(n);
    corpus.base_costs.resize(n);
    corpus.cover_features.resize(n);
    const jsteg::CostSource source = parse_cost_source(args.cost_source);
    jsteg::parallel_for(n, [&](std::size_t i) {
        const jsteg::SpatialImage pre = jsteg::read_pgm(pgms[i]);
        const jsteg::CompressResult r = jsteg::compress(pre, args.qf);
        corpus.true_e[i] = jsteg::rounding_error(r.nonrounded, r.rounded);
        corpus.est_e[i] = jsteg::estimated_side_info(
            r.rounded, jsteg::estimate_precover_baseline(r.rounded, args.strength));
        corpus.base_costs[i] = jsteg::make_costs(source, r.rounded);
        corpus.cover_features[i] = jsteg::plane_features(
            r.rounded, bank, fparams, "cover:" + pgms[i].filename().string());
        corpus.covers[i] = std::move(r.rounded);
    });
    return corpus;
}

int run_sweep(const SweepArgs& args) {
    const fs::path out_dir = args.out;
    const fs::path cells_dir = out_dir / "cells";
    fs::create_directories(cells_dir);

    // corpus: existing PGMs, or a generated synthetic set
    fs::path covers_dir = args.covers;
    std::vector<fs::path> pgms;
    if (fs::is_directory(covers_dir)) {
        for (const auto& entry : fs::directory_iterator(covers_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
                pgms.push_back(entry.path());
            }
        }
        std::sort(pgms.begin(), pgms.end());
    }
    if (pgms.empty()) {
        if (args.synth == 0) {
            throw std::runtime_error("no PGM covers found in " + covers_dir.string() +
                                     "; pass --synth N to generate a corpus");
        }
        std::printf("generating %zu synthetic %zux%zu covers in %s\n", args.synth,
                    args.synth_size, args.synth_size, covers_dir.c_str());
        pgms = jsteg::generate_corpus(covers_dir, args.synth, args.synth_size, args.synth_size,
                                      args.corpus_seed);
    }

    // grid of cells
    std::vector<SweepCell> cells;
    for (const auto& mode : args.modes) {
        for (double q : args.payloads) {
            for (double delta : args.deltas) {
                for (double eta : args.etas) {
                    for (std::uint64_t seed : args.seeds) {
                        cells.push_back(SweepCell{mode, q, delta, eta, seed});
                    }
                }
            }
        }
    }
    if (cells.empty()) {
        std::printf("empty sweep grid, nothing to do\n");
        return 0;
    }

    const jsteg::GaborBank bank = jsteg::gabor_bank();
    const jsteg::FeatureParams fparams;
    std::optional<SweepCorpus> corpus;  // built lazily: resumed sweeps may skip everything

    json table = json::array();
    std::size_t computed = 0, skipped = 0, failed = 0;
    for (const SweepCell& cell : cells) {
        const fs::path cell_path = cells_dir / (cell.name() + ".json");
        if (fs::exists(cell_path) && !args.force) {
            std::ifstream in(cell_path);
            json j;
            in >> j;
            table.push_back(j);
            ++skipped;
            continue;
        }
        try {
            if (!corpus) corpus = prepare_sweep_corpus(pgms, args, bank, fparams);
            const std::size_t n = corpus->covers.size();

            jsteg::EmbedConfig config;
            config.payload_q = cell.q;
            config.mode = parse_mode(cell.mode);
            config.esi = jsteg::EsiParams{cell.delta, cell.eta};
            config.smooth_sigma = args.smooth_sigma;
            config.smooth_radius = args.smooth_radius;

            std::vector<jsteg::FeatureVector> stego_features(n);
            jsteg::parallel_for(n, [&](std::size_t i) {
                jsteg::EmbedConfig c = config;
                c.seed = jsteg::rng::derive_stream(cell.seed, i);
                std::optional<jsteg::SideInfoMap> si;
                if (c.mode == jsteg::EmbedMode::si) si = corpus->true_e[i];
                if (c.mode == jsteg::EmbedMode::esi) si = corpus->est_e[i];
                const jsteg::EmbedResult r =
                    jsteg::embed_plane(corpus->covers[i], corpus->base_costs[i], si, c);
                stego_features[i] = jsteg::plane_features(
                    r.stego, bank, fparams, "stego:" + std::to_string(i));
            });
            jsteg::DetectionReport report =
                jsteg::train_eval_detector(corpus->cover_features, stego_features, cell.seed);

            json j = report_to_json(report);
            j["variant"] = cell.mode;
            j["payload_bpnzac"] = cell.q;
            j["delta"] = cell.delta;
            j["eta"] = cell.eta;
            j["qf"] = args.qf;
            j["cost_source"] = args.cost_source;
            j["strength"] = args.strength;
            j["cell"] = cell.name();
            write_json(cell_path, j);
            table.push_back(j);
            ++computed;
            std::printf("cell %-28s P_E %.4f\n", cell.name().c_str(), report.p_e);
        } catch (const std::exception& e) {
            ++failed;
            std::fprintf(stderr, "cell %s failed: %s\n", cell.name().c_str(), e.what());
        }
    }

    // plain-text summary table, regenerated from all completed cells
    const fs::path table_path = out_dir / "table.txt";
    std::ofstream out(table_path, std::ios::trunc);
    out << "variant    q      delta  eta    seed      P_E\n";
    for (const auto& j : table) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %-6.3f %-6.3f %-6.3f %-9llu %.4f\n",
                      j["variant"].get<std::string>().c_str(),
                      j["payload_bpnzac"].get<double>(), j["delta"].get<double>(),
                      j["eta"].get<double>(),
                      static_cast<unsigned long long>(j["seed"].get<std::uint64_t>()),
                      j["p_e"].get<double>());
        out << line;
    }
    std::printf("sweep done: %zu computed, %zu resumed, %zu failed; table at %s\n", computed,
                skipped, failed, table_path.c_str());
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JPEG-domain adaptive steganography laboratory"};
    app.require_subcommand(1);

    CompressArgs compress_args;
    CLI::App* compress = app.add_subcommand(
        "compress", "PGM -> rounded (C) and non-rounded (U) coefficient planes");
    compress->add_option("--input", compress_args.input, "8-bit binary PGM (P5)")->required();
    compress->add_option("--out-prefix", compress_args.out_prefix,
                         "output prefix for <prefix>.C.jsgd and <prefix>.U.jsgd")
        ->required();
    compress->add_option("--qf", compress_args.qf, "JPEG quality factor in [1,100]");
    compress->add_flag("--pad", compress_args.pad, "edge-replicate to a multiple of 8");
    compress->add_flag("--force", compress_args.force, "overwrite existing outputs");

    EmbedArgs embed_args;
    CLI::App* embed = app.add_subcommand("embed", "simulate embedding into a cover plane");
    embed->add_option("--cover", embed_args.cover, "rounded cover plane (.jsgd)")->required();
    embed->add_option("--out", embed_args.out, "stego plane output path")->required();
    embed->add_option("--payload", embed_args.payload, "payload in bpnzAC");
    embed->add_option("--mode", embed_args.mode, "sym | si | esi");
    embed->add_option("--probs", embed_args.probs, "imported probability map (.jsgd)");
    embed->add_option("--costs", embed_args.costs, "imported symmetric cost map (.jsgd)");
    embed->add_option("--cost-source", embed_args.cost_source,
                      "built-in cost source when no import is given: flat | energy");
    embed->add_option("--precover", embed_args.precover,
                      "precover PGM; side-information is computed from it");
    embed->add_option("--sideinfo", embed_args.sideinfo,
                      "side-information GridFile: a U plane (with quant table) or a raw e map");
    embed->add_option("--delta", embed_args.delta, "ESI amplitude-trust threshold");
    embed->add_option("--eta", embed_args.eta, "ESI polarity factor");
    embed->add_option("--smooth-sigma", embed_args.smooth_sigma,
                      "inter-block Gaussian smoothing std; 0 disables");
    embed->add_option("--smooth-radius", embed_args.smooth_radius, "smoothing kernel radius");
    embed->add_option("--seed", embed_args.seed, "noise seed");
    embed->add_flag("--force", embed_args.force, "overwrite existing outputs");

    EstimateArgs estimate_args;
    CLI::App* estimate =
        app.add_subcommand("estimate-si", "estimate side-information from a rounded plane");
    estimate->add_option("--cover", estimate_args.cover, "rounded cover plane (.jsgd)")
        ->required();
    estimate->add_option("--out", estimate_args.out, "output e-hat map (.jsgd)")->required();
    estimate->add_option("--estimator", estimate_args.estimator, "baseline | import");
    estimate->add_option("--strength", estimate_args.strength,
                         "baseline denoiser std (0 = plain decompression)");
    estimate->add_option("--import", estimate_args.import_path,
                         "externally produced precover estimate (float32 .jsgd)");
    estimate->add_option("--true-u", estimate_args.true_u,
                         "optional non-rounded plane for polarity agreement");
    estimate->add_flag("--force", estimate_args.force, "overwrite existing outputs");

    EvaluateArgs evaluate_args;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "proxy steganalysis of paired cover/stego planes");
    evaluate->add_option("--covers", evaluate_args.covers, "directory of cover .jsgd planes")
        ->required();
    evaluate->add_option("--stegos", evaluate_args.stegos, "directory of stego .jsgd planes")
        ->required();
    evaluate->add_option("--out", evaluate_args.out, "detection report (JSON)")->required();
    evaluate->add_option("--seed", evaluate_args.seed, "train/test split seed");
    evaluate->add_flag("--force", evaluate_args.force, "overwrite existing outputs");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "grid of (variant, q, delta, eta, seed) cells; resumable");
    sweep->add_option("--covers", sweep_args.covers, "directory of precover PGMs")->required();
    sweep->add_option("--out", sweep_args.out, "output directory")->required();
    sweep->add_option("--qf", sweep_args.qf, "JPEG quality factor");
    sweep->add_option("--payloads", sweep_args.payloads, "payload grid (bpnzAC)");
    sweep->add_option("--modes", sweep_args.modes, "variant grid: sym si esi");
    sweep->add_option("--deltas", sweep_args.deltas, "ESI delta grid");
    sweep->add_option("--etas", sweep_args.etas, "ESI eta grid");
    sweep->add_option("--seeds", sweep_args.seeds, "seed grid");
    sweep->add_option("--cost-source", sweep_args.cost_source, "flat | energy");
    sweep->add_option("--strength", sweep_args.strength, "baseline estimator std for esi");
    sweep->add_option("--smooth-sigma", sweep_args.smooth_sigma, "cost smoothing std");
    sweep->add_option("--smooth-radius", sweep_args.smooth_radius, "cost smoothing radius");
    sweep->add_option("--synth", sweep_args.synth,
                      "generate this many synthetic covers if the directory is empty");
    sweep->add_option("--synth-size", sweep_args.synth_size, "synthetic image side length");
    sweep->add_option("--corpus-seed", sweep_args.corpus_seed, "synthetic corpus seed");
    sweep->add_flag("--force", sweep_args.force, "recompute completed cells");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compress->parsed()) return run_compress(compress_args);
        if (embed->parsed()) return run_embed(embed_args);
        if (estimate->parsed()) return run_estimate_si(estimate_args);
        if (evaluate->parsed()) return run_evaluate(evaluate_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
