#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "jsteg/adversarial_objectives.hpp"
#include "jsteg/rng.hpp"

using namespace jsteg;

namespace {

ProbabilityMap random_prob_map(std::size_t h, std::size_t w, std::uint64_t seed,
                               double lo = 0.02, double hi = 0.6) {
    Grid<double> p(h, w);
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = lo + (hi - lo) * rng::uniform_at(seed, k);
    }
    return ProbabilityMap::symmetric(p);
}

// brute-force capacity oracles, straight from the two formulas
double oracle_capacity(const ProbabilityMap& p, CapacityMode mode) {
    auto h = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
    double total = 0.0;
    for (std::size_t k = 0; k < p.p_plus.size(); ++k) {
        const double plus = p.p_plus[k];
        const double minus = p.p_minus[k];
        const double zero = 1.0 - plus - minus;
        total += h(plus) + h(minus);
        total += mode == CapacityMode::paper_literal ? h(1.0 - zero) : h(zero);
    }
    return total;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("loss_discriminator") {
    SECTION("perfect prediction scores zero") {
        CHECK(loss_discriminator({{1.0, 0.0}, {1.0, 0.0}}) == 0.0);
    }
    SECTION("coin flip scores ln 2") {
        CHECK(loss_discriminator({{0.5, 0.5}, {1.0, 0.0}}) ==
              Catch::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(loss_discriminator({{0.5, 0.5}, {0.0, 1.0}}) ==
              Catch::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SECTION("matches the formula on random valid outputs") {
        for (int i = 0; i < 50; ++i) {
            const double z1 = rng::uniform_at(900, i);
            const bool first = rng::uniform_at(901, i) < 0.5;
            const ClassifierOutput out{{z1, 1.0 - z1},
                                       {first ? 1.0 : 0.0, first ? 0.0 : 1.0}};
            const double expect = -(out.label[0] * std::max(std::log(out.z[0]), std::log(1e-12)) +
                                    out.label[1] * std::max(std::log(out.z[1]), std::log(1e-12)));
            CHECK(loss_discriminator(out) == Catch::Approx(expect).margin(1e-12));
            CHECK(loss_discriminator(out) >= 0.0);
        }
    }
    SECTION("zero score stays finite via the log clamp") {
        const double loss = loss_discriminator({{0.0, 1.0}, {1.0, 0.0}});
        CHECK(loss == Catch::Approx(-std::log(1e-12)));
    }
    SECTION("invalid outputs rejected") {
        CHECK_THROWS_AS(loss_discriminator({{0.7, 0.7}, {1.0, 0.0}}), std::invalid_argument);
        CHECK_THROWS_AS(loss_discriminator({{0.5, 0.5}, {0.4, 0.6}}), std::invalid_argument);
    }
}

TEST_CASE("loss_generator_adversarial is exact negation") {
    CHECK(loss_generator_adversarial(0.0) == 0.0);
    CHECK(loss_generator_adversarial(0.6931) == -0.6931);
    for (int i = 0; i < 20; ++i) {
        const double l = 10.0 * rng::uniform_at(902, i) - 5.0;
        CHECK(loss_generator_adversarial(l) + l == 0.0);
    }
}

TEST_CASE("capacity") {
    SECTION("zero probability has zero capacity in both modes") {
        const ProbabilityMap p = ProbabilityMap::symmetric(Grid<double>(4, 4, 0.0));
        CHECK(capacity(p, CapacityMode::standard_ternary) == 0.0);
        CHECK(capacity(p, CapacityMode::paper_literal) == 0.0);
    }
    SECTION("uniform ternary: standard mode gives log2 3") {
        const ProbabilityMap p = ProbabilityMap::symmetric(Grid<double>(1, 1, 2.0 / 3.0));
        CHECK(capacity(p, CapacityMode::standard_ternary) ==
              Catch::Approx(std::log2(3.0)).epsilon(1e-12));
    }
    SECTION("total p = 0.5: both modes give 1.5 (p0 = 1 - p0 pivot)") {
        const ProbabilityMap p = ProbabilityMap::symmetric(Grid<double>(1, 1, 0.5));
        CHECK(capacity(p, CapacityMode::standard_ternary) == Catch::Approx(1.5).epsilon(1e-12));
        CHECK(capacity(p, CapacityMode::paper_literal) == Catch::Approx(1.5).epsilon(1e-12));
    }
    SECTION("modes differ away from p = 0.5") {
        const ProbabilityMap p = ProbabilityMap::symmetric(Grid<double>(1, 1, 0.3));
        CHECK(capacity(p, CapacityMode::standard_ternary) !=
              capacity(p, CapacityMode::paper_literal));
    }
    SECTION("matches the brute-force summation within 1e-9") {
        const ProbabilityMap p = random_prob_map(16, 16, 903);
        CHECK(capacity(p, CapacityMode::standard_ternary) ==
              Catch::Approx(oracle_capacity(p, CapacityMode::standard_ternary)).margin(1e-9));
        CHECK(capacity(p, CapacityMode::paper_literal) ==
              Catch::Approx(oracle_capacity(p, CapacityMode::paper_literal)).margin(1e-9));
    }
    SECTION("monotone increasing in each entry on (0, 2/3) in standard mode") {
        Grid<double> base(2, 2, 0.2);
        for (double p0 : {0.05, 0.2, 0.4, 0.6}) {
            Grid<double> lo = base, hi = base;
            lo(1, 1) = p0;
            hi(1, 1) = p0 + 1e-4;
            CHECK(capacity(ProbabilityMap::symmetric(hi), CapacityMode::standard_ternary) >
                  capacity(ProbabilityMap::symmetric(lo), CapacityMode::standard_ternary));
        }
    }
}

TEST_CASE("capacity gradient matches central finite differences") {
    const ProbabilityMap p = random_prob_map(4, 4, 904, 0.05, 0.6);
    const double h = 1e-6;
    for (CapacityMode mode : {CapacityMode::standard_ternary, CapacityMode::paper_literal}) {
        const Grid<double> grad = capacity_gradient(p, mode);
        for (std::size_t k = 0; k < p.p_plus.size(); ++k) {
            Grid<double> plus(4, 4), minus(4, 4);
            for (std::size_t j = 0; j < plus.size(); ++j) {
                plus[j] = p.total(j) + (j == k ? h : 0.0);
                minus[j] = p.total(j) - (j == k ? h : 0.0);
            }
            const double fd = (capacity(ProbabilityMap::symmetric(plus), mode) -
                               capacity(ProbabilityMap::symmetric(minus), mode)) /
                              (2.0 * h);
            CHECK(grad[k] == Catch::Approx(fd).margin(1e-4));
        }
    }
}

TEST_CASE("loss_generator_capacity") {
    const ProbabilityMap p = random_prob_map(8, 8, 905);
    const double cap = capacity(p, CapacityMode::standard_ternary);

    SECTION("zero exactly at the target") {
        const PayloadSpec hit{cap / 64.0, 64};
        CHECK(loss_generator_capacity(p, hit, CapacityMode::standard_ternary) ==
              Catch::Approx(0.0).margin(1e-18));
    }
    SECTION("one bit off scores one") {
        const PayloadSpec off{(cap + 1.0) / 64.0, 64};
        CHECK(loss_generator_capacity(p, off, CapacityMode::standard_ternary) ==
              Catch::Approx(1.0).epsilon(1e-9));
    }
    SECTION("gradient matches central finite differences") {
        const PayloadSpec payload{0.4, 100};
        const Grid<double> grad =
            loss_generator_capacity_gradient(p, payload, CapacityMode::standard_ternary);
        const double h = 1e-6;
        for (std::size_t k = 0; k < 8; ++k) {  // spot-check a few entries
            Grid<double> plus(8, 8), minus(8, 8);
            for (std::size_t j = 0; j < plus.size(); ++j) {
                plus[j] = p.total(j) + (j == k ? h : 0.0);
                minus[j] = p.total(j) - (j == k ? h : 0.0);
            }
            const double fd =
                (loss_generator_capacity(ProbabilityMap::symmetric(plus), payload,
                                         CapacityMode::standard_ternary) -
                 loss_generator_capacity(ProbabilityMap::symmetric(minus), payload,
                                         CapacityMode::standard_ternary)) /
                (2.0 * h);
            CHECK(grad[k] == Catch::Approx(fd).margin(1e-4 * std::max(1.0, std::abs(fd))));
        }
    }
}

TEST_CASE("loss_generator_total") {
    SECTION("paper defaults: alpha 1, beta 1e-7") {
        CHECK(loss_generator_total(-0.7, 1e6, ObjectiveWeights{}) ==
              Catch::Approx(-0.6).epsilon(1e-12));
    }
    SECTION("beta 0 is the pure adversarial objective") {
        CHECK(loss_generator_total(-0.3, 12345.0, ObjectiveWeights{1.0, 0.0}) == -0.3);
    }
    SECTION("linear in each argument") {
        const ObjectiveWeights w{2.0, 0.5};
        for (int i = 0; i < 20; ++i) {
            const double a = rng::uniform_at(906, 2 * i) - 0.5;
            const double b = rng::uniform_at(906, 2 * i + 1) * 10.0;
            CHECK(loss_generator_total(2.0 * a, b, w) ==
                  Catch::Approx(loss_generator_total(a, b, w) + 2.0 * a).epsilon(1e-12));
            CHECK(loss_generator_total(a, 3.0 * b, w) ==
                  Catch::Approx(loss_generator_total(a, b, w) + w.beta * 2.0 * b).epsilon(1e-12));
        }
    }
    SECTION("negative weights rejected") {
        CHECK_THROWS_AS(loss_generator_total(0.0, 0.0, ObjectiveWeights{-1.0, 0.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("import_probability_map") {
    SECTION("export/import round trip is bit-identical") {
        Grid<double> p(16, 16);
        for (std::size_t k = 0; k < p.size(); ++k) {
            // float32-exact values so the round trip can be exact
            p[k] = static_cast<double>(static_cast<float>(rng::uniform_at(907, k)));
        }
        const auto path = temp_file("probmap_roundtrip.jsgd");
        write_map(path, p);
        const ProbabilityMap back = import_probability_map(path);
        for (std::size_t k = 0; k < p.size(); ++k) CHECK(back.total(k) == p[k]);
        std::filesystem::remove(path);
    }
    SECTION("out-of-range value rejected, naming the offending index") {
        Grid<double> p(8, 8, 0.5);
        p(3, 5) = 1.5;
        const auto path = temp_file("probmap_range.jsgd");
        write_map(path, p);
        try {
            import_probability_map(path);
            FAIL("expected out-of-range error");
        } catch (const std::runtime_error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("(3,5)") != std::string::npos);
        }
        std::filesystem::remove(path);
    }
    SECTION("int32 payloads rejected") {
        Grid<double> p(8, 8, 0.0);
        const auto path = temp_file("probmap_dtype.jsgd");
        write_gridfile(path, p, GridDType::int32);
        CHECK_THROWS_AS(import_probability_map(path), std::runtime_error);
        std::filesystem::remove(path);
    }
    SECTION("non-block-aligned shapes rejected") {
        Grid<double> p(10, 12, 0.5);
        const auto path = temp_file("probmap_shape.jsgd");
        write_map(path, p);
        CHECK_THROWS_AS(import_probability_map(path), std::runtime_error);
        std::filesystem::remove(path);
    }
    SECTION("payload beyond the map's carrying capacity is rejected downstream") {
        // Re-solving lambda can stretch any finite-cost map up to N log2(3)
        // bits, so the infeasibility kicks in when q * eps crosses that
        // ceiling; 256 coefficients hold at most ~405.8 bits.
        Grid<double> p(16, 16, 1e-6);
        const auto path = temp_file("probmap_lowcap.jsgd");
        write_map(path, p);
        const ProbabilityMap imported = import_probability_map(path);
        const CostMap costs = cost_from_probability(imported);
        CHECK_THROWS_AS(solve_lambda(costs, PayloadSpec{2.0, 252}), InfeasiblePayload);
        // a sane payload stays feasible because the solver re-opens the costs
        CHECK_NOTHROW(solve_lambda(costs, PayloadSpec{0.4, 252}));
        std::filesystem::remove(path);
    }
}
