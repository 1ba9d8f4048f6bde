#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "jsteg/corpus.hpp"
#include "jsteg/jpeg_model.hpp"
#include "jsteg/rng.hpp"
#include "jsteg/sideinfo_est.hpp"

using namespace jsteg;

namespace {

// Integer LCG mirrored by the script that produced the frozen skimage SSIM
// references; both sides build bit-identical test images from it.
struct Lcg {
    std::uint64_t s;
    explicit Lcg(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return s >> 33;
    }
};

SpatialImage lcg_noise_image(std::uint64_t seed, std::size_t h, std::size_t w) {
    Lcg g(seed);
    Grid<double> px(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) px(r, c) = static_cast<double>(g.next() % 256);
    return SpatialImage{std::move(px)};
}

SpatialImage lcg_ramp_image(std::uint64_t seed, std::size_t h, std::size_t w) {
    Lcg g(seed);
    const std::uint64_t a = g.next() % 128;
    const std::uint64_t bx = g.next() % 5 + 1;
    const std::uint64_t by = g.next() % 5 + 1;
    Grid<double> px(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            px(r, c) = std::min(255.0, static_cast<double>(a + bx * c / 2 + by * r / 2));
    return SpatialImage{std::move(px)};
}

SpatialImage lcg_perturbed(const SpatialImage& x, std::uint64_t seed, std::uint64_t amp) {
    Lcg g(seed);
    SpatialImage y = x;
    for (std::size_t k = 0; k < y.pixels.size(); ++k) {
        const double delta = static_cast<double>(g.next() % (2 * amp + 1)) -
                             static_cast<double>(amp);
        y.pixels[k] = std::clamp(x.pixels[k] + delta, 0.0, 255.0);
    }
    return y;
}

// skimage.metrics.structural_similarity on the pairs below (data_range 255,
// gaussian_weights, sigma 1.5, win_size 11, use_sample_covariance False)
constexpr double kSsimReference[20] = {
    0.999423282496, 0.678428287647, 0.991730624723, 0.366358983725, 0.975749669599,
    0.164545911742, 0.958504490040, 0.095378681909, 0.919834240606, 0.074475424031,
    0.884273882689, 0.043141023698, 0.870396097768, 0.028145083280, 0.820256767284,
    0.034916690524, 0.772189533856, 0.026717076356, 0.730718603037, 0.021913284206};

SpatialImage smooth_ramp(std::size_t h, std::size_t w, std::uint64_t seed) {
    rng::Stream s(seed);
    const double a = 40.0 + 100.0 * s.next_uniform();
    const double bx = (s.next_uniform() - 0.5) * 2.0;
    const double by = (s.next_uniform() - 0.5) * 2.0;
    Grid<double> px(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            px(r, c) = std::clamp(std::round(a + bx * c + by * r), 0.0, 255.0);
    return SpatialImage{std::move(px)};
}

}  // namespace

TEST_CASE("mse") {
    const SpatialImage x = lcg_noise_image(1, 16, 16);
    SECTION("identical images score zero") { CHECK(mse(x, x) == 0.0); }
    SECTION("constant offset of one scores one") {
        SpatialImage a{Grid<double>(8, 8, 100.0)};
        SpatialImage b{Grid<double>(8, 8, 101.0)};
        CHECK(mse(a, b) == 1.0);
    }
    SECTION("matches a brute-force loop") {
        const SpatialImage y = lcg_noise_image(2, 16, 16);
        double acc = 0.0;
        for (std::size_t k = 0; k < x.pixels.size(); ++k) {
            acc += (x.pixels[k] - y.pixels[k]) * (x.pixels[k] - y.pixels[k]);
        }
        CHECK(mse(x, y) == Catch::Approx(acc / 256.0).margin(1e-9));
    }
    SECTION("shape mismatch rejected") {
        SpatialImage y{Grid<double>(8, 16, 0.0)};
        CHECK_THROWS_AS(mse(x, y), std::invalid_argument);
    }
}

TEST_CASE("ssim basics") {
    const SpatialImage x = lcg_noise_image(7, 32, 32);
    SECTION("ssim(x, x) = 1 exactly") { CHECK(ssim(x, x) == 1.0); }
    SECTION("symmetry within 1e-12") {
        const SpatialImage y = lcg_perturbed(x, 8, 30);
        CHECK(std::abs(ssim(x, y) - ssim(y, x)) < 1e-12);
    }
    SECTION("never exceeds 1") {
        for (int i = 0; i < 8; ++i) {
            const SpatialImage a = lcg_noise_image(100 + i, 24, 24);
            const SpatialImage b = lcg_perturbed(a, 200 + i, 10 + 10 * i);
            CHECK(ssim(a, b) <= 1.0);
        }
    }
    SECTION("inverted mid-contrast image scores below 1") {
        SpatialImage inv = x;
        for (auto& v : inv.pixels) v = 255.0 - v;
        CHECK(ssim(x, inv) < 1.0);
    }
    SECTION("window larger than image rejected") {
        SpatialImage tiny{Grid<double>(8, 8, 0.0)};
        CHECK_THROWS_AS(ssim(tiny, tiny), std::invalid_argument);
    }
}

TEST_CASE("ssim matches the skimage reference within 1e-4 on 20 pairs") {
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t amp = 4 + 6 * static_cast<std::uint64_t>(i);
        const SpatialImage x = (i % 2) ? lcg_ramp_image(1000 + i, 32, 32)
                                       : lcg_noise_image(1000 + i, 32, 32);
        const SpatialImage y = lcg_perturbed(x, 2000 + i, amp);
        CHECK(ssim(x, y) == Catch::Approx(kSsimReference[i]).margin(1e-4));
    }
}

TEST_CASE("estimation_loss modes") {
    const SpatialImage x = lcg_noise_image(42, 32, 32);
    SECTION("x = y scores 0 by default, 1 in paper-literal mode") {
        const EstimationLoss def = estimation_loss(x, x);
        CHECK(def.value == 0.0);
        CHECK(def.mode == EstimationLossMode::minimization_consistent);
        const EstimationLoss lit =
            estimation_loss(x, x, SsimParams{}, EstimationLossMode::paper_literal);
        CHECK(lit.value == 1.0);
        CHECK(lit.mode == EstimationLossMode::paper_literal);
    }
    SECTION("default = literal + 1 - 2 ssim identically") {
        const SpatialImage y = lcg_perturbed(x, 43, 25);
        const EstimationLoss def = estimation_loss(x, y);
        const EstimationLoss lit =
            estimation_loss(x, y, SsimParams{}, EstimationLossMode::paper_literal);
        CHECK(def.value ==
              Catch::Approx(lit.value + 1.0 - 2.0 * def.ssim_value).margin(1e-12));
    }
}

TEST_CASE("estimate_precover_baseline") {
    SECTION("strength 0 equals straight decompression") {
        const SpatialImage pre = make_synthetic_image(32, 32, 9);
        const CoefficientPlane c = compress(pre, 75).rounded;
        const PrecoverEstimate est = estimate_precover_baseline(c, 0.0);
        CHECK(est.image.pixels == decompress(c).pixels);
    }
    SECTION("constant precover estimates to decompression exactly") {
        const SpatialImage pre{Grid<double>(16, 16, 200.0)};
        const CoefficientPlane c = compress(pre, 75).rounded;
        const PrecoverEstimate est = estimate_precover_baseline(c, 0.8);
        const SpatialImage dec = decompress(c);
        for (std::size_t k = 0; k < dec.pixels.size(); ++k) {
            CHECK(est.image.pixels[k] == Catch::Approx(dec.pixels[k]).margin(1e-9));
        }
    }
    SECTION("improves on decompression for smooth ramps at QF 75") {
        double mse_est = 0.0, mse_dec = 0.0;
        for (int i = 0; i < 8; ++i) {
            const SpatialImage pre = smooth_ramp(64, 64, 100 + i);
            const CoefficientPlane c = compress(pre, 75).rounded;
            mse_est += mse(estimate_precover_baseline(c, 0.8).image, pre);
            mse_dec += mse(decompress(c), pre);
        }
        CHECK(mse_est <= mse_dec);
    }
    SECTION("deterministic") {
        const SpatialImage pre = make_synthetic_image(32, 32, 10);
        const CoefficientPlane c = compress(pre, 75).rounded;
        const PrecoverEstimate a = estimate_precover_baseline(c, 0.8);
        const PrecoverEstimate b = estimate_precover_baseline(c, 0.8);
        CHECK(a.image.pixels == b.image.pixels);
    }
}

TEST_CASE("estimated_side_info") {
    const SpatialImage pre = make_synthetic_image(32, 32, 21);
    const CompressResult r = compress(pre, 75);

    SECTION("exact precover reproduces the true rounding error") {
        const PrecoverEstimate exact{pre, "oracle"};
        const SideInfoMap e_hat = estimated_side_info(r.rounded, exact);
        const SideInfoMap e_true = rounding_error(r.nonrounded, r.rounded);
        for (std::size_t k = 0; k < e_hat.values.size(); ++k) {
            CHECK(std::abs(e_hat.values[k] - e_true.values[k]) < 1e-9);
            CHECK(std::abs(e_hat.values[k]) <= 0.5 + 1e-9);
        }
    }
    SECTION("decompressed cover as its own estimate gives zero side-info") {
        const PrecoverEstimate self{decompress(r.rounded), "self"};
        const SideInfoMap e_hat = estimated_side_info(r.rounded, self);
        for (double v : e_hat.values) CHECK(std::abs(v) < 1e-6);
    }
    SECTION("baseline estimator polarity beats a coin flip on nonzero errors") {
        double total = 0.0;
        for (int i = 0; i < 10; ++i) {
            const SpatialImage p = make_synthetic_image(64, 64, 300 + i);
            const CompressResult cr = compress(p, 75);
            const SideInfoMap e_true = rounding_error(cr.nonrounded, cr.rounded);
            const SideInfoMap e_hat =
                estimated_side_info(cr.rounded, estimate_precover_baseline(cr.rounded, 0.8));
            total += polarity_agreement(e_true, e_hat, nonzero_mask(e_true));
        }
        CHECK(total / 10.0 > 0.5);
    }
    SECTION("estimates may exceed 0.5 and are not clipped") {
        const SideInfoMap e_hat =
            estimated_side_info(r.rounded, estimate_precover_baseline(r.rounded, 1.5));
        double max_abs = 0.0;
        for (double v : e_hat.values) max_abs = std::max(max_abs, std::abs(v));
        CHECK(max_abs > 0.5);
    }
}

TEST_CASE("polarity_agreement") {
    Grid<double> e(8, 8);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = rng::uniform_at(61, k) - 0.5;
    const SideInfoMap e_true{e};
    const Grid<std::uint8_t> all(8, 8, 1);

    SECTION("perfect agreement") {
        CHECK(polarity_agreement(e_true, e_true, all) == 1.0);
    }
    SECTION("negated estimate agrees nowhere") {
        Grid<double> neg = e;
        for (auto& v : neg) v = -v;
        CHECK(polarity_agreement(e_true, SideInfoMap{neg}, all) == 0.0);
    }
    SECTION("independent random signs agree about half the time") {
        const std::size_t side = 200;
        Grid<double> a(side, side), b(side, side);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = rng::uniform_at(62, k) < 0.5 ? -1.0 : 1.0;
            b[k] = rng::uniform_at(63, k) < 0.5 ? -1.0 : 1.0;
        }
        const double got =
            polarity_agreement(SideInfoMap{a}, SideInfoMap{b}, Grid<std::uint8_t>(side, side, 1));
        const double sigma = std::sqrt(0.25 / (static_cast<double>(side) * side));
        CHECK(std::abs(got - 0.5) < 3.0 * sigma);
    }
    SECTION("empty mask rejected") {
        CHECK_THROWS_AS(polarity_agreement(e_true, e_true, Grid<std::uint8_t>(8, 8, 0)),
                        std::invalid_argument);
    }
}
