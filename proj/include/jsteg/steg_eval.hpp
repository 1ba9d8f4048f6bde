#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsteg/grid.hpp"
#include "jsteg/jpeg_model.hpp"
#include "jsteg/rng.hpp"

namespace jsteg {

/// One Gabor filter's parameters. The bank pins sigma = 0.56 * lambda and
/// gamma = 0.5.
struct GaborParams {
    double lambda = 0.0;  // wavelength
    double theta = 0.0;   // orientation
    double phi = 0.0;     // phase offset
    double sigma = 0.0;   // Gaussian std
    double gamma = 0.5;   // spatial aspect ratio
    int size = 11;        // odd kernel size
};

/// Gabor kernel on the centered integer grid:
///   exp(-(u^2 + gamma^2 v^2) / (2 sigma^2)) * cos(2 pi u / lambda + phi)
/// with u = x cos(theta) + y sin(theta), v = -x sin(theta) + y cos(theta).
/// No DC correction here.
inline Grid<double> gabor_kernel_raw(const GaborParams& p) {
    if (p.size < 1 || p.size % 2 == 0) {
        throw std::invalid_argument("gabor_kernel: kernel size must be odd");
    }
    if (!(p.sigma > 0.0) || !(p.lambda > 0.0)) {
        throw std::invalid_argument("gabor_kernel: sigma and lambda must be > 0");
    }
    const int radius = p.size / 2;
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    const double pi = std::acos(-1.0);
    Grid<double> k(p.size, p.size);
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            const double u = x * ct + y * st;
            const double v = -x * st + y * ct;
            const double envelope =
                std::exp(-(u * u + p.gamma * p.gamma * v * v) / (2.0 * p.sigma * p.sigma));
            k(y + radius, x + radius) = envelope * std::cos(2.0 * pi * u / p.lambda + p.phi);
        }
    }
    return k;
}

/// Gabor kernel with phase-0 kernels DC-corrected by mean subtraction so the
/// bank is genuinely high-pass; phase pi/2 kernels are already near
/// zero-mean and are left untouched.
inline Grid<double> gabor_kernel(const GaborParams& p) {
    Grid<double> k = gabor_kernel_raw(p);
    if (p.phi == 0.0) {
        double mean = 0.0;
        for (double v : k) mean += v;
        mean /= static_cast<double>(k.size());
        for (auto& v : k) v -= mean;
    }
    return k;
}

struct GaborBank {
    std::vector<GaborParams> params;
    std::vector<Grid<double>> kernels;

    std::size_t size() const { return kernels.size(); }
};

/// The 16-filter bank: sigma in {0.75, 1}, theta in {0, pi/4, pi/2, 3pi/4},
/// phi in {0, pi/2}, lambda = sigma / 0.56, gamma = 0.5. Ordering is
/// sigma-major, then theta, then phi, and never changes.
inline GaborBank gabor_bank(int kernel_size = 11) {
    const double pi = std::acos(-1.0);
    const double sigmas[] = {0.75, 1.0};
    const double thetas[] = {0.0, pi / 4.0, 2.0 * pi / 4.0, 3.0 * pi / 4.0};
    const double phis[] = {0.0, pi / 2.0};
    GaborBank bank;
    for (double sigma : sigmas) {
        for (double theta : thetas) {
            for (double phi : phis) {
                GaborParams p;
                p.sigma = sigma;
                p.lambda = sigma / 0.56;
                p.theta = theta;
                p.phi = phi;
                p.gamma = 0.5;
                p.size = kernel_size;
                bank.params.push_back(p);
                bank.kernels.push_back(gabor_kernel(p));
            }
        }
    }
    return bank;
}

/// Truncated linear unit: elementwise clamp to [-t, t].
inline Grid<double> tlu(const Grid<double>& x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("tlu: t must be > 0");
    Grid<double> out = x;
    for (auto& v : out) v = std::clamp(v, -t, t);
    return out;
}

/// Same-size cross-correlation with edge replication.
inline Grid<double> filter_image(const Grid<double>& img, const Grid<double>& kernel) {
    const int kh = static_cast<int>(kernel.height()), kw = static_cast<int>(kernel.width());
    const int ry = kh / 2, rx = kw / 2;
    const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
    Grid<double> out(img.height(), img.width());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = 0; i < kh; ++i) {
                long sr = r + i - ry;
                sr = sr < 0 ? 0 : (sr >= h ? h - 1 : sr);
                for (int j = 0; j < kw; ++j) {
                    long sc = c + j - rx;
                    sc = sc < 0 ? 0 : (sc >= w ? w - 1 : sc);
                    acc += kernel(i, j) * img(sr, sc);
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

struct FeatureParams {
    double t = 8.0;          // TLU threshold
    int histogram_bins = 9;  // Q; odd so near-zero residuals land in one center bin
    int kernel_size = 11;
};

struct FeatureVector {
    std::vector<double> values;
    std::string provenance;
};

/// Pooled Gabor-residual features: for each kernel, filter, truncate, then
/// record mean absolute residual, residual variance and a Q-bin normalized
/// histogram over [-t, t]. Length is bank size * (2 + Q).
inline FeatureVector extract_features(const SpatialImage& img, const GaborBank& bank,
                                      const FeatureParams& params = {},
                                      std::string provenance = {}) {
    if (params.histogram_bins < 1) {
        throw std::invalid_argument("extract_features: need at least one histogram bin");
    }
    for (const auto& k : bank.kernels) {
        if (img.height() < k.height() || img.width() < k.width()) {
            throw std::invalid_argument("extract_features: image smaller than kernel");
        }
    }
    const int q = params.histogram_bins;
    FeatureVector fv;
    fv.values.reserve(bank.size() * (2 + q));
    fv.provenance = std::move(provenance);
    const double n = static_cast<double>(img.pixels.size());
    for (const auto& kernel : bank.kernels) {
        Grid<double> residual = tlu(filter_image(img.pixels, kernel), params.t);
        double mean_abs = 0.0, mean = 0.0;
        for (double v : residual) {
            mean_abs += std::abs(v);
            mean += v;
        }
        mean_abs /= n;
        mean /= n;
        double var = 0.0;
        for (double v : residual) var += (v - mean) * (v - mean);
        var /= n;
        std::vector<double> hist(static_cast<std::size_t>(q), 0.0);
        const double bin_width = 2.0 * params.t / q;
        for (double v : residual) {
            int b = static_cast<int>((v + params.t) / bin_width);
            b = std::clamp(b, 0, q - 1);
            hist[static_cast<std::size_t>(b)] += 1.0;
        }
        fv.values.push_back(mean_abs);
        fv.values.push_back(var);
        for (double c : hist) fv.values.push_back(c / n);
    }
    return fv;
}

/// Detection outcome of the linear proxy steganalyzer. p_e = 0.5 means the
/// stego source is indistinguishable from covers.
struct DetectionReport {
    double p_e = 0.5;
    double acc_cover = 0.5;
    double acc_stego = 0.5;
    std::size_t n_train = 0;  // pairs in the training split
    std::size_t n_test = 0;   // pairs in the test split
    std::uint64_t seed = 0;
    double ridge = 0.0;
    std::size_t dropped_features = 0;
    std::string split = "paired 50/50 shuffle";
    std::string variant_cover;
    std::string variant_stego;
};

namespace detail {

// Cholesky solve of (A + ridge I) x = b for symmetric positive definite A.
inline std::vector<double> spd_solve(std::vector<double> a, std::size_t d,
                                     std::vector<double> b, double ridge) {
    for (std::size_t i = 0; i < d; ++i) a[i * d + i] += ridge;
    // in-place lower Cholesky
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * d + k] * a[j * d + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("spd_solve: matrix not positive definite");
                a[i * d + i] = std::sqrt(s);
            } else {
                a[i * d + j] = s / a[j * d + j];
            }
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * d + k] * b[k];
        b[i] = s / a[i * d + i];
    }
    for (std::size_t i = d; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < d; ++k) s -= a[k * d + i] * b[k];
        b[i] = s / a[i * d + i];
    }
    return b;
}

// min over threshold and polarity of (false alarm + missed detection) / 2
inline double min_average_error(const std::vector<double>& cover_scores,
                                const std::vector<double>& stego_scores, double* fa_out,
                                double* md_out) {
    std::vector<double> all = cover_scores;
    all.insert(all.end(), stego_scores.begin(), stego_scores.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::vector<double> thresholds;
    thresholds.push_back(all.front() - 1.0);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        thresholds.push_back(0.5 * (all[i] + all[i + 1]));
    }
    thresholds.push_back(all.back() + 1.0);

    const double nc = static_cast<double>(cover_scores.size());
    const double ns = static_cast<double>(stego_scores.size());
    double best = 1.0, best_fa = 0.5, best_md = 0.5;
    for (double tau : thresholds) {
        std::size_t cover_high = 0, stego_high = 0;
        for (double s : cover_scores) cover_high += s >= tau;
        for (double s : stego_scores) stego_high += s >= tau;
        // polarity A: score >= tau called stego
        const double fa_a = cover_high / nc;
        const double md_a = (stego_scores.size() - stego_high) / ns;
        // polarity B: score < tau called stego
        const double fa_b = (cover_scores.size() - cover_high) / nc;
        const double md_b = stego_high / ns;
        const double err_a = 0.5 * (fa_a + md_a);
        const double err_b = 0.5 * (fa_b + md_b);
        if (err_a < best) best = err_a, best_fa = fa_a, best_md = md_a;
        if (err_b < best) best = err_b, best_fa = fa_b, best_md = md_b;
    }
    if (fa_out) *fa_out = best_fa;
    if (md_out) *md_out = best_md;
    return best;
}

}  // namespace detail

/// Trains a ridge-regularized Fisher linear discriminant on a paired
/// cover/stego feature set and reports the min-average detection error on a
/// held-out half. The split keeps each image's cover and stego on the same
/// side and is fully determined by the seed. Zero-variance features are
/// dropped (count recorded in the report).
inline DetectionReport train_eval_detector(const std::vector<FeatureVector>& cover,
                                           const std::vector<FeatureVector>& stego,
                                           std::uint64_t split_seed) {
    const std::size_t n = cover.size();
    if (n != stego.size()) {
        throw std::invalid_argument("train_eval_detector: cover/stego counts differ");
    }
    if (n < 40) {
        throw std::invalid_argument("train_eval_detector: need at least 40 pairs per class");
    }
    const std::size_t dim = cover.front().values.size();
    for (const auto& f : cover) {
        if (f.values.size() != dim) {
            throw std::invalid_argument("train_eval_detector: inconsistent feature lengths");
        }
    }
    for (const auto& f : stego) {
        if (f.values.size() != dim) {
            throw std::invalid_argument("train_eval_detector: inconsistent feature lengths");
        }
    }

    // paired split: shuffle image indices, first half trains
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng::Stream stream(split_seed);
    for (std::size_t i = n; i-- > 1;) {
        std::swap(order[i], order[stream.next_below(i + 1)]);
    }
    const std::size_t n_train = n / 2;
    const std::size_t n_test = n - n_train;

    // standardization from the training split, both classes pooled
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    for (std::size_t i = 0; i < n_train; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            mean[d] += cover[order[i]].values[d] + stego[order[i]].values[d];
        }
    }
    for (auto& m : mean) m /= static_cast<double>(2 * n_train);
    for (std::size_t i = 0; i < n_train; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double dc = cover[order[i]].values[d] - mean[d];
            const double ds = stego[order[i]].values[d] - mean[d];
            sd[d] += dc * dc + ds * ds;
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t d = 0; d < dim; ++d) {
        sd[d] = std::sqrt(sd[d] / static_cast<double>(2 * n_train));
        if (sd[d] > 1e-12) keep.push_back(d);
    }

    DetectionReport report;
    report.seed = split_seed;
    report.n_train = n_train;
    report.n_test = n_test;
    report.dropped_features = dim - keep.size();
    if (!cover.empty()) report.variant_cover = cover.front().provenance;
    if (!stego.empty()) report.variant_stego = stego.front().provenance;
    if (keep.empty()) return report;  // nothing to discriminate on

    const std::size_t kd = keep.size();
    auto standardized = [&](const FeatureVector& f, std::vector<double>& out) {
        out.resize(kd);
        for (std::size_t d = 0; d < kd; ++d) {
            out[d] = (f.values[keep[d]] - mean[keep[d]]) / sd[keep[d]];
        }
    };

    // class means and pooled within-class scatter on the training split
    std::vector<double> mu_c(kd, 0.0), mu_s(kd, 0.0), tmp;
    for (std::size_t i = 0; i < n_train; ++i) {
        standardized(cover[order[i]], tmp);
        for (std::size_t d = 0; d < kd; ++d) mu_c[d] += tmp[d];
        standardized(stego[order[i]], tmp);
        for (std::size_t d = 0; d < kd; ++d) mu_s[d] += tmp[d];
    }
    for (std::size_t d = 0; d < kd; ++d) {
        mu_c[d] /= static_cast<double>(n_train);
        mu_s[d] /= static_cast<double>(n_train);
    }
    std::vector<double> scatter(kd * kd, 0.0);
    auto accumulate = [&](const FeatureVector& f, const std::vector<double>& mu) {
        standardized(f, tmp);
        for (std::size_t d = 0; d < kd; ++d) tmp[d] -= mu[d];
        for (std::size_t a = 0; a < kd; ++a) {
            for (std::size_t b = a; b < kd; ++b) scatter[a * kd + b] += tmp[a] * tmp[b];
        }
    };
    for (std::size_t i = 0; i < n_train; ++i) {
        accumulate(cover[order[i]], mu_c);
        accumulate(stego[order[i]], mu_s);
    }
    for (std::size_t a = 0; a < kd; ++a) {
        for (std::size_t b = a + 1; b < kd; ++b) scatter[b * kd + a] = scatter[a * kd + b];
    }
    for (auto& v : scatter) v /= static_cast<double>(2 * n_train);

    report.ridge = 1e-3;
    std::vector<double> diff(kd);
    for (std::size_t d = 0; d < kd; ++d) diff[d] = mu_s[d] - mu_c[d];
    const std::vector<double> w = detail::spd_solve(scatter, kd, diff, report.ridge);

    std::vector<double> cover_scores, stego_scores;
    cover_scores.reserve(n_test);
    stego_scores.reserve(n_test);
    for (std::size_t i = n_train; i < n; ++i) {
        standardized(cover[order[i]], tmp);
        double s = 0.0;
        for (std::size_t d = 0; d < kd; ++d) s += w[d] * tmp[d];
        cover_scores.push_back(s);
        standardized(stego[order[i]], tmp);
        s = 0.0;
        for (std::size_t d = 0; d < kd; ++d) s += w[d] * tmp[d];
        stego_scores.push_back(s);
    }

    double fa = 0.5, md = 0.5;
    report.p_e = detail::min_average_error(cover_scores, stego_scores, &fa, &md);
    report.acc_cover = 1.0 - fa;
    report.acc_stego = 1.0 - md;
    return report;
}

}  // namespace jsteg
