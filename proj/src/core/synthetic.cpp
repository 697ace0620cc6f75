#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "rng.hpp"

namespace quansim {

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "gaussian_blobs") return SyntheticKind::GaussianBlobs;
    if (name == "smoothed_noise") return SyntheticKind::SmoothedNoise;
    throw InvalidArgumentError("unknown synthetic field kind: " + name);
}

const char* synthetic_kind_name(SyntheticKind kind) {
    return kind == SyntheticKind::GaussianBlobs ? "gaussian_blobs" : "smoothed_noise";
}

namespace {

std::vector<double> normalize_unit(std::vector<double> v) {
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    for (double& x : v) x = range > 0.0 ? (x - lo) / range : 0.0;
    return v;
}

std::vector<double> gaussian_blobs(int w, int h, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> blob_count(3, 6);
    std::uniform_real_distribution<double> ux(0.0, static_cast<double>(w - 1));
    std::uniform_real_distribution<double> uy(0.0, static_cast<double>(h - 1));
    std::uniform_real_distribution<double> uscale(0.08, 0.25);
    std::uniform_real_distribution<double> uweight(0.4, 1.0);
    std::bernoulli_distribution negative(0.3);

    const int k = blob_count(rng);
    std::vector<double> cx(k), cy(k), inv2s2(k), wgt(k);
    const double diag = std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
    for (int i = 0; i < k; ++i) {
        cx[i] = ux(rng);
        cy[i] = uy(rng);
        const double sigma = uscale(rng) * diag;
        inv2s2[i] = 1.0 / (2.0 * sigma * sigma);
        wgt[i] = uweight(rng) * (negative(rng) ? -1.0 : 1.0);
    }
    std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = 0.0;
            for (int i = 0; i < k; ++i) {
                const double dx = x - cx[i];
                const double dy = y - cy[i];
                v += wgt[i] * std::exp(-(dx * dx + dy * dy) * inv2s2[i]);
            }
            out[static_cast<std::size_t>(y) * w + x] = v;
        }
    }
    return out;
}

// Seeded white noise blurred with a fixed separable Gaussian kernel
// (sigma = 2 cells, radius 5).
std::vector<double> smoothed_noise(int w, int h, std::mt19937_64& rng) {
    constexpr int kRadius = 5;
    constexpr double kSigma = 2.0;
    double kernel[2 * kRadius + 1];
    double ksum = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        kernel[i + kRadius] = std::exp(-0.5 * i * i / (kSigma * kSigma));
        ksum += kernel[i + kRadius];
    }
    for (double& kv : kernel) kv /= ksum;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> noise(static_cast<std::size_t>(w) * h);
    for (double& v : noise) v = unit(rng);

    // Horizontal then vertical pass, clamping at the borders.
    std::vector<double> tmp(noise.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) {
                const int xi = std::clamp(x + i, 0, w - 1);
                acc += kernel[i + kRadius] * noise[static_cast<std::size_t>(y) * w + xi];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    std::vector<double> out(noise.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) {
                const int yi = std::clamp(y + i, 0, h - 1);
                acc += kernel[i + kRadius] * tmp[static_cast<std::size_t>(yi) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

GridField generate_synthetic(SyntheticKind kind, int width, int height, std::uint64_t seed,
                             double cell_size_m) {
    if (width < 5 || height < 5) {
        throw InvalidArgumentError("synthetic fields require width, height >= 5");
    }
    auto rng = substream(seed, RngPurpose::Field);
    std::vector<double> values = kind == SyntheticKind::GaussianBlobs
                                     ? gaussian_blobs(width, height, rng)
                                     : smoothed_noise(width, height, rng);
    return GridField(width, height, normalize_unit(std::move(values)), cell_size_m);
}

}  // namespace quansim
