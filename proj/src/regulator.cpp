#include "gmc/regulator.hpp"

#include <algorithm>
#include <cmath>

#include "gmc/error.hpp"
#include "gmc/numeric.hpp"

namespace gmc {

namespace {

constexpr double kScaleMax = 100.0;
constexpr int kNormGridPoints = 1000;

int bin_of(double q, int bins) {
    const double width = kScaleMax / bins;
    const int idx = static_cast<int>(std::floor(q / width));
    return std::clamp(idx, 0, bins - 1);
}

} // namespace

DensityModel DensityModel::fit(const Dataset& ds, DensityMode mode, int bins, double bandwidth,
                               double floor) {
    if (ds.size() == 0) fail(Errc::EmptyDataset, "cannot fit a density on an empty dataset");
    if (bins < 1) fail(Errc::ConfigError, "bins must be positive");
    if (!(bandwidth > 0.0)) fail(Errc::ConfigError, "density bandwidth must be positive");

    DensityModel dm;
    dm.mode_ = mode;
    dm.bins_ = bins;
    dm.bandwidth_ = bandwidth;
    dm.floor_ = floor;

    if (mode == DensityMode::PerSampleKde) {
        const auto sigmas = ds.sigmas_or_throw();
        dm.kde_mos_.assign(ds.mos().begin(), ds.mos().end());
        dm.kde_inv_two_var_.reserve(sigmas.size());
        for (double s : sigmas) dm.kde_inv_two_var_.push_back(1.0 / (2.0 * s * s));
        return dm;
    }

    dm.bin_freq_.assign(static_cast<std::size_t>(bins), 0.0);
    for (double q : ds.mos()) dm.bin_freq_[static_cast<std::size_t>(bin_of(q, bins))] += 1.0;
    for (double& f : dm.bin_freq_) f /= static_cast<double>(ds.size());

    if (mode == DensityMode::BinnedKernelSmoothed) {
        // Normalize so the mean density over a uniform 1000-point grid is 1.
        KahanSum acc;
        for (int g = 0; g < kNormGridPoints; ++g) {
            const double q = (g + 0.5) * (kScaleMax / kNormGridPoints);
            acc.add(dm.raw_density(q));
        }
        const double m = acc.value() / kNormGridPoints;
        if (m > 0.0) dm.smooth_norm_ = m;
    }
    return dm;
}

double DensityModel::raw_density(double q) const {
    switch (mode_) {
        case DensityMode::PerSampleKde: {
            KahanSum acc;
            for (std::size_t u = 0; u < kde_mos_.size(); ++u) {
                const double d = kde_mos_[u] - q;
                acc.add(std::exp(-d * d * kde_inv_two_var_[u]));
            }
            return acc.value() / static_cast<double>(kde_mos_.size());
        }
        case DensityMode::BinnedKernelSmoothed: {
            const double width = kScaleMax / bins_;
            const double inv_two_h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
            KahanSum acc;
            for (int y = 0; y < bins_; ++y) {
                const double c = (y + 0.5) * width;
                const double d = q - c;
                acc.add(std::exp(-d * d * inv_two_h2) * bin_freq_[static_cast<std::size_t>(y)]);
            }
            return acc.value() / smooth_norm_;
        }
        case DensityMode::RawBinned:
            return bin_freq_[static_cast<std::size_t>(bin_of(q, bins_))];
    }
    return 0.0;
}

double DensityModel::density(double q) const { return std::max(raw_density(q), floor_); }

std::uint64_t DensityModel::content_hash() const {
    std::uint64_t h = fnv1a64(&mode_, sizeof(mode_));
    h = fnv1a64(&bins_, sizeof(bins_), h);
    h = fnv1a64(&bandwidth_, sizeof(bandwidth_), h);
    h = fnv1a64(&smooth_norm_, sizeof(smooth_norm_), h);
    auto mix = [&h](const std::vector<double>& v) {
        if (!v.empty()) h = fnv1a64(v.data(), v.size() * sizeof(double), h);
    };
    mix(bin_freq_);
    mix(kde_mos_);
    mix(kde_inv_two_var_);
    return h;
}

} // namespace gmc
