#pragma once

#include <cstdint>
#include <vector>

#include "gmc/dataset.hpp"

namespace gmc {

enum class DensityMode { PerSampleKde, BinnedKernelSmoothed, RawBinned };

// Quality-score density estimate over the canonical [0,100] scale. The
// distribution-regulator weight for a pair is the product of reciprocal
// densities at the two MOS values.
class DensityModel {
public:
    static constexpr double kDefaultBandwidth = 5.0;
    static constexpr int kDefaultBins = 100;
    static constexpr double kDefaultFloor = 1e-6;

    static DensityModel fit(const Dataset& ds, DensityMode mode, int bins = kDefaultBins,
                            double bandwidth = kDefaultBandwidth, double floor = kDefaultFloor);

    // Estimated density at q, floored at the configured epsilon.
    double density(double q) const;

    // Distribution-regulator factor 1 / (D(q_i) * D(q_j)).
    double p_t(double q_i, double q_j) const { return 1.0 / (density(q_i) * density(q_j)); }

    DensityMode mode() const { return mode_; }
    int bins() const { return bins_; }
    double bandwidth() const { return bandwidth_; }
    double floor() const { return floor_; }
    const std::vector<double>& bin_freq() const { return bin_freq_; }

    // Hash of the fitted state; lets callers verify a model was refit.
    std::uint64_t content_hash() const;

private:
    DensityModel() = default;

    double raw_density(double q) const;

    DensityMode mode_ = DensityMode::BinnedKernelSmoothed;
    int bins_ = kDefaultBins;
    double bandwidth_ = kDefaultBandwidth;
    double floor_ = kDefaultFloor;
    double smooth_norm_ = 1.0;
    std::vector<double> bin_freq_;
    std::vector<double> kde_mos_;
    std::vector<double> kde_inv_two_var_;
};

} // namespace gmc
