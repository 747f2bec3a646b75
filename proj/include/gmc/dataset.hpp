#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gmc {

enum class SigmaSource { Provided, BetaEstimated };

// One image's record: model prediction, ground-truth MOS (canonical [0,100]
// scale after loading) and the rating standard deviation when known.
struct Sample {
    std::string id;
    double pred = 0.0;
    double mos = 0.0;
    std::optional<double> sigma;
    SigmaSource sigma_source = SigmaSource::Provided;
};

// Per-sample rating standard deviation from a Beta rating model with global
// dispersion phi: 100 * sqrt(mu(1-mu)/(1+phi)), mu = mos/100 clamped away
// from the scale ends.
double estimate_sigma(double mos_normalized, double dispersion_phi);

// Immutable, rank-annotated sample collection. Construction normalizes
// nothing; use load_scores() or the factory below with already-canonical MOS.
class Dataset {
public:
    // `samples` must carry canonical-scale MOS values.
    Dataset(std::vector<Sample> samples, std::pair<double, double> scale_bounds,
            bool sigma_column_present);

    std::size_t size() const { return samples_.size(); }
    const std::vector<Sample>& samples() const { return samples_; }

    std::span<const double> preds() const { return preds_; }
    std::span<const double> mos() const { return mos_; }
    std::span<const double> pred_ranks() const { return pred_ranks_; }
    std::span<const double> mos_ranks() const { return mos_ranks_; }

    std::pair<double, double> scale_bounds() const { return scale_bounds_; }
    bool sigma_column_present() const { return sigma_column_present_; }
    bool all_sigmas_present() const;

    double mos_min() const;
    double mos_max() const;

    // Copy with every absent sigma filled via estimate_sigma(mos, phi).
    Dataset with_estimated_sigmas(double dispersion_phi) const;

    // Row subset (canonical values kept, ranks recomputed).
    Dataset subset(std::span<const std::size_t> indices) const;

    // Copy with the pred column replaced (used by transform-invariance checks).
    Dataset with_preds(std::span<const double> new_preds) const;

    // Contiguous sigma vector; throws MissingSigma if any is absent.
    std::vector<double> sigmas_or_throw() const;

private:
    std::vector<Sample> samples_;
    std::vector<double> preds_, mos_, pred_ranks_, mos_ranks_;
    std::pair<double, double> scale_bounds_;
    bool sigma_column_present_;
};

enum class ScoreFormat { Csv, Json };

// Load a score file (columns id, pred, mos and optional std). MOS and std
// are mapped onto the canonical [0,100] scale using `scale_override` when
// given, the empirical (min,max) otherwise.
Dataset load_scores(const std::string& path, ScoreFormat format,
                    std::optional<std::pair<double, double>> scale_override = std::nullopt);

ScoreFormat detect_format(const std::string& path);

} // namespace gmc
