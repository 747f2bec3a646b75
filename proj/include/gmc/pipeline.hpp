#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmc/dataset.hpp"
#include "gmc/surface.hpp"

namespace gmc {

// Analysis knobs shared by the eval, robustness and ablation pipelines.
struct GmcOptions {
    PairMode mode = PairMode::SrccRankDiff;
    int k = 100;
    int bins = DensityModel::kDefaultBins;
    int grid = kDefaultGridSize;
    double density_bandwidth = DensityModel::kDefaultBandwidth;
    double dispersion_phi = 20.0;
    bool kernel_smoothing = true;
    SamplingScheme sampler = SamplingScheme::Lhs;
    std::uint64_t seed = 0;
    std::optional<Range> qs_range; // default: empirical MOS (min,max)
    std::optional<Range> qd_range; // default: (0, empirical max |dMOS|)
    PdConvention pd_convention = PdConvention::Printed;
    std::optional<DensityMode> density_mode; // default: resolved from the data
};

// Density mode actually used when none is forced: per-sample KDE when the
// input carried rating standard deviations, kernel-smoothed bins otherwise;
// disabling kernel smoothing always selects raw bin frequencies.
DensityMode resolve_density_mode(const GmcOptions& opt, const Dataset& ds);

Range resolve_qs_range(const GmcOptions& opt, const Dataset& ds);
Range resolve_qd_range(const GmcOptions& opt, const Dataset& ds);

// Hex digest of the analysis options, embedded in outputs for audit.
std::string options_digest(const GmcOptions& opt);

struct GmcResult {
    GmcReport report;
    CorrelationSurface surface;
    std::vector<QueryPoint> queries; // all K points, undefined gammas included
    DensityMode density_mode_used = DensityMode::BinnedKernelSmoothed;
};

// Full single-model pipeline: sigma fill, density fit, K query evaluations,
// surface fit, global/regional integration, classical baselines.
GmcResult compute_gmc(const Dataset& ds, const GmcOptions& opt);

struct ModelInput {
    std::string name;
    std::string path;
};

struct RunConfig {
    std::vector<ModelInput> inputs;
    GmcOptions options;
    std::optional<std::pair<double, double>> scale_override;
    std::string output_dir;
    bool render_svg = false;
};

// Evaluate every input model and write report.json, surface.csv, queries.csv
// (and optionally surface.svg) under <output_dir>/<model>/. All inputs must
// share an identical MOS column. Outputs are byte-stable for a fixed
// (inputs, options, seed).
std::vector<std::pair<std::string, GmcReport>> run_gmc(const RunConfig& config);

struct AblationRow {
    SamplingScheme scheme;
    int k = 0;
    std::uint64_t seed = 0;
    std::optional<double> gmc_g;
};

struct AblationSummaryRow {
    SamplingScheme scheme;
    int k = 0;
    double mean_gmc_g = 0.0;
    double std_gmc_g = 0.0;
    int runs = 0;
};

struct AblationResult {
    std::vector<AblationRow> rows;
    std::vector<AblationSummaryRow> summary;
};

// Sampling-size sweep: GMC_g for every (scheme, K, seed) combination under
// both LHS and random sampling, plus per-(scheme, K) dispersion.
AblationResult run_ablation_sampling(const Dataset& ds, const GmcOptions& base,
                                     const std::vector<int>& k_values,
                                     const std::vector<std::uint64_t>& seeds);

enum class Polarity { HigherBetter, LowerBetter };

// Linear score combination: min-max normalize each column, reflect (1 - v)
// the lower-is-better ones, and sum.
std::vector<double> combine_scores(std::span<const double> a, std::span<const double> b,
                                   Polarity polarity_a, Polarity polarity_b);

const char* pair_mode_name(PairMode mode);
const char* scheme_name(SamplingScheme scheme);
const char* density_mode_name(DensityMode mode);

} // namespace gmc
