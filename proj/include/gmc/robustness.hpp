#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmc/dataset.hpp"
#include "gmc/pipeline.hpp"

namespace gmc {

struct GaussianMode {
    double center = 50.0;
    double width = 10.0;
    double weight = 1.0;
};

// Gaussian probability-weighted subset draw: selection probability of sample
// i is proportional to sum_m weight_m * exp(-(q_i - center_m)^2 / (2 width_m^2)).
struct ResamplePlan {
    std::string name;
    std::vector<GaussianMode> modes;
    std::size_t subset_size = 0;
    std::uint64_t seed = 0;
    bool replacement = false;
};

std::vector<double> selection_weights(std::span<const double> mos,
                                      std::span<const GaussianMode> modes);

// Deterministic weighted draw (without replacement by default).
std::vector<std::size_t> draw_indices(std::span<const double> mos, const ResamplePlan& plan);

Dataset draw_subset(const Dataset& ds, const ResamplePlan& plan);

// The nine default plans: three unimodal, three bimodal, three trimodal
// mixtures; per-plan seeds derived from `seed`.
std::vector<ResamplePlan> default_plans(std::size_t dataset_size, std::uint64_t seed);

struct RobustnessCell {
    std::optional<double> srcc;
    std::optional<double> gmc_g;
};

struct ModelDispersion {
    double mean_srcc = 0.0;
    double std_srcc = 0.0;
    double mean_gmc_g = 0.0;
    double std_gmc_g = 0.0;
};

struct RobustnessReport {
    std::vector<std::string> plan_names;                // one per subset
    std::vector<std::string> model_names;
    std::vector<std::vector<RobustnessCell>> cells;     // [plan][model]
    std::vector<ModelDispersion> dispersion;            // per model
};

// Draw each plan's subset once (selection depends only on MOS, which all
// models share), then evaluate classical SRCC and GMC_g per model with the
// density model refit on every subset. Query ranges are pinned to the parent
// dataset so the nine evaluations integrate over the same domain.
RobustnessReport run_protocol(const std::vector<std::pair<std::string, Dataset>>& models,
                              const std::vector<ResamplePlan>& plans, const GmcOptions& opt);

} // namespace gmc
