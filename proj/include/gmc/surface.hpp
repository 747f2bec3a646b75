#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmc/dataset.hpp"
#include "gmc/gcc.hpp"
#include "gmc/modulator.hpp"
#include "gmc/regulator.hpp"
#include "gmc/sampler.hpp"

namespace gmc {

struct Rect {
    Range qs;
    Range qd;
};

// Equal-width thirds of each axis: quality scales LQ/MQ/HQ over the MOS
// axis, difference bands LD/MD/HD over the |dMOS| axis. Adjacent rects share
// boundary values so the thirds tile the domain exactly.
struct RegionPartition {
    std::array<Rect, 3> quality;    // LQ, MQ, HQ
    std::array<Rect, 3> difference; // LD, MD, HD
};

RegionPartition region_partition(Range qs_range, Range qd_range);

// Precomputed per-dataset state for evaluating weighted correlations at many
// query points. The pair weight at query (qs, qd) is
//   p_s(i,j) * p_d(i,j) * p_t(i,j)
// with the MOS-locality and regulator factors folded into one per-sample
// vector, so each pair costs a single exp.
class QueryEvaluator {
public:
    QueryEvaluator(const Dataset& ds, const DensityModel& dm, PairMode mode,
                   PdConvention pd_convention = PdConvention::Printed);

    std::optional<double> gamma(double qs, double qd) const;

private:
    std::vector<double> mos_, sigma2_, inv_two_sigma2_, inv_density_, a_, b_;
    bool sign_mode_;
    double denom_mult_;
};

// Weighted correlation at one query point; Undefined gamma when the weighted
// support degenerates.
QueryPoint evaluate_query(const Dataset& ds, const DensityModel& dm, QueryPoint pt, PairMode mode,
                          PdConvention pd_convention = PdConvention::Printed);

// All K queries, evaluated in parallel. Results are independent of the
// worker count.
std::vector<QueryPoint> evaluate_queries(const Dataset& ds, const DensityModel& dm,
                                         std::vector<QueryPoint> pts, PairMode mode,
                                         PdConvention pd_convention = PdConvention::Printed);

// Continuous correlation surface fitted from evaluated query points by local
// linear kernel regression, discretized on a grid of cell centers.
struct CorrelationSurface {
    int grid_size = 0;
    Range qs_range;
    Range qd_range;
    std::vector<double> qs_axis, qd_axis; // cell centers, strictly increasing
    std::vector<double> grid;             // row-major [iqs * grid_size + iqd], in [-1,1]
    double bandwidth_qs = 0.0;
    double bandwidth_qd = 0.0;
    std::vector<QueryPoint> source_points; // defined-gamma points used in the fit
    int excluded_count = 0;

    double value(int iqs, int iqd) const { return grid[static_cast<std::size_t>(iqs) * grid_size + iqd]; }
};

inline constexpr int kDefaultGridSize = 50;
inline constexpr int kMinFitPoints = 6;
inline constexpr double kMaxLocalCondition = 1e8;

// Fit the surface from query points (Undefined gammas are excluded and
// counted). Bandwidths default to Silverman's rule per axis, floored at
// 1.5x the mean nearest-neighbor spacing; rank-deficient local systems fall
// back to the locally weighted mean. Grid values are clipped to [-1,1].
CorrelationSurface fit_surface(const std::vector<QueryPoint>& points, Range qs_range,
                               Range qd_range, int grid_size = kDefaultGridSize,
                               std::optional<std::pair<double, double>> bandwidth_override = {});

// Area-normalized midpoint-rule integral over the region; partial grid cells
// contribute in proportion to their overlap.
double integrate(const CorrelationSurface& surface, const Rect& region);

// Full evaluation result for one model.
struct GmcReport {
    double gmc_g = 0.0;
    std::array<double, 3> gmc_s{}; // LQ, MQ, HQ
    std::array<double, 3> gmc_d{}; // LD, MD, HD
    std::array<std::optional<double>, 3> baselines{}; // PLCC, SRCC, KRCC
    PairMode metric_mode = PairMode::SrccRankDiff;
    int k_used = 0;
    int k_excluded = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
    Range qs_range;
    Range qd_range;
};

} // namespace gmc
