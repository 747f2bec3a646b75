#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace gmc {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

// One (target MOS, target |dMOS|) coordinate plus its weighted correlation
// once evaluated. Undefined gamma means degenerate weighted support.
struct QueryPoint {
    double qs = 0.0;
    double qd = 0.0;
    std::optional<double> gamma;
};

enum class SamplingScheme { Lhs, Random };

struct SamplePlan {
    int k = 100;
    Range qs_range;
    Range qd_range;
    SamplingScheme scheme = SamplingScheme::Lhs;
    std::uint64_t seed = 0;
    bool shared_u = true;
};

// K query points: Latin hypercube (one point per equal-width stratum per
// axis) or naive uniform sampling. Deterministic given (plan, seed).
std::vector<QueryPoint> sample_points(const SamplePlan& plan);

// Deterministic LHS construction from explicit permutations (1-based) and
// in-stratum offsets; the randomized path above feeds this, and tests can
// call it directly with forced inputs.
std::vector<QueryPoint> lhs_from(const std::vector<int>& perm_x, const std::vector<int>& perm_y,
                                 const std::vector<double>& u_x, const std::vector<double>& u_y,
                                 Range qs_range, Range qd_range);

} // namespace gmc
