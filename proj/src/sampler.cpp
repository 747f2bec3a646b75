#include "gmc/sampler.hpp"

#include <numeric>

#include "gmc/error.hpp"
#include "gmc/rng.hpp"

namespace gmc {

namespace {

void validate(const SamplePlan& plan) {
    if (plan.k < 1) fail(Errc::InvalidRange, "sample count K must be positive");
    if (!(plan.qs_range.hi > plan.qs_range.lo))
        fail(Errc::InvalidRange, "qs range must satisfy max > min");
    if (!(plan.qd_range.hi > plan.qd_range.lo))
        fail(Errc::InvalidRange, "qd range must satisfy max > min");
    if (plan.qd_range.lo < 0.0)
        fail(Errc::InvalidRange, "qd range must be nonnegative (|dMOS| axis)");
}

} // namespace

std::vector<QueryPoint> lhs_from(const std::vector<int>& perm_x, const std::vector<int>& perm_y,
                                 const std::vector<double>& u_x, const std::vector<double>& u_y,
                                 Range qs_range, Range qd_range) {
    const std::size_t k = perm_x.size();
    if (perm_y.size() != k || u_x.size() != k || u_y.size() != k)
        fail(Errc::LengthMismatch, "LHS inputs must all have length K");

    const double ks = static_cast<double>(k);
    std::vector<QueryPoint> pts(k);
    for (std::size_t i = 0; i < k; ++i) {
        pts[i].qs = (perm_x[i] - u_x[i]) / ks * (qs_range.hi - qs_range.lo) + qs_range.lo;
        pts[i].qd = (perm_y[i] - u_y[i]) / ks * (qd_range.hi - qd_range.lo) + qd_range.lo;
    }
    return pts;
}

std::vector<QueryPoint> sample_points(const SamplePlan& plan) {
    validate(plan);
    Rng rng(plan.seed);
    const std::size_t k = static_cast<std::size_t>(plan.k);

    if (plan.scheme == SamplingScheme::Random) {
        std::vector<QueryPoint> pts(k);
        for (auto& p : pts) {
            p.qs = rng.uniform(plan.qs_range.lo, plan.qs_range.hi);
            p.qd = rng.uniform(plan.qd_range.lo, plan.qd_range.hi);
        }
        return pts;
    }

    std::vector<int> perm_x(k), perm_y(k);
    std::iota(perm_x.begin(), perm_x.end(), 1);
    std::iota(perm_y.begin(), perm_y.end(), 1);
    rng.shuffle(perm_x);
    rng.shuffle(perm_y);

    std::vector<double> u_x(k);
    for (auto& u : u_x) u = rng.uniform01();
    std::vector<double> u_y = u_x;
    if (!plan.shared_u)
        for (auto& u : u_y) u = rng.uniform01();

    return lhs_from(perm_x, perm_y, u_x, u_y, plan.qs_range, plan.qd_range);
}

} // namespace gmc
