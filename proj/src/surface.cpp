#include "gmc/surface.hpp"

#include <algorithm>
#include <cmath>

#include "gmc/error.hpp"
#include "gmc/numeric.hpp"
#include "gmc/parallel.hpp"
#include "pair_kernel.hpp"

namespace gmc {

namespace {

// Silverman's rule-of-thumb bandwidth for one axis of the sample coordinates.
double silverman_bandwidth(const std::vector<double>& x) {
    const double sd = sample_stddev(x);
    const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

// Mean distance to the nearest neighbor along one axis.
double mean_nn_spacing(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    if (n < 2) return 1.0;
    KahanSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        double nn;
        if (i == 0) nn = x[1] - x[0];
        else if (i == n - 1) nn = x[n - 1] - x[n - 2];
        else nn = std::min(x[i] - x[i - 1], x[i + 1] - x[i]);
        acc.add(nn);
    }
    return acc.value() / static_cast<double>(n);
}

// Solve the 3x3 system M beta = r by Gaussian elimination with partial
// pivoting; returns false when a pivot vanishes.
bool solve3(double m[3][3], double r[3], double beta[3]) {
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::fabs(m[idx[row]][col]) > std::fabs(m[idx[pivot]][col])) pivot = row;
        std::swap(idx[col], idx[pivot]);
        const double p = m[idx[col]][col];
        if (p == 0.0) return false;
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[idx[row]][col] / p;
            for (int c2 = col; c2 < 3; ++c2) m[idx[row]][c2] -= f * m[idx[col]][c2];
            r[idx[row]] -= f * r[idx[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double s = r[idx[col]];
        for (int c2 = col + 1; c2 < 3; ++c2) s -= m[idx[col]][c2] * beta[c2];
        beta[col] = s / m[idx[col]][col];
    }
    return true;
}

} // namespace

RegionPartition region_partition(Range qs_range, Range qd_range) {
    auto thirds = [](Range r) {
        const double w = (r.hi - r.lo) / 3.0;
        const double e1 = r.lo + w;
        const double e2 = r.lo + 2.0 * w;
        return std::array<Range, 3>{Range{r.lo, e1}, Range{e1, e2}, Range{e2, r.hi}};
    };
    const auto qs3 = thirds(qs_range);
    const auto qd3 = thirds(qd_range);
    RegionPartition part;
    for (int i = 0; i < 3; ++i) {
        part.quality[i] = Rect{qs3[i], qd_range};
        part.difference[i] = Rect{qs_range, qd3[i]};
    }
    return part;
}

QueryEvaluator::QueryEvaluator(const Dataset& ds, const DensityModel& dm, PairMode mode,
                               PdConvention pd_convention)
    : sign_mode_(mode == PairMode::KrccSign),
      denom_mult_(pd_denominator_multiplier(pd_convention)) {
    const auto sigmas = ds.sigmas_or_throw();
    const std::size_t n = ds.size();
    mos_.assign(ds.mos().begin(), ds.mos().end());
    sigma2_.resize(n);
    inv_two_sigma2_.resize(n);
    inv_density_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sigma2_[i] = sigmas[i] * sigmas[i];
        inv_two_sigma2_[i] = 1.0 / (2.0 * sigma2_[i]);
        inv_density_[i] = 1.0 / dm.density(mos_[i]);
    }
    const auto va = pair_basis_a(ds, mode);
    const auto vb = pair_basis_b(ds, mode);
    a_.assign(va.begin(), va.end());
    b_.assign(vb.begin(), vb.end());
}

std::optional<double> QueryEvaluator::gamma(double qs, double qd) const {
    const std::size_t n = mos_.size();
    std::vector<double> g(n);
    detail::gaussian_scaled(mos_.data(), inv_two_sigma2_.data(), inv_density_.data(), n, qs,
                            g.data());
    const auto sums = detail::weighted_pair_sums(mos_.data(), sigma2_.data(), g.data(), a_.data(),
                                                 b_.data(), n, qd, denom_mult_, sign_mode_);
    if (sums.sa2 < kDegenerateDenominator || sums.sb2 < kDegenerateDenominator)
        return std::nullopt;
    return sums.sab / (std::sqrt(sums.sa2) * std::sqrt(sums.sb2));
}

QueryPoint evaluate_query(const Dataset& ds, const DensityModel& dm, QueryPoint pt, PairMode mode,
                          PdConvention pd_convention) {
    const QueryEvaluator eval(ds, dm, mode, pd_convention);
    pt.gamma = eval.gamma(pt.qs, pt.qd);
    return pt;
}

std::vector<QueryPoint> evaluate_queries(const Dataset& ds, const DensityModel& dm,
                                         std::vector<QueryPoint> pts, PairMode mode,
                                         PdConvention pd_convention) {
    const QueryEvaluator eval(ds, dm, mode, pd_convention);
    parallel_for(pts.size(), [&](std::size_t k) {
        pts[k].gamma = eval.gamma(pts[k].qs, pts[k].qd);
    });
    return pts;
}

CorrelationSurface fit_surface(const std::vector<QueryPoint>& points, Range qs_range,
                               Range qd_range, int grid_size,
                               std::optional<std::pair<double, double>> bandwidth_override) {
    if (grid_size < 1) fail(Errc::ConfigError, "grid size must be positive");
    if (!(qs_range.hi > qs_range.lo) || !(qd_range.hi > qd_range.lo))
        fail(Errc::InvalidRange, "surface domain must be non-degenerate");

    CorrelationSurface surf;
    surf.grid_size = grid_size;
    surf.qs_range = qs_range;
    surf.qd_range = qd_range;

    for (const auto& p : points) {
        if (p.gamma) surf.source_points.push_back(p);
        else ++surf.excluded_count;
    }
    const std::size_t m = surf.source_points.size();
    if (m < kMinFitPoints)
        fail(Errc::TooFewPoints, "surface fit needs at least " + std::to_string(kMinFitPoints) +
                                     " defined points, got " + std::to_string(m));

    std::vector<double> xs(m), yd(m), gv(m);
    for (std::size_t k = 0; k < m; ++k) {
        xs[k] = surf.source_points[k].qs;
        yd[k] = surf.source_points[k].qd;
        gv[k] = *surf.source_points[k].gamma;
    }

    if (bandwidth_override) {
        surf.bandwidth_qs = bandwidth_override->first;
        surf.bandwidth_qd = bandwidth_override->second;
    } else {
        surf.bandwidth_qs = std::max(silverman_bandwidth(xs), 1.5 * mean_nn_spacing(xs));
        surf.bandwidth_qd = std::max(silverman_bandwidth(yd), 1.5 * mean_nn_spacing(yd));
    }
    if (!(surf.bandwidth_qs > 0.0) || !(surf.bandwidth_qd > 0.0))
        fail(Errc::TooFewPoints, "degenerate query-point spread, cannot choose fit bandwidths");

    const int g = grid_size;
    surf.qs_axis.resize(static_cast<std::size_t>(g));
    surf.qd_axis.resize(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        surf.qs_axis[static_cast<std::size_t>(i)] =
            qs_range.lo + (i + 0.5) * (qs_range.hi - qs_range.lo) / g;
        surf.qd_axis[static_cast<std::size_t>(i)] =
            qd_range.lo + (i + 0.5) * (qd_range.hi - qd_range.lo) / g;
    }

    const double inv_two_hs2 = 1.0 / (2.0 * surf.bandwidth_qs * surf.bandwidth_qs);
    const double inv_two_hd2 = 1.0 / (2.0 * surf.bandwidth_qd * surf.bandwidth_qd);
    const double gamma_mean = mean(gv);

    surf.grid.assign(static_cast<std::size_t>(g) * g, 0.0);
    parallel_for(static_cast<std::size_t>(g) * g, [&](std::size_t node) {
        const int iqs = static_cast<int>(node) / g;
        const int iqd = static_cast<int>(node) % g;
        const double cx = surf.qs_axis[static_cast<std::size_t>(iqs)];
        const double cy = surf.qd_axis[static_cast<std::size_t>(iqd)];

        double mmat[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double rhs[3] = {0, 0, 0};
        KahanSum wsum, wg;
        for (std::size_t k = 0; k < m; ++k) {
            const double dx = xs[k] - cx;
            const double dy = yd[k] - cy;
            const double u = std::exp(-dx * dx * inv_two_hs2 - dy * dy * inv_two_hd2);
            mmat[0][0] += u;
            mmat[0][1] += u * dx;
            mmat[0][2] += u * dy;
            mmat[1][1] += u * dx * dx;
            mmat[1][2] += u * dx * dy;
            mmat[2][2] += u * dy * dy;
            rhs[0] += u * gv[k];
            rhs[1] += u * dx * gv[k];
            rhs[2] += u * dy * gv[k];
            wsum.add(u);
            wg.add(u * gv[k]);
        }
        mmat[1][0] = mmat[0][1];
        mmat[2][0] = mmat[0][2];
        mmat[2][1] = mmat[1][2];

        double value;
        double eig[3];
        sym3_eigenvalues(mmat, eig);
        const bool well_posed = eig[0] > 0.0 && eig[2] / eig[0] <= kMaxLocalCondition;
        double beta[3];
        if (well_posed && solve3(mmat, rhs, beta)) {
            value = beta[0];
        } else if (wsum.value() > 0.0) {
            value = wg.value() / wsum.value(); // local constant fallback
        } else {
            value = gamma_mean;
        }
        surf.grid[node] = std::clamp(value, -1.0, 1.0);
    });

    return surf;
}

double integrate(const CorrelationSurface& surface, const Rect& region) {
    const double area =
        (region.qs.hi - region.qs.lo) * (region.qd.hi - region.qd.lo);
    if (!(area > 0.0)) fail(Errc::EmptyRegion, "integration region has zero area");

    const int g = surface.grid_size;
    const double ws = (surface.qs_range.hi - surface.qs_range.lo) / g;
    const double wd = (surface.qd_range.hi - surface.qd_range.lo) / g;

    KahanSum acc;
    for (int i = 0; i < g; ++i) {
        const double x0 = surface.qs_range.lo + i * ws;
        const double ox = std::min(x0 + ws, region.qs.hi) - std::max(x0, region.qs.lo);
        if (ox <= 0.0) continue;
        for (int j = 0; j < g; ++j) {
            const double y0 = surface.qd_range.lo + j * wd;
            const double oy = std::min(y0 + wd, region.qd.hi) - std::max(y0, region.qd.lo);
            if (oy <= 0.0) continue;
            acc.add(surface.value(i, j) * ox * oy);
        }
    }
    return acc.value() / area;
}

} // namespace gmc
