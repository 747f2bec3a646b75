#include "gmc/gcc.hpp"

#include <cmath>

#include "gmc/numeric.hpp"

namespace gmc {

namespace {

bool constant_column(std::span<const double> v) {
    for (double x : v)
        if (x != v[0]) return false;
    return true;
}

// Pearson with compensated two-pass sums.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double mx = mean(x), my = mean(y);
    KahanSum sxy, sxx, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    if (sxx.value() <= 0.0 || syy.value() <= 0.0) return std::nullopt;
    return sxy.value() / (std::sqrt(sxx.value()) * std::sqrt(syy.value()));
}

// Kendall via the sign-pair sums (tau-b under ties).
std::optional<double> kendall(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = p.size();
    double sab = 0.0, sa2 = 0.0, sb2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = sign(p[i] - p[j]);
            const double b = sign(q[i] - q[j]);
            sab += a * b;
            sa2 += a * a;
            sb2 += b * b;
        }
    }
    if (sa2 <= 0.0 || sb2 <= 0.0) return std::nullopt;
    return sab / (std::sqrt(sa2) * std::sqrt(sb2));
}

} // namespace

std::span<const double> pair_basis_a(const Dataset& ds, PairMode mode) {
    return mode == PairMode::SrccRankDiff ? ds.pred_ranks() : ds.preds();
}

std::span<const double> pair_basis_b(const Dataset& ds, PairMode mode) {
    return mode == PairMode::SrccRankDiff ? ds.mos_ranks() : ds.mos();
}

std::optional<double> classical_correlation(const Dataset& ds, PairMode mode) {
    if (constant_column(ds.preds()) || constant_column(ds.mos())) return std::nullopt;
    switch (mode) {
        case PairMode::PlccDiff:
            return pearson(ds.preds(), ds.mos());
        case PairMode::SrccRankDiff:
            return pearson(ds.pred_ranks(), ds.mos_ranks());
        case PairMode::KrccSign:
            return kendall(ds.preds(), ds.mos());
    }
    return std::nullopt;
}

std::optional<double> weighted_gcc(const Dataset& ds, PairMode mode, const WeightFn& weight) {
    const auto va = pair_basis_a(ds, mode);
    const auto vb = pair_basis_b(ds, mode);
    const std::size_t n = ds.size();

    KahanSum sab, sa2, sb2;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = weight(i, j);
            const double a = pair_component(mode, va[i], va[j]);
            const double b = pair_component(mode, vb[i], vb[j]);
            sab.add(w * a * b);
            sa2.add(w * a * a);
            sb2.add(w * b * b);
        }
    }
    if (sa2.value() < kDegenerateDenominator || sb2.value() < kDegenerateDenominator)
        return std::nullopt;
    return sab.value() / (std::sqrt(sa2.value()) * std::sqrt(sb2.value()));
}

} // namespace gmc
