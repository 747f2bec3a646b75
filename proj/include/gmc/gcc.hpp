#pragma once

#include <functional>
#include <optional>
#include <span>

#include "gmc/dataset.hpp"

namespace gmc {

// Antisymmetric pair-function choice that turns the generalized correlation
// sum into PLCC, SRCC or KRCC.
enum class PairMode { PlccDiff, SrccRankDiff, KrccSign };

// Symmetric nonnegative per-pair weight, evaluated lazily.
using WeightFn = std::function<double(std::size_t, std::size_t)>;

// Denominator sums below this are reported as Undefined (nullopt).
inline constexpr double kDegenerateDenominator = 1e-12;

inline double sign(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

// Per-index values whose pairwise combination yields a_ij (resp. b_ij):
// raw scores for PlccDiff/KrccSign, ranks for SrccRankDiff.
std::span<const double> pair_basis_a(const Dataset& ds, PairMode mode);
std::span<const double> pair_basis_b(const Dataset& ds, PairMode mode);

// a_ij (or b_ij) from the per-index basis values.
inline double pair_component(PairMode mode, double vi, double vj) {
    return mode == PairMode::KrccSign ? sign(vi - vj) : vi - vj;
}

// Textbook Pearson / Spearman (mid-ranks) / Kendall coefficient of
// (pred, mos). Undefined (nullopt) when either column has zero variance.
std::optional<double> classical_correlation(const Dataset& ds, PairMode mode);

// Weighted generalized correlation over all ordered pairs i != j:
//   sum(w a b) / (sqrt(sum(w a^2)) * sqrt(sum(w b^2))).
// Undefined when either denominator sum is below kDegenerateDenominator.
std::optional<double> weighted_gcc(const Dataset& ds, PairMode mode, const WeightFn& weight);

} // namespace gmc
