#pragma once

#include <cstddef>

namespace gmc::detail {

struct PairSums {
    double sab = 0.0;
    double sa2 = 0.0;
    double sb2 = 0.0;
};

// Weighted generalized-correlation sums over all ordered pairs i != j with
//   w_ij = g[i] * g[j] * exp(-(qd - |q[i]-q[j]|)^2 / (denom_mult*(s2[i]+s2[j])))
// computed as twice the i < j sums (every summand is symmetric in i, j).
// In diff mode a_ij = a[i]-a[j]; in sign mode a_ij = sgn(a[i]-a[j]); same
// for b. Accumulation is compensated and the summation order is fixed, so
// results are reproducible for a given build.
PairSums weighted_pair_sums(const double* q, const double* s2, const double* g, const double* a,
                            const double* b, std::size_t n, double qd, double denom_mult,
                            bool sign_mode);

// Gaussian per-sample factor exp(-(qs - q[i])^2 * inv_two_var[i]) * scale[i],
// written to out[0..n).
void gaussian_scaled(const double* q, const double* inv_two_var, const double* scale,
                     std::size_t n, double qs, double* out);

} // namespace gmc::detail
