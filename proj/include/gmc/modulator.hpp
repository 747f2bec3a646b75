#pragma once

#include <cmath>

namespace gmc {

// Denominator convention for the pair-difference weight. Printed keeps the
// sigma_i^2 + sigma_j^2 form; Doubled uses 2(sigma_i^2 + sigma_j^2) for
// sensitivity analysis.
enum class PdConvention { Printed, Doubled };

inline double pd_denominator_multiplier(PdConvention c) {
    return c == PdConvention::Doubled ? 2.0 : 1.0;
}

// Weight of the pair (i, j) at target MOS qs: joint Gaussian probability of
// both ratings landing on qs.
inline double p_s(double qs, double q_i, double sigma_i, double q_j, double sigma_j) {
    const double di = qs - q_i;
    const double dj = qs - q_j;
    return std::exp(-di * di / (2.0 * sigma_i * sigma_i) -
                    dj * dj / (2.0 * sigma_j * sigma_j));
}

// Weight of the pair (i, j) at target quality difference qd: Gaussian in the
// gap between qd and |q_i - q_j| with variance sigma_i^2 + sigma_j^2.
inline double p_d(double qd, double q_i, double sigma_i, double q_j, double sigma_j,
                  PdConvention convention = PdConvention::Printed) {
    const double gap = qd - std::fabs(q_i - q_j);
    const double denom =
        pd_denominator_multiplier(convention) * (sigma_i * sigma_i + sigma_j * sigma_j);
    return std::exp(-gap * gap / denom);
}

} // namespace gmc
