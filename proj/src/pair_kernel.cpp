#include "pair_kernel.hpp"

#include <cmath>

#include "gmc/numeric.hpp"

#if defined(__AVX2__) && defined(GMC_HAVE_MVEC_EXP)
#include <immintrin.h>
extern "C" __m256d _ZGVdN4v_exp(__m256d);
#define GMC_PAIR_KERNEL_AVX2 1
#endif

namespace gmc::detail {

namespace {

inline double sgn(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

#ifdef GMC_PAIR_KERNEL_AVX2

struct KahanVec {
    __m256d sum = _mm256_setzero_pd();
    __m256d carry = _mm256_setzero_pd();

    inline void add(__m256d x) {
        const __m256d y = _mm256_sub_pd(x, carry);
        const __m256d t = _mm256_add_pd(sum, y);
        carry = _mm256_sub_pd(_mm256_sub_pd(t, sum), y);
        sum = t;
    }
};

// Lanes first (fixed order), then the scalar-tail accumulator.
inline double collapse(const KahanVec& v, const KahanSum& tail) {
    double lanes[4];
    _mm256_storeu_pd(lanes, v.sum);
    KahanSum total;
    for (double lane : lanes) total.add(lane);
    total.add(tail.value());
    return total.value();
}

inline __m256d sign4(__m256d d) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d pos = _mm256_and_pd(_mm256_cmp_pd(d, zero, _CMP_GT_OQ), _mm256_set1_pd(1.0));
    const __m256d neg = _mm256_and_pd(_mm256_cmp_pd(d, zero, _CMP_LT_OQ), _mm256_set1_pd(-1.0));
    return _mm256_or_pd(pos, neg);
}

PairSums pair_sums_avx2(const double* q, const double* s2, const double* g, const double* a,
                        const double* b, std::size_t n, double qd, double denom_mult,
                        bool sign_mode) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));
    const __m256d qd4 = _mm256_set1_pd(qd);
    const __m256d mult4 = _mm256_set1_pd(denom_mult);
    const __m256d zero = _mm256_setzero_pd();

    KahanVec vab, va2, vb2;
    KahanSum tab, ta2, tb2;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const __m256d qi = _mm256_set1_pd(q[i]);
        const __m256d s2i = _mm256_set1_pd(s2[i]);
        const __m256d gi = _mm256_set1_pd(g[i]);
        const __m256d ai = _mm256_set1_pd(a[i]);
        const __m256d bi = _mm256_set1_pd(b[i]);

        std::size_t j = i + 1;
        for (; j + 4 <= n; j += 4) {
            const __m256d qj = _mm256_loadu_pd(q + j);
            const __m256d adq = _mm256_and_pd(_mm256_sub_pd(qi, qj), abs_mask);
            const __m256d gap = _mm256_sub_pd(qd4, adq);
            const __m256d denom = _mm256_mul_pd(mult4, _mm256_add_pd(s2i, _mm256_loadu_pd(s2 + j)));
            const __m256d arg =
                _mm256_sub_pd(zero, _mm256_div_pd(_mm256_mul_pd(gap, gap), denom));
            const __m256d w =
                _mm256_mul_pd(_mm256_mul_pd(gi, _mm256_loadu_pd(g + j)), _ZGVdN4v_exp(arg));

            __m256d da = _mm256_sub_pd(ai, _mm256_loadu_pd(a + j));
            __m256d db = _mm256_sub_pd(bi, _mm256_loadu_pd(b + j));
            if (sign_mode) {
                da = sign4(da);
                db = sign4(db);
            }
            vab.add(_mm256_mul_pd(w, _mm256_mul_pd(da, db)));
            va2.add(_mm256_mul_pd(w, _mm256_mul_pd(da, da)));
            vb2.add(_mm256_mul_pd(w, _mm256_mul_pd(db, db)));
        }
        for (; j < n; ++j) {
            const double gap = qd - std::fabs(q[i] - q[j]);
            const double w =
                g[i] * g[j] * std::exp(-gap * gap / (denom_mult * (s2[i] + s2[j])));
            double da = a[i] - a[j];
            double db = b[i] - b[j];
            if (sign_mode) {
                da = sgn(da);
                db = sgn(db);
            }
            tab.add(w * da * db);
            ta2.add(w * da * da);
            tb2.add(w * db * db);
        }
    }

    PairSums out;
    out.sab = 2.0 * collapse(vab, tab);
    out.sa2 = 2.0 * collapse(va2, ta2);
    out.sb2 = 2.0 * collapse(vb2, tb2);
    return out;
}

#endif // GMC_PAIR_KERNEL_AVX2

[[maybe_unused]] PairSums pair_sums_scalar(const double* q, const double* s2, const double* g,
                                           const double* a, const double* b, std::size_t n,
                                           double qd, double denom_mult, bool sign_mode) {
    KahanSum sab, sa2, sb2;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = qd - std::fabs(q[i] - q[j]);
            const double w =
                g[i] * g[j] * std::exp(-gap * gap / (denom_mult * (s2[i] + s2[j])));
            double da = a[i] - a[j];
            double db = b[i] - b[j];
            if (sign_mode) {
                da = sgn(da);
                db = sgn(db);
            }
            sab.add(w * da * db);
            sa2.add(w * da * da);
            sb2.add(w * db * db);
        }
    }
    PairSums out;
    out.sab = 2.0 * sab.value();
    out.sa2 = 2.0 * sa2.value();
    out.sb2 = 2.0 * sb2.value();
    return out;
}

} // namespace

PairSums weighted_pair_sums(const double* q, const double* s2, const double* g, const double* a,
                            const double* b, std::size_t n, double qd, double denom_mult,
                            bool sign_mode) {
#ifdef GMC_PAIR_KERNEL_AVX2
    return pair_sums_avx2(q, s2, g, a, b, n, qd, denom_mult, sign_mode);
#else
    return pair_sums_scalar(q, s2, g, a, b, n, qd, denom_mult, sign_mode);
#endif
}

void gaussian_scaled(const double* q, const double* inv_two_var, const double* scale,
                     std::size_t n, double qs, double* out) {
#ifdef GMC_PAIR_KERNEL_AVX2
    const __m256d qs4 = _mm256_set1_pd(qs);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(qs4, _mm256_loadu_pd(q + i));
        const __m256d arg = _mm256_sub_pd(
            zero, _mm256_mul_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(inv_two_var + i)));
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_ZGVdN4v_exp(arg), _mm256_loadu_pd(scale + i)));
    }
    for (; i < n; ++i) {
        const double d = qs - q[i];
        out[i] = std::exp(-d * d * inv_two_var[i]) * scale[i];
    }
#else
    for (std::size_t i = 0; i < n; ++i) {
        const double d = qs - q[i];
        out[i] = std::exp(-d * d * inv_two_var[i]) * scale[i];
    }
#endif
}

} // namespace gmc::detail
