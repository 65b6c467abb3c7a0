// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include "gibbs/kernels.hpp"

#if GIBBS_SIMD_X86

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace gibbs::kernels::avx2 {
namespace {

// exp on four lanes: x = k ln2 + r with |r| <= ln2/2, degree-13 Taylor on r,
// then scale by 2^k in two halves so subnormal results come out right.
// Inputs below -745.2 flush to zero, -inf included.
inline __m256d exp4(__m256d x)
{
    const __m256d lo = _mm256_set1_pd(-745.2);
    const __m256d hi = _mm256_set1_pd(709.78);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
    r = _mm256_fnmadd_pd(k, ln2_lo, r);

    static constexpr double c[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
        1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
        1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
        1.0,                1.0};
    __m256d p = _mm256_set1_pd(c[0]);
    for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

    __m128i ki = _mm256_cvtpd_epi32(k);
    __m128i k1 = _mm_srai_epi32(ki, 1);
    __m128i k2 = _mm_sub_epi32(ki, k1);
    const __m256i bias = _mm256_set1_epi64x(1023);
    __m256i e1 = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k1), bias), 52);
    __m256i e2 = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k2), bias), 52);
    p = _mm256_mul_pd(p, _mm256_castsi256_pd(e1));
    p = _mm256_mul_pd(p, _mm256_castsi256_pd(e2));
    return p;
}

inline double hsum(__m256d v)
{
    __m128d a = _mm256_castpd256_pd128(v);
    __m128d b = _mm256_extractf128_pd(v, 1);
    a = _mm_add_pd(a, b);
    return _mm_cvtsd_f64(_mm_add_sd(a, _mm_unpackhi_pd(a, a)));
}

inline double hmax(__m256d v)
{
    __m128d a = _mm256_castpd256_pd128(v);
    __m128d b = _mm256_extractf128_pd(v, 1);
    a = _mm_max_pd(a, b);
    return _mm_cvtsd_f64(_mm_max_sd(a, _mm_unpackhi_pd(a, a)));
}

}  // namespace

double tilt_max(double a, const double* x, const double* b, std::size_t n)
{
    const double ninf = -std::numeric_limits<double>::infinity();
    __m256d va = _mm256_set1_pd(a);
    __m256d m = _mm256_set1_pd(ninf);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d t = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), _mm256_loadu_pd(b + j));
        m = _mm256_max_pd(m, t);
    }
    double best = hmax(m);
    for (; j < n; ++j) {
        double t = std::fma(a, x[j], b[j]);
        if (t > best) best = t;
    }
    return best;
}

double tilt_weights(double a, const double* x, const double* b, double shift, double* out,
                    std::size_t n)
{
    __m256d va = _mm256_set1_pd(a);
    __m256d vs = _mm256_set1_pd(shift);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d t = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), _mm256_loadu_pd(b + j));
        __m256d w = exp4(_mm256_sub_pd(t, vs));
        _mm256_storeu_pd(out + j, w);
        acc = _mm256_add_pd(acc, w);
    }
    double s = hsum(acc);
    for (; j < n; ++j) {
        out[j] = std::exp(std::fma(a, x[j], b[j]) - shift);
        s += out[j];
    }
    return s;
}

Moments tilt_moments(double a, const double* x, const double* b, double shift, std::size_t n)
{
    __m256d va = _mm256_set1_pd(a);
    __m256d vs = _mm256_set1_pd(shift);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d vx = _mm256_loadu_pd(x + j);
        __m256d w = exp4(_mm256_sub_pd(_mm256_fmadd_pd(va, vx, _mm256_loadu_pd(b + j)), vs));
        __m256d xw = _mm256_mul_pd(vx, w);
        a0 = _mm256_add_pd(a0, w);
        a1 = _mm256_add_pd(a1, xw);
        a2 = _mm256_fmadd_pd(vx, xw, a2);
    }
    Moments m{hsum(a0), hsum(a1), hsum(a2)};
    for (; j < n; ++j) {
        double w = std::exp(std::fma(a, x[j], b[j]) - shift);
        m.s0 += w;
        m.s1 += x[j] * w;
        m.s2 += x[j] * x[j] * w;
    }
    return m;
}

}  // namespace gibbs::kernels::avx2

#endif
