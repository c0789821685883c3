#include "kernels_internal.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 backend, 4 doubles per lane group.
//
// Elementwise kernels use separate mul and add (never _mm256_fmadd_pd) so
// every element sees the same two roundings as the scalar reference and the
// results are bit-identical. Reductions use two accumulators; their sums are
// only roundoff-close to scalar and are tolerance-tested, not bit-tested.

namespace lapwave::kernels::avx2 {

void axpy(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, vx));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

void scale(double* v, double a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), va));
    for (; i < n; ++i)
        v[i] *= a;
}

void negate(double* out, const double* x, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_xor_pd(_mm256_loadu_pd(x + i), sign));
    for (; i < n; ++i)
        out[i] = -x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                 _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                                 _mm256_loadu_pd(b + i + 4)));
    }
    __m256d acc = _mm256_add_pd(acc0, acc1);
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double norm_sq(const double* v, std::size_t n) {
    return dot(v, v, n);
}

static inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double max_abs(const double* v, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, abs_pd(_mm256_loadu_pd(v + i)));
    double lanes[4];
    _mm256_storeu_pd(lanes, vm);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i)
        m = std::max(m, std::fabs(v[i]));
    return m;
}

double max_abs_diff(const double* v, double c, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), vc)));
    double lanes[4];
    _mm256_storeu_pd(lanes, vm);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i)
        m = std::max(m, std::fabs(v[i] - c));
    return m;
}

} // namespace lapwave::kernels::avx2
