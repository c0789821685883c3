#include "kernels_internal.hpp"

#include <arm_neon.h>
#include <cmath>

// NEON backend, 2 doubles per lane group. Same contract as AVX2: elementwise
// kernels avoid fused multiply-add (vmulq + vaddq, never vfmaq) and match the
// scalar reference bit for bit; reductions are tolerance-tested.

namespace lapwave::kernels::neon {

void axpy(double* y, double a, const double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

void scale(double* v, double a, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(v + i, vmulq_f64(vld1q_f64(v + i), va));
    for (; i < n; ++i)
        v[i] *= a;
}

void negate(double* out, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vnegq_f64(vld1q_f64(x + i)));
    for (; i < n; ++i)
        out[i] = -x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    float64x2_t acc = vaddq_f64(acc0, acc1);
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double norm_sq(const double* v, std::size_t n) {
    return dot(v, v, n);
}

double max_abs(const double* v, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vm = vmaxq_f64(vm, vabsq_f64(vld1q_f64(v + i)));
    double m = std::max(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i)
        m = std::max(m, std::fabs(v[i]));
    return m;
}

double max_abs_diff(const double* v, double c, std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(c);
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vm = vmaxq_f64(vm, vabsq_f64(vsubq_f64(vld1q_f64(v + i), vc)));
    double m = std::max(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i)
        m = std::max(m, std::fabs(v[i] - c));
    return m;
}

} // namespace lapwave::kernels::neon
