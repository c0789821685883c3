#include "kernels_internal.hpp"

#include <cmath>

// Reference backend. The elementwise loops below define the bit pattern the
// SIMD backends must reproduce exactly: one multiply and one add per element,
// in index order, no contraction (the build sets -ffp-contract=off).

namespace lapwave::kernels::scalar {

void axpy(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

void scale(double* v, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        v[i] *= a;
}

void negate(double* out, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = -x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double norm_sq(const double* v, std::size_t n) {
    return dot(v, v, n);
}

double max_abs(const double* v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::fabs(v[i]));
    return m;
}

double max_abs_diff(const double* v, double c, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::fabs(v[i] - c));
    return m;
}

} // namespace lapwave::kernels::scalar
