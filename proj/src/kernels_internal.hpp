#pragma once

#include "lapwave/kernels.hpp"

namespace lapwave::kernels {

namespace scalar {
void axpy(double* y, double a, const double* x, std::size_t n);
void scale(double* v, double a, std::size_t n);
void negate(double* out, const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double norm_sq(const double* v, std::size_t n);
double max_abs(const double* v, std::size_t n);
double max_abs_diff(const double* v, double c, std::size_t n);
} // namespace scalar

#if defined(LAPWAVE_HAVE_AVX2)
namespace avx2 {
void axpy(double* y, double a, const double* x, std::size_t n);
void scale(double* v, double a, std::size_t n);
void negate(double* out, const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double norm_sq(const double* v, std::size_t n);
double max_abs(const double* v, std::size_t n);
double max_abs_diff(const double* v, double c, std::size_t n);
} // namespace avx2
#endif

#if defined(LAPWAVE_HAVE_NEON)
namespace neon {
void axpy(double* y, double a, const double* x, std::size_t n);
void scale(double* v, double a, std::size_t n);
void negate(double* out, const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double norm_sq(const double* v, std::size_t n);
double max_abs(const double* v, std::size_t n);
double max_abs_diff(const double* v, double c, std::size_t n);
} // namespace neon
#endif

} // namespace lapwave::kernels
