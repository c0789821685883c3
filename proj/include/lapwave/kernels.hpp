#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

// Dense vector kernels used by the integrators and the consensus iteration.
//
// Elementwise kernels (axpy, scale, negate) are bit-identical across all
// backends: one rounding per element, no fused multiply-add, fixed order.
// Reductions (dot, norm_sq) may use a different summation tree per backend
// and agree with the scalar reference only up to roundoff; max-style
// reductions are exact. The active backend is picked at load time from CPU
// capabilities and can be overridden with the LAPWAVE_KERNELS environment
// variable or set_backend().

namespace lapwave::kernels {

enum class Backend { Scalar, Avx2, Neon };

const char* backend_name(Backend b);
Backend active_backend();
bool backend_available(Backend b);
std::vector<Backend> available_backends();

// Returns false (and leaves the selection unchanged) if unavailable.
bool set_backend(Backend b);

// y += a * x
void axpy(std::span<double> y, double a, std::span<const double> x);
// v *= a
void scale(std::span<double> v, double a);
// out = -x
void negate(std::span<double> out, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> v);
double max_abs(std::span<const double> v);
// max_i |v_i - c|
double max_abs_diff(std::span<const double> v, double c);

// Raw function table, one entry per backend. Exposed so equivalence tests
// can drive every compiled backend regardless of the host CPU selection.
struct Table {
    void (*axpy)(double*, double, const double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
    void (*negate)(double*, const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*norm_sq)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    double (*max_abs_diff)(const double*, double, std::size_t);
};

const Table* table_for(Backend b); // nullptr if not compiled in or unsupported

} // namespace lapwave::kernels
