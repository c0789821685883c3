#include "kernels_internal.hpp"

#include <cstdlib>
#include <cstring>

namespace lapwave::kernels {

namespace {

constexpr Table k_scalar_table = {
    scalar::axpy, scalar::scale, scalar::negate,
    scalar::dot, scalar::norm_sq, scalar::max_abs, scalar::max_abs_diff,
};

#if defined(LAPWAVE_HAVE_AVX2)
constexpr Table k_avx2_table = {
    avx2::axpy, avx2::scale, avx2::negate,
    avx2::dot, avx2::norm_sq, avx2::max_abs, avx2::max_abs_diff,
};
#endif

#if defined(LAPWAVE_HAVE_NEON)
constexpr Table k_neon_table = {
    neon::axpy, neon::scale, neon::negate,
    neon::dot, neon::norm_sq, neon::max_abs, neon::max_abs_diff,
};
#endif

bool cpu_supports(Backend b) {
    switch (b) {
    case Backend::Scalar:
        return true;
    case Backend::Avx2:
#if defined(LAPWAVE_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    case Backend::Neon:
#if defined(LAPWAVE_HAVE_NEON)
        return true; // baseline on aarch64
#else
        return false;
#endif
    }
    return false;
}

Backend pick_default() {
    if (const char* env = std::getenv("LAPWAVE_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0)
            return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_supports(Backend::Avx2))
            return Backend::Avx2;
        if (std::strcmp(env, "neon") == 0 && cpu_supports(Backend::Neon))
            return Backend::Neon;
        // unknown or unsupported value: fall through to auto-detect
    }
    if (cpu_supports(Backend::Avx2))
        return Backend::Avx2;
    if (cpu_supports(Backend::Neon))
        return Backend::Neon;
    return Backend::Scalar;
}

struct Selection {
    Backend backend;
    const Table* table;
    Selection() : backend(pick_default()), table(table_for(backend)) {}
};

Selection& selection() {
    static Selection s;
    return s;
}

} // namespace

const Table* table_for(Backend b) {
    if (!cpu_supports(b))
        return nullptr;
    switch (b) {
    case Backend::Scalar:
        return &k_scalar_table;
    case Backend::Avx2:
#if defined(LAPWAVE_HAVE_AVX2)
        return &k_avx2_table;
#else
        return nullptr;
#endif
    case Backend::Neon:
#if defined(LAPWAVE_HAVE_NEON)
        return &k_neon_table;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    }
    return "?";
}

Backend active_backend() { return selection().backend; }

bool backend_available(Backend b) { return table_for(b) != nullptr; }

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
        if (backend_available(b))
            out.push_back(b);
    return out;
}

bool set_backend(Backend b) {
    const Table* t = table_for(b);
    if (!t)
        return false;
    selection().backend = b;
    selection().table = t;
    return true;
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
    selection().table->axpy(y.data(), a, x.data(), y.size());
}

void scale(std::span<double> v, double a) {
    selection().table->scale(v.data(), a, v.size());
}

void negate(std::span<double> out, std::span<const double> x) {
    selection().table->negate(out.data(), x.data(), out.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    return selection().table->dot(a.data(), b.data(), a.size());
}

double norm_sq(std::span<const double> v) {
    return selection().table->norm_sq(v.data(), v.size());
}

double max_abs(std::span<const double> v) {
    return selection().table->max_abs(v.data(), v.size());
}

double max_abs_diff(std::span<const double> v, double c) {
    return selection().table->max_abs_diff(v.data(), c, v.size());
}

} // namespace lapwave::kernels
