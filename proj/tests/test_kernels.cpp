#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lapwave/kernels.hpp"
#include "lapwave/rng.hpp"

using namespace lapwave;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v)
        x = rng.gaussian() * std::pow(10.0, rng.uniform01() * 6.0 - 3.0);
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
            return false;
    return true;
}

} // namespace

TEST_CASE("scalar backend is always available and selectable") {
    CHECK(kernels::backend_available(kernels::Backend::Scalar));
    const auto before = kernels::active_backend();
    CHECK(kernels::set_backend(kernels::Backend::Scalar));
    CHECK(kernels::active_backend() == kernels::Backend::Scalar);
    CHECK(kernels::set_backend(before));
}

TEST_CASE("elementwise kernels are bit-identical across all compiled backends") {
    const auto* ref = kernels::table_for(kernels::Backend::Scalar);
    REQUIRE(ref != nullptr);
    // sizes straddle the vector width and exercise tails
    for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(3), std::size_t(4),
                          std::size_t(7), std::size_t(8), std::size_t(33),
                          std::size_t(1024), std::size_t(1031)}) {
        const std::vector<double> x = random_vec(n, 11 + n);
        const std::vector<double> y0 = random_vec(n, 777 + n);
        const double a = -0.7031415926;

        std::vector<double> y_ref = y0;
        ref->axpy(y_ref.data(), a, x.data(), n);
        std::vector<double> s_ref = y0;
        ref->scale(s_ref.data(), a, n);
        std::vector<double> n_ref(n);
        ref->negate(n_ref.data(), x.data(), n);

        for (auto b : kernels::available_backends()) {
            const auto* t = kernels::table_for(b);
            REQUIRE(t != nullptr);
            std::vector<double> y = y0;
            t->axpy(y.data(), a, x.data(), n);
            CHECK_MESSAGE(bit_equal(y, y_ref),
                          "axpy mismatch on backend " << kernels::backend_name(b)
                                                      << " n=" << n);
            std::vector<double> s = y0;
            t->scale(s.data(), a, n);
            CHECK(bit_equal(s, s_ref));
            std::vector<double> ng(n);
            t->negate(ng.data(), x.data(), n);
            CHECK(bit_equal(ng, n_ref));
        }
    }
}

TEST_CASE("reductions agree across backends within roundoff") {
    const auto* ref = kernels::table_for(kernels::Backend::Scalar);
    for (std::size_t n : {std::size_t(1), std::size_t(9), std::size_t(128),
                          std::size_t(1000)}) {
        const std::vector<double> x = random_vec(n, 5 + n);
        const std::vector<double> y = random_vec(n, 99 + n);
        const double d_ref = ref->dot(x.data(), y.data(), n);
        const double ns_ref = ref->norm_sq(x.data(), n);
        for (auto b : kernels::available_backends()) {
            const auto* t = kernels::table_for(b);
            const double d = t->dot(x.data(), y.data(), n);
            CHECK(std::fabs(d - d_ref) <= 1e-12 * (std::fabs(d_ref) + ns_ref));
            CHECK(std::fabs(t->norm_sq(x.data(), n) - ns_ref) <= 1e-12 * ns_ref);
            // max reductions are order-independent, hence exact
            CHECK(t->max_abs(x.data(), n) == ref->max_abs(x.data(), n));
            CHECK(t->max_abs_diff(x.data(), 0.25, n) ==
                  ref->max_abs_diff(x.data(), 0.25, n));
        }
    }
}

TEST_CASE("kernel results match direct formulas") {
    std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> x = {10.0, 20.0, 30.0};
    kernels::axpy(y, 0.5, x);
    CHECK(y[0] == 6.0);
    CHECK(y[1] == 12.0);
    CHECK(y[2] == 18.0);
    kernels::scale(y, 2.0);
    CHECK(y[2] == 36.0);
    CHECK(kernels::dot(x, x) == doctest::Approx(1400.0));
    CHECK(kernels::norm_sq(x) == doctest::Approx(1400.0));
    CHECK(kernels::max_abs(std::vector<double>{-5.0, 4.0}) == 5.0);
    CHECK(kernels::max_abs_diff(std::vector<double>{1.0, 4.0}, 2.0) == 2.0);
    std::vector<double> neg(3);
    kernels::negate(neg, x);
    CHECK(neg[0] == -10.0);
}

TEST_CASE("unavailable backends are rejected") {
#if !defined(__aarch64__)
    CHECK_FALSE(kernels::set_backend(kernels::Backend::Neon));
    CHECK(kernels::table_for(kernels::Backend::Neon) == nullptr);
#endif
}
