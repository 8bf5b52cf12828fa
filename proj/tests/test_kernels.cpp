#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fracstab/kernels.hpp"

using namespace fracstab;

namespace {

// plain-loop references, kept independent of the library's scalar path
double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> ref_matvec(const std::vector<double>& A, const std::vector<double>& x,
                               std::size_t rows, std::size_t cols) {
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) y[r] += A[r * cols + c] * x[c];
    return y;
}

std::vector<double> rand_vec(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

// sizes straddling SIMD lane boundaries, including odd tails
const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 100, 257};

} // namespace

TEST_CASE("scalar kernels match plain-loop references") {
    kernels::force_backend(kernels::Backend::Scalar);
    std::mt19937 rng(11);
    for (std::size_t n : kSizes) {
        auto a = rand_vec(rng, n), b = rand_vec(rng, n);
        CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(ref_dot(a, b)).epsilon(1e-13));
        CHECK(kernels::nrm2sq(a.data(), n) == doctest::Approx(ref_dot(a, a)).epsilon(1e-13));

        auto y = rand_vec(rng, n);
        auto yref = y;
        kernels::axpy(0.73, a.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i) yref[i] += 0.73 * a[i];
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(yref[i]).epsilon(1e-14));
    }
    kernels::force_backend(kernels::Backend::Auto);
}

TEST_CASE("simd and scalar paths agree on every size") {
    if (!kernels::detail::avx2_available()) {
        MESSAGE("host has no AVX2; dispatch must report Scalar");
        kernels::force_backend(kernels::Backend::Auto);
        CHECK(kernels::active_backend() == kernels::Backend::Scalar);
        return;
    }
    kernels::force_backend(kernels::Backend::Avx2);
    REQUIRE(kernels::active_backend() == kernels::Backend::Avx2);
    std::mt19937 rng(23);
    for (std::size_t n : kSizes) {
        auto a = rand_vec(rng, n), b = rand_vec(rng, n);
        const double scale = std::sqrt(kernels::scalar::nrm2sq(a.data(), n) *
                                       kernels::scalar::nrm2sq(b.data(), n)) +
                             1e-30;
        CHECK(std::fabs(kernels::dot(a.data(), b.data(), n) -
                        kernels::scalar::dot(a.data(), b.data(), n)) < 1e-13 * scale);
        CHECK(std::fabs(kernels::nrm2sq(a.data(), n) - kernels::scalar::nrm2sq(a.data(), n)) <
              1e-13 * (kernels::scalar::nrm2sq(a.data(), n) + 1e-30));

        auto y1 = rand_vec(rng, n);
        auto y2 = y1;
        kernels::axpy(-1.3, a.data(), y1.data(), n);
        kernels::scalar::axpy(-1.3, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);
    }
    kernels::force_backend(kernels::Backend::Auto);
}

TEST_CASE("matvec agrees with reference on rectangular shapes") {
    std::mt19937 rng(37);
    const std::size_t shapes[][2] = {{1, 1}, {1, 7}, {7, 1}, {3, 5}, {8, 8}, {9, 17}, {33, 12}, {64, 65}};
    for (auto backend : {kernels::Backend::Scalar, kernels::Backend::Avx2}) {
        kernels::force_backend(backend);
        for (auto [r, c] : shapes) {
            auto A = rand_vec(rng, r * c);
            auto x = rand_vec(rng, c);
            std::vector<double> y(r, -1.0);
            kernels::matvec(A.data(), x.data(), y.data(), r, c);
            auto yref = ref_matvec(A, x, r, c);
            for (std::size_t i = 0; i < r; ++i)
                CHECK(y[i] == doctest::Approx(yref[i]).epsilon(1e-12));
        }
    }
    kernels::force_backend(kernels::Backend::Auto);
}

TEST_CASE("known small values") {
    kernels::force_backend(kernels::Backend::Auto);
    const double a[] = {1, 2, 3};
    const double b[] = {4, 5, 6};
    CHECK(kernels::dot(a, b, 3) == 32.0);
    CHECK(kernels::nrm2sq(a, 3) == 14.0);
    const double M[] = {1, 0, 0, 1, 1, 1}; // 2x3
    double y[2];
    kernels::matvec(M, a, y, 2, 3);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 6.0);
}
