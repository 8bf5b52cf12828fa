#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fracstab/linalg.hpp"

using namespace fracstab;
using linalg::DenseMatrix;
using C = std::complex<double>;

namespace {

DenseMatrix rand_matrix(std::mt19937& rng, int n, double scale = 2.0) {
    std::uniform_real_distribution<double> U(-scale, scale);
    DenseMatrix A(n);
    for (auto& v : A.a) v = U(rng);
    return A;
}

double frob(const DenseMatrix& A) {
    double s = 0;
    for (double v : A.a) s += v * v;
    return std::sqrt(s);
}

// characteristic polynomial evaluated by a test-side complex LU determinant
C charpoly(const DenseMatrix& A, C lambda) {
    const int n = A.n;
    std::vector<C> M((std::size_t)n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M[i * n + j] = C(A(i, j)) - (i == j ? lambda : C(0));
    C det = 1.0;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(M[r * n + c]) > std::abs(M[p * n + c])) p = r;
        if (std::abs(M[p * n + c]) == 0.0) return 0.0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(M[p * n + j], M[c * n + j]);
            det = -det;
        }
        det *= M[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            const C f = M[r * n + c] / M[c * n + c];
            for (int j = c; j < n; ++j) M[r * n + j] -= f * M[c * n + j];
        }
    }
    return det;
}

// test-side power iteration for the spectral norm
double norm2_oracle(const DenseMatrix& A, int iters = 2000) {
    const int n = A.n;
    std::vector<double> v(n, 1.0 / std::sqrt((double)n)), w(n), u(n);
    double sigma = 0;
    for (int it = 0; it < iters; ++it) {
        for (int r = 0; r < n; ++r) {
            w[r] = 0;
            for (int c = 0; c < n; ++c) w[r] += A(r, c) * v[c];
        }
        for (int c = 0; c < n; ++c) {
            u[c] = 0;
            for (int r = 0; r < n; ++r) u[c] += A(r, c) * w[r];
        }
        double nu = 0;
        for (double x : u) nu += x * x;
        nu = std::sqrt(nu);
        if (nu == 0) return 0;
        for (int c = 0; c < n; ++c) v[c] = u[c] / nu;
        sigma = std::sqrt(nu);
    }
    return sigma;
}

} // namespace

TEST_CASE("eig residuals and characteristic polynomial, random 2x2 and 3x3") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = trial % 2 ? 2 : 3;
        DenseMatrix A = rand_matrix(rng, n);
        auto sp = linalg::eig(A);
        REQUIRE((int)sp.eigenvalues.size() == n);
        // characteristic polynomial root check scaled by ||A||^n
        const double scale = std::pow(frob(A) + 1.0, n);
        for (const auto& l : sp.eigenvalues) CHECK(std::abs(charpoly(A, l)) < 1e-10 * scale);
        if (sp.condition_flag == linalg::ConditionFlag::Diagonalizable) {
            for (int col = 0; col < n; ++col) {
                // ||A v - lambda v|| small and v unit
                double nv = 0;
                for (int i = 0; i < n; ++i) nv += std::norm(sp.vec(i, col));
                CHECK(std::sqrt(nv) == doctest::Approx(1.0).epsilon(1e-10));
                double res = 0;
                for (int i = 0; i < n; ++i) {
                    C acc = 0;
                    for (int j = 0; j < n; ++j) acc += A(i, j) * sp.vec(j, col);
                    res += std::norm(acc - sp.eigenvalues[col] * sp.vec(i, col));
                }
                CHECK(std::sqrt(res) < 1e-9 * (frob(A) + 1.0));
            }
        }
        // sort contract: Re descending, then |Im| ascending, +Im first
        for (int i = 0; i + 1 < n; ++i) {
            const auto &a = sp.eigenvalues[i], &b = sp.eigenvalues[i + 1];
            const bool ordered =
                a.real() > b.real() + 1e-14 ||
                (std::fabs(a.real() - b.real()) <= 1e-12 * (1.0 + std::fabs(a.real())) &&
                 (std::fabs(a.imag()) < std::fabs(b.imag()) + 1e-14 ||
                  (std::fabs(std::fabs(a.imag()) - std::fabs(b.imag())) < 1e-12 && a.imag() >= b.imag())));
            CHECK(ordered);
        }
    }
}

TEST_CASE("eig known spectra") {
    DenseMatrix T(3, {2, 0, 0, 1, 1, 0, 0, 1, 3});
    auto sp = linalg::eig(T);
    CHECK(sp.eigenvalues[0].real() == doctest::Approx(3.0));
    CHECK(sp.eigenvalues[1].real() == doctest::Approx(2.0));
    CHECK(sp.eigenvalues[2].real() == doctest::Approx(1.0));
    for (auto l : sp.eigenvalues) CHECK(l.imag() == 0.0);

    DenseMatrix R(2, {0, -2, 2, 0}); // eigenvalues +-2i
    auto spr = linalg::eig(R);
    CHECK(spr.eigenvalues[0].real() == doctest::Approx(0.0));
    CHECK(spr.eigenvalues[0].imag() == doctest::Approx(2.0));
    CHECK(spr.eigenvalues[1].imag() == doctest::Approx(-2.0));

    DenseMatrix one(1, {-4.5});
    CHECK(linalg::eig(one).eigenvalues[0].real() == -4.5);
}

TEST_CASE("near-defective flag") {
    DenseMatrix J(2, {1, 1, 0, 1});
    CHECK(linalg::eig(J).condition_flag == linalg::ConditionFlag::NearDefective);
    DenseMatrix J3(3, {2, 1, 0, 0, 2, 1, 0, 0, 2});
    CHECK(linalg::eig(J3).condition_flag == linalg::ConditionFlag::NearDefective);
    DenseMatrix D(2, {1, 0, 0, 2});
    CHECK(linalg::eig(D).condition_flag == linalg::ConditionFlag::Diagonalizable);
}

TEST_CASE("expm exact families") {
    // rotation generator -> cos/sin
    const double th = 0.7;
    DenseMatrix G(2, {0, -th, th, 0});
    auto E = linalg::expm(G, 1.0);
    CHECK(E(0, 0) == doctest::Approx(std::cos(th)).epsilon(1e-14));
    CHECK(E(1, 0) == doctest::Approx(std::sin(th)).epsilon(1e-14));
    CHECK(E(0, 1) == doctest::Approx(-std::sin(th)).epsilon(1e-14));

    // nilpotent -> I + N
    DenseMatrix N(3, {0, 1, 0, 0, 0, 1, 0, 0, 0});
    auto EN = linalg::expm(N, 1.0);
    CHECK(EN(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(EN(0, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(EN(1, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(EN(2, 0) == 0.0);

    // diagonal
    DenseMatrix Dg(2, {-1, 0, 0, 2});
    auto ED = linalg::expm(Dg, 1.0);
    CHECK(ED(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(ED(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(ED(0, 1) == 0.0);
}

TEST_CASE("expm semigroup property") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        DenseMatrix A = rand_matrix(rng, 3, 1.0);
        auto E1 = linalg::expm(A, 1.0);
        auto E2 = linalg::expm(A, 2.0);
        DenseMatrix P(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double acc = 0;
                for (int k = 0; k < 3; ++k) acc += E1(i, k) * E1(k, j);
                P(i, j) = acc;
            }
        for (int i = 0; i < 9; ++i) CHECK(P.a[i] == doctest::Approx(E2.a[i]).epsilon(1e-11));
    }
}

TEST_CASE("expm overflow throws") {
    DenseMatrix A(2, {800.0, 0, 0, 800.0});
    CHECK_THROWS_AS(linalg::expm(A, 1.0), Overflow);
}

TEST_CASE("apply_analytic against expm, and the defective refusal") {
    std::mt19937 rng(29);
    auto expf = [](C z) { return std::exp(z); };
    for (int trial = 0; trial < 40; ++trial) {
        DenseMatrix A = rand_matrix(rng, 3, 1.5);
        auto sp = linalg::eig(A);
        if (sp.condition_flag != linalg::ConditionFlag::Diagonalizable) continue;
        auto F = linalg::apply_analytic(A, expf);
        auto E = linalg::expm(A, 1.0);
        for (int i = 0; i < 9; ++i)
            CHECK(F.a[i] == doctest::Approx(E.a[i]).epsilon(2e-9).scale(frob(E) + 1));
    }
    DenseMatrix J(2, {3, 1, 0, 3});
    CHECK_THROWS_AS(linalg::apply_analytic(J, expf), DefectiveMatrix);
}

TEST_CASE("norm2 and numerical abscissa") {
    DenseMatrix D(2, {3, 0, 0, -4});
    CHECK(linalg::norm2(D) == doctest::Approx(4.0).epsilon(1e-13));
    DenseMatrix N(2, {0, 2, 0, 0});
    CHECK(linalg::norm2(N) == doctest::Approx(2.0).epsilon(1e-13));

    std::mt19937 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        DenseMatrix A = rand_matrix(rng, 3);
        CHECK(linalg::norm2(A) == doctest::Approx(norm2_oracle(A)).epsilon(1e-8));
    }

    DenseMatrix R(2, {0, -1, 1, 0});
    CHECK(linalg::numerical_abscissa(R) == doctest::Approx(0.0).scale(1.0));
    DenseMatrix S(2, {-1, 10, 0, -1});
    CHECK(linalg::numerical_abscissa(S) == doctest::Approx(4.0).epsilon(1e-12));
    // abscissa dominates the spectral bound
    for (int trial = 0; trial < 25; ++trial) {
        DenseMatrix A = rand_matrix(rng, 3);
        auto sp = linalg::eig(A);
        CHECK(linalg::numerical_abscissa(A) >= sp.eigenvalues[0].real() - 1e-10);
    }
}

TEST_CASE("input validation") {
    DenseMatrix A(2);
    A(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(linalg::eig(A), DomainError);
    CHECK_THROWS_AS(DenseMatrix(2, {1.0, 2.0, 3.0}), DomainError);
    CHECK(DenseMatrix::identity(3)(2, 2) == 1.0);
    CHECK(DenseMatrix::identity(3)(0, 1) == 0.0);
}
