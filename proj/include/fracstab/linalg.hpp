#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fracstab/errors.hpp"

namespace fracstab::linalg {

struct DenseMatrix {
    int n = 0;
    std::vector<double> a; // row-major, n*n

    DenseMatrix() = default;
    explicit DenseMatrix(int dim) : n(dim), a((std::size_t)dim * dim, 0.0) {}
    DenseMatrix(int dim, std::vector<double> rowmajor) : n(dim), a(std::move(rowmajor)) {
        if (a.size() != (std::size_t)n * n) throw DomainError("entry count must be n*n");
    }

    static DenseMatrix identity(int dim);

    double& operator()(int i, int j) { return a[(std::size_t)i * n + j]; }
    double operator()(int i, int j) const { return a[(std::size_t)i * n + j]; }
};

enum class ConditionFlag { Diagonalizable, NearDefective };

struct Spectrum {
    int n = 0;
    std::vector<std::complex<double>> eigenvalues; // size n, Re descending
    ConditionFlag condition_flag = ConditionFlag::Diagonalizable;
    // column-major right eigenvectors, unit columns, aligned with eigenvalues
    std::vector<std::complex<double>> eigenvectors;

    std::complex<double> vec(int i, int col) const {
        return eigenvectors[(std::size_t)col * n + i];
    }
};

// Eigendecomposition of a real square matrix.  n <= 2 is closed-form from the
// characteristic polynomial; larger n goes through balancing plus Hessenberg
// QR.  condition_flag is NearDefective when cond_2 of the eigenvector matrix
// exceeds 1e8.
Spectrum eig(const DenseMatrix& A);

// e^{tA} by scaling-and-squaring with the degree-13 Pade kernel.
// Throws Overflow when the result leaves the representable range.
DenseMatrix expm(const DenseMatrix& A, double t);

// V f(Lambda) V^{-1} with the real part extracted; requires a comfortably
// diagonalizable A (throws DefectiveMatrix otherwise, callers fall back to
// the subordination quadrature).
DenseMatrix apply_analytic(const DenseMatrix& A,
                           const std::function<std::complex<double>(std::complex<double>)>& f);

// Spectral norm ||A||_2.
double norm2(const DenseMatrix& A);

// max eigenvalue of the symmetric part (A + A^T)/2; bounds Re lambda from
// above for every eigenvalue, which is what the mode-cutoff certificate needs.
double numerical_abscissa(const DenseMatrix& A);

} // namespace fracstab::linalg
