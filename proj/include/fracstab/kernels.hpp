#pragma once

#include <cstddef>

// Low-level dense kernels behind the numerical modules: weighted history sums
// in the Volterra solvers, dense eigenbasis transforms, norms.  Each kernel
// has a portable scalar reference implementation and, where the host supports
// it, a SIMD variant selected once at runtime.  The scalar versions stay
// callable so equivalence tests can compare the two paths bit-for-tolerance.

namespace fracstab::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// Returns the backend actually in use after dispatch.
Backend active_backend();

// Force a backend (used by tests and the FRACSTAB_KERNELS env override).
// Requesting an unavailable backend falls back to Scalar.
void force_backend(Backend b);

// dot(a, b) = sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum of squares
double nrm2sq(const double* x, std::size_t n);

// y = A x, A row-major (rows x cols)
void matvec(const double* a, const double* x, double* y,
            std::size_t rows, std::size_t cols);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void matvec(const double* a, const double* x, double* y,
            std::size_t rows, std::size_t cols);
} // namespace scalar

namespace detail {
bool avx2_available();
} // namespace detail

} // namespace fracstab::kernels
