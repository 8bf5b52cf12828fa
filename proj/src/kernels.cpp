#include "fracstab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace fracstab::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double nrm2sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void matvec(const double* a, const double* x, double* y,
            std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r)
        y[r] = dot(a + r * cols, x, cols);
}

} // namespace scalar

namespace avx2 {
// defined in kernels_avx2.cpp (function-level target attributes)
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void matvec(const double* a, const double* x, double* y,
            std::size_t rows, std::size_t cols);
} // namespace avx2

namespace detail {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace detail

namespace {

std::atomic<Backend> g_backend{Backend::Auto};
std::once_flag g_env_once;

Backend resolve(Backend req) {
    if (req == Backend::Avx2 && !detail::avx2_available()) return Backend::Scalar;
    if (req == Backend::Auto)
        return detail::avx2_available() ? Backend::Avx2 : Backend::Scalar;
    return req;
}

Backend current() {
    std::call_once(g_env_once, [] {
        if (const char* env = std::getenv("FRACSTAB_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) g_backend = Backend::Scalar;
            else if (std::strcmp(env, "avx2") == 0) g_backend = Backend::Avx2;
        }
    });
    return resolve(g_backend.load());
}

} // namespace

Backend active_backend() { return current(); }

void force_backend(Backend b) {
    std::call_once(g_env_once, [] {});
    g_backend = b;
}

double dot(const double* a, const double* b, std::size_t n) {
    return current() == Backend::Avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    if (current() == Backend::Avx2) avx2::axpy(alpha, x, y, n);
    else scalar::axpy(alpha, x, y, n);
}

double nrm2sq(const double* x, std::size_t n) {
    return current() == Backend::Avx2 ? avx2::nrm2sq(x, n) : scalar::nrm2sq(x, n);
}

void matvec(const double* a, const double* x, double* y,
            std::size_t rows, std::size_t cols) {
    if (current() == Backend::Avx2) avx2::matvec(a, x, y, rows, cols);
    else scalar::matvec(a, x, y, rows, cols);
}

} // namespace fracstab::kernels
