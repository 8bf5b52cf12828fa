// AVX2/FMA kernel variants.  Compiled with function-level target attributes so
// the translation unit builds without -mavx2 and the library still loads on
// hosts without AVX2; dispatch in kernels.cpp never calls these there.

#include <cstddef>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define FRACSTAB_TARGET_AVX2 __attribute__((target("avx2,fma")))
#else
#define FRACSTAB_TARGET_AVX2
#endif

namespace fracstab::kernels::avx2 {

#if defined(__x86_64__) || defined(__i386__)

FRACSTAB_TARGET_AVX2
static inline double hsum256(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

FRACSTAB_TARGET_AVX2
double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum256(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

// axpy keeps separate multiply and add (no fmadd): the elementwise update is
// order-preserving, so the backend choice must not change results bitwise.
FRACSTAB_TARGET_AVX2
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vp = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), vp));
    }
    // intrinsic tail as well, or the compiler would contract it to an fma
    for (; i < n; ++i) {
        __m128d vp = _mm_mul_sd(_mm_set_sd(alpha), _mm_load_sd(x + i));
        _mm_store_sd(y + i, _mm_add_sd(_mm_load_sd(y + i), vp));
    }
}

FRACSTAB_TARGET_AVX2
double nrm2sq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum256(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

FRACSTAB_TARGET_AVX2
void matvec(const double* a, const double* x, double* y,
            std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r)
        y[r] = dot(a + r * cols, x, cols);
}

#else

// Non-x86 fallback: never selected at runtime, present to satisfy the linker.
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
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

#endif

} // namespace fracstab::kernels::avx2
