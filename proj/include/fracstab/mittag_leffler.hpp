#pragma once

#include <complex>

#include "fracstab/errors.hpp"

namespace fracstab::specfun {

// Evaluation controls for the two-parameter Mittag-Leffler function
// E_{alpha,beta}(z).  The regime radii delimit where the power series and the
// large-|z| expansion are trusted on their own; between them both run and the
// smaller error estimate wins.
struct MLParams {
    double alpha = 0.5;
    double beta = 1.0;
    double series_r0 = 8.0;     // series preferred for |z| <= series_r0
    double asym_r1 = 15.0;      // asymptotics preferred for |z| >= asym_r1
    double sector_tol = 1e-3;   // angular guard band around |arg z| = alpha*pi/2
    int series_cap = 2000;      // term cap before NonConvergence
    long fallback_cap = 100000; // extended-precision fallback term cap
    double target_rel = 1e-12;  // requested relative accuracy where achievable
};

enum class MLRegime { Series, Asymptotic, Hybrid };

const char* to_string(MLRegime r);

struct EvalResult {
    std::complex<double> value;
    MLRegime regime;
    double est_abs_error; // honest bound: tail + roundoff/cancellation model
    int terms_used;
};

// Power series sum_k z^k / Gamma(alpha k + beta) with compensated summation.
// Stops when the geometric tail bound drops below tol relative to the partial
// sum.  est_abs_error includes the cancellation floor eps * max |partial sum|.
// Throws NonConvergence when the cap is hit or intermediate terms overflow.
EvalResult ml_series(double alpha, double beta, std::complex<double> z,
                     double tol = 1e-15, int cap = 2000);

// Large-|z| expansion truncated at p power terms.  The exponential term
// (1/alpha) z^{(1-beta)/alpha} exp(z^{1/alpha}) is added for
// |arg z| < alpha*pi/2; for alpha*pi/2 < |arg z| <= alpha*pi it decays but is
// not always negligible, so its magnitude is charged to est_abs_error there.
// Throws SectorBoundary when |arg z| falls within sector_tol of alpha*pi/2,
// where the branch split loses meaning.
EvalResult ml_asymptotic(double alpha, double beta, std::complex<double> z,
                         int p, double sector_tol = 1e-3);

// Regime-dispatched evaluation of E_{alpha,beta}(z).
//   |z| <= r0          series
//   |z| >= r1          asymptotics (adaptive truncation order)
//   r0 < |z| < r1      both, smaller est_abs_error wins (regime = Hybrid)
// A regime that fails or reports poor accuracy falls back to the other; the
// guard band around the sector boundary falls back to an extended-precision
// series.  Errors propagate only when no route produces a finite result.
EvalResult ml(double alpha, double beta, std::complex<double> z,
              const MLParams& params = MLParams{});

// Convenience wrappers used by the solvers.
std::complex<double> ml1(double alpha, std::complex<double> z); // E_alpha(z)
std::complex<double> ml2(double alpha, double beta, std::complex<double> z);

// phi1(alpha, x) = (E_alpha(x) - 1)/x           = E_{alpha,alpha+1}(x)
// phi2(alpha, x) = (E_{alpha,2}(x) - 1)/x       = E_{alpha,alpha+2}(x)
// Product-integration weights need these; evaluated by direct shifted series
// for small |x| to avoid the subtraction, via ml() beyond.
std::complex<double> ml_phi1(double alpha, std::complex<double> x);
std::complex<double> ml_phi2(double alpha, std::complex<double> x);

} // namespace fracstab::specfun
