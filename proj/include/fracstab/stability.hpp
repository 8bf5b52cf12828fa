#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fracstab/errors.hpp"
#include "fracstab/linalg.hpp"

namespace fracstab::stability {

enum class Status { Stable, Unstable, Marginal };

const char* to_string(Status s);

// Sector-test outcome.  sector_margin is the signed distance
// min_lambda (|arg lambda| - alpha*pi/2); a zero eigenvalue contributes
// -alpha*pi/2 and always blocks the Stable verdict.  witness is set for
// Unstable only: the in-sector eigenvalue of maximal real part.
struct StabilityVerdict {
    Status status = Status::Marginal;
    std::optional<std::complex<double>> witness;
    double sector_margin = 0.0;
};

// Linearized reaction-diffusion problem: Jacobian A at the equilibrium plus
// one positive diffusion coefficient per component.
struct RDSpec {
    linalg::DenseMatrix A;
    std::vector<double> D;
    double alpha = 1.0;
};

struct ModeWitness {
    int k = 0;
    double mu = 0.0;
    std::complex<double> lambda;
};

struct TuringReport {
    StabilityVerdict homogeneous_verdict;
    // Laplacian-eigenvalue interval where the determinant parabola is
    // negative, clipped to [0, mu_max]; absent when no diffusion-driven
    // instability exists in range.
    std::optional<std::pair<double, double>> unstable_mode_window;
    // integer modes mu_k = k^2 (Neumann interval of length pi) falling inside
    // the window, each with its unstable eigenvalue
    std::vector<ModeWitness> witnessing_modes;
    // a complex-pair mode with T_k >= 0 would leave the stability sector: the
    // case the underlying theory postpones; diagnostic only, never a verdict
    bool deferred_case_flag = false;
};

struct RDSpectrumReport {
    std::vector<StabilityVerdict> modes; // one per scanned mu
    // first index whose mu satisfies mu*min(D) > ||A||_2; from there on every
    // eigenvalue has Re lambda <= ||A|| - mu*min(D) < 0, so a scan over an
    // unbounded mode ladder may stop (mus.size() when not reached in range)
    int k0_bound = 0;
    StabilityVerdict overall;
    // set when the Stable verdict leans on the fractional sector admitting
    // eigenvalues with positive real part; matrix-case theory covers this,
    // general operators are conjectural
    bool fractional_sector_note = false;
};

// Scalar sector test: Stable iff lambda != 0 and |arg lambda| > alpha*pi/2 + tol,
// Unstable iff lambda != 0 and |arg lambda| < alpha*pi/2 - tol, else Marginal.
StabilityVerdict classify_scalar(double alpha, std::complex<double> lambda, double tol = 1e-9);

// Folds classify_scalar over the spectrum of A.
StabilityVerdict classify_matrix(double alpha, const linalg::DenseMatrix& A, double tol = 1e-9);

// Algebraic 2x2 characterization from trace T and determinant D, no
// eigensolver: Stable iff D > 0 and (T < 0, or T >= 0 with 4D > T^2 and
// T/(2 sqrt(D)) < cos(alpha*pi/2)); Unstable iff a nonzero closed-form
// eigenvalue lies strictly inside the sector; Marginal on boundary and zero
// cases (same tol band as the sector test).
StabilityVerdict trace_det_classify(double alpha, double a, double b, double c, double d,
                                    double tol = 1e-9);

// A_{D,mu} = A - mu * diag(D): the mode matrix at Laplacian eigenvalue mu.
linalg::DenseMatrix mode_matrix(const RDSpec& spec, double mu);

// Classifies every listed mode and folds the verdicts; mus must be
// nonnegative and nondecreasing.
RDSpectrumReport rd_spectrum(const RDSpec& spec, const std::vector<double>& mus,
                             double tol = 1e-9);

// Diffusion-driven instability scan for the 2x2 system with diffusions
// D1, D2.  Requires the homogeneous matrix to pass trace_det_classify as
// Stable (otherwise the report carries only that verdict).  The window is
// where D_k(mu) = D - mu(D1 d + D2 a) + D1 D2 mu^2 goes negative.
TuringReport turing_scan(double alpha, double a, double b, double c, double d, double D1,
                         double D2, double mu_max);

// Bisection on D1 for the boundary of "turing_scan reports a window", to
// relative tolerance 1e-6.  Throws NoBracket when the window-existence
// predicate has constant sign over [lo, hi] (in particular whenever a <= 0).
double critical_D1(double alpha, double a, double b, double c, double d, double D2, double lo,
                   double hi);

// Largest eigenvalue of u'' + q(x) u on [0, L] with Neumann conditions:
// second-order central differences with ghost-point closure, symmetrized,
// then Sturm-sequence bisection on the tridiagonal matrix.
double sturm_liouville_max_eig(const std::function<double(double)>& q, double L, int N);

} // namespace fracstab::stability
