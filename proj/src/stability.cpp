#include "fracstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracstab::stability {

namespace {

using C = std::complex<double>;
using linalg::DenseMatrix;

constexpr double kPi = 3.141592653589793238462643383279502884;

void validate_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw DomainError("alpha must lie in (0,1]");
}

void validate_tol(double tol) {
    if (!(tol > 0.0)) throw DomainError("angular tolerance must be > 0");
}

// signed sector margin of one eigenvalue; arg 0 counts as 0, so a zero
// eigenvalue lands at -alpha*pi/2 and can never look Stable
double margin_of(double alpha, C lambda) {
    const double half = alpha * kPi / 2.0;
    if (lambda == 0.0) return -half;
    return std::fabs(std::arg(lambda)) - half;
}

StabilityVerdict fold_eigenvalues(double alpha, const std::vector<C>& lams, double tol) {
    const double half = alpha * kPi / 2.0;
    StabilityVerdict v;
    v.sector_margin = std::numeric_limits<double>::infinity();
    bool any_zero = false, all_clear = true;
    for (C lam : lams) {
        v.sector_margin = std::min(v.sector_margin, margin_of(alpha, lam));
        if (lam == 0.0) {
            any_zero = true;
            continue;
        }
        const double m = std::fabs(std::arg(lam)) - half;
        if (m <= tol) all_clear = false;
        if (m < -tol && (!v.witness || lam.real() > v.witness->real())) v.witness = lam;
    }
    if (v.witness)
        v.status = Status::Unstable;
    else if (all_clear && !any_zero)
        v.status = Status::Stable;
    else
        v.status = Status::Marginal;
    if (v.status != Status::Unstable) v.witness.reset();
    return v;
}

} // namespace

const char* to_string(Status s) {
    switch (s) {
    case Status::Stable: return "stable";
    case Status::Unstable: return "unstable";
    case Status::Marginal: return "marginal";
    }
    return "unknown";
}

StabilityVerdict classify_scalar(double alpha, C lambda, double tol) {
    validate_alpha(alpha);
    validate_tol(tol);
    return fold_eigenvalues(alpha, {lambda}, tol);
}

StabilityVerdict classify_matrix(double alpha, const DenseMatrix& A, double tol) {
    validate_alpha(alpha);
    validate_tol(tol);
    return fold_eigenvalues(alpha, linalg::eig(A).eigenvalues, tol);
}

StabilityVerdict trace_det_classify(double alpha, double a, double b, double c, double d,
                                    double tol) {
    validate_alpha(alpha);
    validate_tol(tol);
    const double T = a + d;
    const double D = a * d - b * c;
    const double half = alpha * kPi / 2.0;
    const double disc = T * T - 4.0 * D;

    StabilityVerdict v;
    if (disc >= 0.0) {
        // real pair (T +- sqrt(disc))/2; classification by sign alone
        const double r = std::sqrt(disc);
        const double lp = 0.5 * (T + r), lm = 0.5 * (T - r);
        auto m = [&](double l) { return l == 0.0 ? -half : (l > 0.0 ? -half : kPi - half); };
        v.sector_margin = std::min(m(lp), m(lm));
        const bool pos = lp > 0.0 && -half < -tol; // a positive real root is in-sector
        if (pos) {
            v.status = Status::Unstable;
            v.witness = C(lp, 0.0);
        } else if (lp == 0.0 || lm == 0.0 || !(half > tol)) {
            v.status = Status::Marginal;
        } else {
            v.status = Status::Stable; // both roots strictly negative
        }
        return v;
    }

    // complex pair: |lambda| = sqrt(D), cos(|arg|) = T/(2 sqrt(D)); the
    // stability inequality T/(2 sqrt(D)) < cos(alpha*pi/2) is evaluated as an
    // angle so the tol band matches the sector test
    const double ratio = std::clamp(T / (2.0 * std::sqrt(D)), -1.0, 1.0);
    const double m = std::acos(ratio) - half;
    v.sector_margin = m;
    if (m > tol) {
        v.status = Status::Stable;
    } else if (m < -tol) {
        v.status = Status::Unstable;
        v.witness = C(0.5 * T, 0.5 * std::sqrt(-disc));
    } else {
        v.status = Status::Marginal;
    }
    return v;
}

DenseMatrix mode_matrix(const RDSpec& spec, double mu) {
    if (!(mu >= 0.0)) throw DomainError("mode_matrix: mu must be >= 0");
    if ((int)spec.D.size() != spec.A.n) throw DomainError("mode_matrix: D dimension mismatch");
    for (double di : spec.D)
        if (!(di > 0.0)) throw DomainError("mode_matrix: diffusion coefficients must be > 0");
    DenseMatrix M = spec.A;
    for (int i = 0; i < M.n; ++i) M(i, i) -= spec.D[i] * mu;
    return M;
}

RDSpectrumReport rd_spectrum(const RDSpec& spec, const std::vector<double>& mus, double tol) {
    validate_alpha(spec.alpha);
    validate_tol(tol);
    for (std::size_t i = 0; i < mus.size(); ++i) {
        if (!(mus[i] >= 0.0)) throw DomainError("rd_spectrum: mus must be nonnegative");
        if (i > 0 && mus[i] < mus[i - 1]) throw DomainError("rd_spectrum: mus must be nondecreasing");
    }
    const double anorm = linalg::norm2(spec.A);
    const double dmin = *std::min_element(spec.D.begin(), spec.D.end());

    RDSpectrumReport rep;
    rep.k0_bound = (int)mus.size();
    rep.overall.sector_margin = std::numeric_limits<double>::infinity();
    bool any_marginal = false;
    for (std::size_t k = 0; k < mus.size(); ++k) {
        StabilityVerdict mv = classify_matrix(spec.alpha, mode_matrix(spec, mus[k]), tol);
        if (rep.k0_bound == (int)mus.size() && mus[k] * dmin - anorm > 0.0)
            rep.k0_bound = (int)k;
        rep.overall.sector_margin = std::min(rep.overall.sector_margin, mv.sector_margin);
        if (mv.status == Status::Unstable) {
            if (!rep.overall.witness || mv.witness->real() > rep.overall.witness->real())
                rep.overall.witness = mv.witness;
        } else if (mv.status == Status::Marginal) {
            any_marginal = true;
        } else if (mv.sector_margin > tol && mv.sector_margin < kPi / 2.0 - spec.alpha * kPi / 2.0) {
            // stable strictly because of the fractional sector: some
            // eigenvalue has Re > 0 yet |arg| > alpha*pi/2
            rep.fractional_sector_note = true;
        }
        rep.modes.push_back(std::move(mv));
    }
    if (rep.overall.witness)
        rep.overall.status = Status::Unstable;
    else if (any_marginal)
        rep.overall.status = Status::Marginal;
    else
        rep.overall.status = Status::Stable;
    return rep;
}

TuringReport turing_scan(double alpha, double a, double b, double c, double d, double D1,
                         double D2, double mu_max) {
    validate_alpha(alpha);
    if (!(D1 > 0.0) || !(D2 > 0.0)) throw DomainError("turing_scan: D1, D2 must be > 0");
    if (!(mu_max > 0.0)) throw DomainError("turing_scan: mu_max must be > 0");

    TuringReport rep;
    rep.homogeneous_verdict = trace_det_classify(alpha, a, b, c, d);
    if (rep.homogeneous_verdict.status != Status::Stable) return rep;

    const double Dt = a * d - b * c;
    const double s = D1 * d + D2 * a; // -d/dmu of the determinant parabola at 0
    const double disc = s * s - 4.0 * D1 * D2 * Dt;
    if (s > 0.0 && disc > 0.0) {
        const double r = std::sqrt(disc);
        const double lo = (s - r) / (2.0 * D1 * D2);
        const double hi = (s + r) / (2.0 * D1 * D2);
        const double clo = std::max(lo, 0.0), chi = std::min(hi, mu_max);
        if (clo < chi) {
            rep.unstable_mode_window = std::make_pair(clo, chi);
            // integer mode ladder mu_k = k^2 (Neumann interval of length pi)
            for (int k = 1; double(k) * k <= mu_max; ++k) {
                const double mu = double(k) * k;
                if (mu <= lo || mu >= hi) continue;
                StabilityVerdict mv =
                    trace_det_classify(alpha, a - D1 * mu, b, c, d - D2 * mu);
                if (mv.status == Status::Unstable)
                    rep.witnessing_modes.push_back({k, mu, *mv.witness});
            }
        }
    }

    // deferred diagnostic: complex pair with T_k >= 0 escaping the sector;
    // only possible below the trace zero-crossing
    const double T = a + d;
    if (T > 0.0) {
        const double mu_top = std::min(mu_max, T / (D1 + D2));
        const int n = 2048;
        const double cth = std::cos(alpha * kPi / 2.0);
        for (int i = 0; i <= n; ++i) {
            const double mu = mu_top * i / n;
            const double Tk = T - mu * (D1 + D2);
            const double Dk = Dt - mu * s + D1 * D2 * mu * mu;
            if (Dk <= 0.0 || Tk < 0.0) continue;
            // ratio >= 1 means a real positive pair; either way the T_k >= 0
            // analysis was postponed by the theory, so only flag it
            if (Tk / (2.0 * std::sqrt(Dk)) > cth) {
                rep.deferred_case_flag = true;
                break;
            }
        }
    }
    return rep;
}

double critical_D1(double alpha, double a, double b, double c, double d, double D2, double lo,
                   double hi) {
    validate_alpha(alpha);
    if (!(D2 > 0.0)) throw DomainError("critical_D1: D2 must be > 0");
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("critical_D1: need 0 < lo < hi");
    if (trace_det_classify(alpha, a, b, c, d).status != Status::Stable)
        throw DomainError("critical_D1: homogeneous matrix must be Stable");
    if (a <= 0.0)
        throw NoBracket("critical_D1: requires a > 0 (self-activation drives the window)");

    const double Dt = a * d - b * c;
    auto window_exists = [&](double D1) {
        const double s = D1 * d + D2 * a;
        return s > 0.0 && s * s - 4.0 * D1 * D2 * Dt > 0.0;
    };
    bool flo = window_exists(lo), fhi = window_exists(hi);
    if (flo == fhi)
        throw NoBracket("critical_D1: window-existence predicate has constant sign on bracket");
    while ((hi - lo) > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (window_exists(mid) == flo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double sturm_liouville_max_eig(const std::function<double(double)>& q, double L, int N) {
    if (!q) throw DomainError("sturm_liouville_max_eig: q must be callable");
    if (!(L > 0.0)) throw DomainError("sturm_liouville_max_eig: L must be > 0");
    if (N < 16) throw DomainError("sturm_liouville_max_eig: N must be >= 16");

    // ghost-point Neumann closure gives row 0 the stencil (2u_1 - 2u_0)/h^2;
    // the diag(1/2,1,...,1,1/2) weighting symmetrizes it with corner
    // off-diagonals sqrt(2)/h^2 and identical spectrum
    const int n = N + 1;
    const double h = L / N;
    const double ih2 = 1.0 / (h * h);
    std::vector<double> diag(n), off(n - 1, ih2);
    for (int i = 0; i < n; ++i) diag[i] = -2.0 * ih2 + q(i * h);
    off[0] = off[n - 2] = std::sqrt(2.0) * ih2;

    // Sturm count: number of eigenvalues strictly below x
    auto count_below = [&](double x) {
        int cnt = 0;
        double p = diag[0] - x;
        if (p < 0.0) ++cnt;
        for (int i = 1; i < n; ++i) {
            double denom = p;
            if (std::fabs(denom) < 1e-300) denom = denom < 0.0 ? -1e-300 : 1e-300;
            p = diag[i] - x - off[i - 1] * off[i - 1] / denom;
            if (p < 0.0) ++cnt;
        }
        return cnt;
    };

    double lo = diag[0], hi = diag[0];
    for (int i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::fabs(off[i - 1]) : 0.0) + (i < n - 1 ? std::fabs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    // tolerance tracks the shrinking interval, not the Gershgorin scale: the
    // target eigenvalue is O(max q), far below the O(N^2) stiffness bound
    while (hi - lo > 1e-12 * std::max(1.0, std::fabs(lo) + std::fabs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) == n)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace fracstab::stability
