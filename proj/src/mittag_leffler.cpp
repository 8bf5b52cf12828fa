#include "fracstab/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fracstab/gammafun.hpp"

namespace fracstab::specfun {

namespace {

using C = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

void validate(double alpha, double beta) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw DomainError("mittag-leffler: alpha must lie in (0,1]");
    if (!(beta > 0.0))
        throw DomainError("mittag-leffler: beta must be positive");
}

// ---------------------------------------------------------------------------
// series core (templated so the sector-boundary fallback can run long double)
// ---------------------------------------------------------------------------

struct SeriesOut {
    C value{};
    double est = std::numeric_limits<double>::infinity();
    int terms = 0;
    int status = 0; // 0 ok, 1 cap hit, 2 term overflow
};

template <typename Real>
SeriesOut series_core(double alpha, double beta, C z, double tol, long cap) {
    using CR = std::complex<Real>;
    const Real eps = std::numeric_limits<Real>::epsilon();
    SeriesOut out;

    const double az = std::abs(z);
    if (az == 0.0) {
        out.value = C(rgamma(beta), 0.0);
        out.est = 0.0;
        out.terms = 1;
        return out;
    }
    const double logaz = std::log(az);
    const double theta = std::arg(z);

    // exponent limits of Real, so the long double instantiation is not
    // clamped to double's range
    const bool wide = sizeof(Real) > sizeof(double);
    const double max_exp = wide ? 11300.0 : 706.0;
    const double min_exp = wide ? -11350.0 : -745.0;
    const double direct_xlim = wide ? 1700.0 : 170.0;

    CR sum(0, 0), comp(0, 0); // Kahan accumulator + compensation
    CR zr((Real)z.real(), (Real)z.imag());
    CR zpow(1, 0);
    Real sum_abs = 0;  // sum of |term|: compensated-summation error scale
    Real cons_err = 0; // accumulated term-construction error bound
    Real prev_mag = -1;
    bool direct = true;

    for (long k = 0; k <= cap; ++k) {
        const double x = alpha * (double)k + beta;
        const double lg = std::lgamma(x);
        const double logmag = (double)k * logaz - lg;
        if (logmag > max_exp) {
            out.status = 2; // series needs terms beyond the Real range
            out.terms = (int)k;
            return out;
        }
        if (direct && ((double)(k + 1) * logaz > max_exp - 6.0 || x > direct_xlim))
            direct = false;

        // the Gamma argument alpha*k + beta carries the rounding of its own
        // construction; the term responds with relative error ~ |psi(x)|*dx,
        // bounded by (1 + x log(x+2)) eps units
        const double arg_sens = 2.0 * (1.0 + x * std::log(x + 2.0));

        CR term;
        Real cons_rel; // relative construction error bound for this term
        if (direct) {
            // evaluate the argument in Real so the wide pass is not pinned to
            // double's argument rounding
            const Real xr = (Real)alpha * (Real)k + (Real)beta;
            Real rg = wide ? (Real)detail::rgamma_ld((long double)xr)
                           : (Real)rgamma((double)xr);
            term = zpow * rg;
            zpow *= zr;
            // k rounding steps multiply into z^k, plus the argument charge
            cons_rel = ((Real)k + 6 + (Real)arg_sens) * eps;
        } else {
            if (logmag < min_exp) {
                term = CR(0, 0);
                cons_rel = 0;
            } else {
                const double ang = (double)k * theta;
                const Real mag = std::exp((Real)logmag);
                term = CR(mag * (Real)std::cos(ang), mag * (Real)std::sin(ang));
                // exp(k log|z| - lgamma) amplifies the absolute rounding of
                // both logs; the phase k*theta carries its own reduction
                // error.  The logs themselves are double precision, so this
                // route is double-accurate even when Real is wider.
                const double f = std::fabs((double)k * logaz) + std::fabs(lg) +
                                 std::fabs(ang) + arg_sens + 8.0;
                cons_rel = (Real)(f * std::numeric_limits<double>::epsilon());
            }
        }

        // Kahan step
        CR y = term - comp;
        CR t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        const Real tm = std::abs(term);
        const Real sm = std::abs(sum);
        sum_abs += tm;
        cons_err += tm * cons_rel;
        out.terms = (int)k + 1;

        // compensated summation: first-order error 2 eps sum|t| (3 covers the
        // complex components), plus the coherent construction errors
        const Real noise = eps * 3 * sum_abs + cons_err;

        // geometric tail bound once the terms decay (|t_{k+1}|/|t_k| =
        // |z|/(Gamma(x+alpha)/Gamma(x)) decreases in k, so the bound is valid)
        if (k >= 1 && tm > 0 && prev_mag > 0 && tm < prev_mag) {
            const Real ratio = tm / prev_mag;
            const Real tail = tm * ratio / (Real)(1.0 - (double)ratio);
            if (tail <= (Real)(0.25 * tol) * sm || tail <= (Real)0.25 * noise) {
                out.value = C((double)sum.real(), (double)sum.imag());
                out.est = (double)(tail + noise);
                return out;
            }
        }
        if (k >= 2 && tm == 0 && prev_mag == 0) {
            // two consecutive zero terms: magnitudes fell below double range
            // (beta > 0 keeps Gamma(alpha k + beta) off the poles)
            out.value = C((double)sum.real(), (double)sum.imag());
            out.est = (double)noise;
            return out;
        }
        prev_mag = tm;
    }
    out.status = 1;
    return out;
}

// ---------------------------------------------------------------------------
// asymptotic core
// ---------------------------------------------------------------------------

// Power-sum terms z^{-k} / Gamma(beta - alpha k), k = 1..p, plus the
// exponential contribution for |arg z| <= alpha*pi.
struct AsymOut {
    C value{};
    double est = std::numeric_limits<double>::infinity();
    int p = 0;
};

struct ExpPart {
    C value{};
    double rel = 0.0; // construction rounding, in units of eps
};

ExpPart exp_part(double alpha, double beta, C z) {
    ExpPart out;
    const C lz = std::log(z); // principal branch, arg in (-pi, pi]
    const C w = std::exp(lz / alpha);
    const C logpref = lz * ((1.0 - beta) / alpha);
    const double re_total = w.real() + logpref.real() - std::log(alpha);
    const double im_total = w.imag() + logpref.imag();
    // w itself is rounded to ~|w|(|lz|/alpha + 4) eps, and exp turns absolute
    // exponent error into relative value error, so the charge scales with |w|
    out.rel = std::abs(w) * (std::abs(lz) / alpha + 4.0) + std::abs(logpref) +
              std::fabs(re_total) + std::fabs(im_total) + 8.0;
    if (re_total > 709.0) {
        // the honest double answer is an infinity along the phase direction;
        // assembling it per component avoids the inf*0 NaN of a complex product
        const double cr = std::cos(im_total), si = std::sin(im_total);
        const double inf = std::numeric_limits<double>::infinity();
        out.value = C(cr == 0.0 ? 0.0 : std::copysign(inf, cr),
                      si == 0.0 ? 0.0 : std::copysign(inf, si));
        return out;
    }
    out.value = std::exp(C(re_total, im_total));
    return out;
}

// log of the sin-stripped envelope |z|^{-k} Gamma(1-x)/pi >= |z^{-k}/Gamma(x)|
// for x < 0.5.  Near the Gamma poles the true coefficient collapses to ~0,
// but the expansion remainder is governed by this envelope, not by one
// accidentally tiny term, so truncation decisions and error charges use it.
double env_log_mag(double log_azinv, int k, double x) {
    if (x >= 0.5) return (double)k * log_azinv - std::lgamma(x);
    return (double)k * log_azinv + std::lgamma(1.0 - x) - std::log(kPi);
}

// magnitude of the exponential contribution, via logs so nothing overflows
// until the final exp (which then reports +inf honestly)
double exp_part_mag(double alpha, double beta, C z) {
    const C lz = std::log(z);
    const double re_w = std::real(std::exp(lz / alpha));
    return std::exp(re_w + ((1.0 - beta) / alpha) * lz.real() - std::log(alpha));
}

// Two-branch expansion: the exponential term enters only inside the sector
// |arg z| < alpha*pi/2.  Between alpha*pi/2 and alpha*pi the dropped
// exponential is still above the optimal-truncation floor, so its magnitude
// is charged to est rather than silently ignored.
AsymOut asym_fixed(double alpha, double beta, C z, int p) {
    const double eps = std::numeric_limits<double>::epsilon();
    AsymOut out;
    const C zinv = 1.0 / z;
    const double log_azinv = -std::log(std::abs(z));
    C zp(1, 0);
    C psum(0, 0);
    double round_acc = 0.0; // plain-sum and z^-k construction rounding scale
    int used = 0;
    bool in_range = true;
    for (int k = 1; k <= p; ++k) {
        const double x = beta - alpha * k;
        // beyond x ~ -170 the reflected 1/Gamma leaves double range
        if (x < -170.0) { in_range = false; break; }
        zp *= zinv;
        const C term = zp * rgamma(x);
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) {
            in_range = false;
            break;
        }
        psum += term;
        round_acc += std::abs(psum) + (double)k * std::abs(term);
        used = k;
    }
    out.value = -psum;
    out.p = used;
    if (in_range) {
        // The remainder near the optimal truncation point is not captured by
        // the first omitted term alone: neighboring terms have ratio ~ 1 and
        // several of them contribute.  Sum an omitted block of eight
        // envelopes, then close with a geometric tail when the block decays.
        double block = 0.0, tj = 0.0, tprev = 0.0;
        for (int j = 1; j <= 8; ++j) {
            tprev = tj;
            tj = std::exp(env_log_mag(log_azinv, p + j, beta - alpha * (p + j)));
            block += tj;
        }
        if (tj > 0.0 && tprev > 0.0 && tj < tprev)
            block += tj * (tj / tprev) / (1.0 - tj / tprev);
        out.est = block;
    } // else: requested order exceeds double range; est stays +inf
    out.est += eps * round_acc;
    const double aarg = std::fabs(std::arg(z));
    if (aarg < alpha * kPi / 2.0) {
        const ExpPart e = exp_part(alpha, beta, z);
        out.value += e.value;
        out.est += e.rel * eps * std::abs(e.value);
    } else if (aarg <= alpha * kPi) {
        out.est += exp_part_mag(alpha, beta, z);
    }
    out.est += 4 * eps * std::abs(out.value);
    return out;
}

// Optimal truncation: scan terms, cut at the smallest envelope.  Term
// magnitudes dip spuriously next to the Gamma poles (x within rounding of a
// negative integer leaves a ~1e-16 coefficient), so both the cut position
// and the stopping rule go through the envelope instead.
AsymOut asym_adaptive(double alpha, double beta, C z) {
    const double eps = std::numeric_limits<double>::epsilon();
    const C zinv = 1.0 / z;
    const double log_azinv = -std::log(std::abs(z));
    C zp(1, 0);
    C psum(0, 0);
    std::vector<C> sums;
    std::vector<double> envs;
    sums.reserve(64);
    envs.reserve(64);
    double minenv = std::numeric_limits<double>::infinity();
    double round_acc = 0.0; // plain-sum and z^-k construction rounding scale
    int negligible = 0;
    int zero_run = 0;
    // the x > -170 guard bounds the scan at (170+beta)/alpha terms; the cap
    // only backstops tiny alpha
    for (int k = 1; k <= 1000; ++k) {
        const double x = beta - alpha * k;
        if (x < -170.0) break; // reflected 1/Gamma leaves double range
        zp *= zinv;
        const C term = zp * rgamma(x);
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) break;
        psum += term;
        round_acc += std::abs(psum) + (double)k * std::abs(term);
        sums.push_back(psum);
        const double env = std::exp(env_log_mag(log_azinv, k, x));
        envs.push_back(env);
        if (std::abs(term) == 0.0) {
            // alpha = 1 with integer beta pins every remaining coefficient on a
            // Gamma pole; a long run of exact zeros means nothing more is coming
            if (++zero_run >= 8) break;
        } else {
            zero_run = 0;
        }
        if (env < minenv) minenv = env;
        if (env > 1e4 * minenv) break; // well past the optimum
        if (env < 2 * eps * std::abs(psum)) {
            if (++negligible >= 2) break; // remainder below roundoff already
        } else {
            negligible = 0;
        }
        if (env < 1e-320) break;
    }
    AsymOut out;
    if (sums.empty()) {
        out.value = C(0, 0);
        out.est = std::exp(env_log_mag(log_azinv, 1, beta - alpha));
        out.p = 0;
    } else {
        std::size_t best = 0;
        for (std::size_t i = 1; i < envs.size(); ++i)
            if (envs[i] < envs[best]) best = i;
        out.value = -sums[best];
        out.p = (int)best + 1;
        if (zero_run >= 8 && alpha == 1.0 && beta == std::floor(beta)) {
            out.est = 0.0; // power tail terminated exactly on the pole train
        } else {
            // remainder charge: block of eight envelopes past the cut, with a
            // geometric closure when the block decays (same rule as the
            // fixed-order expansion)
            double block = 0.0, tj = 0.0, tprev = 0.0;
            for (int j = 1; j <= 8; ++j) {
                const int kk = (int)best + 1 + j;
                tprev = tj;
                tj = std::exp(env_log_mag(log_azinv, kk, beta - alpha * kk));
                block += tj;
            }
            if (tj > 0.0 && tprev > 0.0 && tj < tprev)
                block += tj * (tj / tprev) / (1.0 - tj / tprev);
            out.est = block;
        }
    }
    out.est += eps * round_acc;
    if (std::fabs(std::arg(z)) <= alpha * kPi) {
        const ExpPart e = exp_part(alpha, beta, z);
        out.value += e.value;
        out.est += e.rel * eps * std::abs(e.value);
    }
    out.est += 4 * eps * std::abs(out.value);
    return out;
}

bool near_sector_boundary(double alpha, C z, double tol) {
    return std::fabs(std::fabs(std::arg(z)) - alpha * kPi / 2.0) < tol;
}

EvalResult finish(C v, MLRegime r, double est, int terms) {
    est = std::max(est, 4 * std::numeric_limits<double>::epsilon() * std::abs(v));
    return EvalResult{v, r, est, terms};
}

} // namespace

const char* to_string(MLRegime r) {
    switch (r) {
        case MLRegime::Series: return "series";
        case MLRegime::Asymptotic: return "asymptotic";
        case MLRegime::Hybrid: return "hybrid";
    }
    return "?";
}

EvalResult ml_series(double alpha, double beta, C z, double tol, int cap) {
    validate(alpha, beta);
    SeriesOut s = series_core<double>(alpha, beta, z, tol, cap);
    if (s.status == 1)
        throw NonConvergence("ml_series: term cap reached before tail bound (|z| too large for series regime)");
    if (s.status == 2)
        throw NonConvergence("ml_series: intermediate terms overflow double range");
    return finish(s.value, MLRegime::Series, s.est, s.terms);
}

EvalResult ml_asymptotic(double alpha, double beta, C z, int p, double sector_tol) {
    validate(alpha, beta);
    if (std::abs(z) == 0.0)
        throw DomainError("ml_asymptotic: z must be nonzero");
    if (p < 1) throw DomainError("ml_asymptotic: p must be >= 1");
    if (near_sector_boundary(alpha, z, sector_tol))
        throw SectorBoundary("ml_asymptotic: |arg z| within angular tolerance of alpha*pi/2");
    AsymOut a = asym_fixed(alpha, beta, z, p);
    return finish(a.value, MLRegime::Asymptotic, a.est, a.p);
}

EvalResult ml(double alpha, double beta, C z, const MLParams& params) {
    validate(alpha, beta);
    const double eps = std::numeric_limits<double>::epsilon();

    const double az = std::abs(z);
    if (az == 0.0) return finish(C(rgamma(beta), 0.0), MLRegime::Series, 0.0, 1);
    if (alpha == 1.0 && beta == 1.0)
        return finish(std::exp(z), MLRegime::Series, 4 * eps * std::abs(std::exp(z)), 0);

    const bool boundary = near_sector_boundary(alpha, z, params.sector_tol);

    SeriesOut s;
    bool series_ran = false, series_ok = false;
    AsymOut a;
    bool asym_ran = false;

    auto run_series = [&] {
        if (series_ran) return;
        series_ran = true;
        s = series_core<double>(alpha, beta, z, params.target_rel, params.series_cap);
        series_ok = (s.status == 0) && std::isfinite(s.est);
    };
    // The internal expansion keeps the exponential term through |arg z| <=
    // alpha*pi, so it stays uniformly valid across the alpha*pi/2 band that
    // the public two-branch ml_asymptotic must refuse.
    auto run_asym = [&] {
        if (asym_ran) return;
        asym_ran = true;
        a = asym_adaptive(alpha, beta, z);
    };
    auto good = [&](double est, C v) {
        return est <= params.target_rel * std::abs(v) && std::isfinite(v.real()) &&
               std::isfinite(v.imag());
    };

    if (az <= params.series_r0) {
        run_series();
        if (series_ok && good(s.est, s.value))
            return finish(s.value, MLRegime::Series, s.est, s.terms);
        run_asym(); // rescue: series noisy or failed at this |z|
    } else if (az >= params.asym_r1) {
        run_asym();
        if (good(a.est, a.value))
            return finish(a.value, MLRegime::Asymptotic, a.est, a.p);
        run_series(); // rarely useful here, but honest
    } else {
        run_series();
        run_asym();
    }

    bool asym_usable = asym_ran && std::isfinite(a.est) &&
                       std::isfinite(a.value.real()) && std::isfinite(a.value.imag());

    // Neither regime resolved the value to target: cancellation inflates the
    // series est, and for the power tail |z| is pre-asymptotic (or the sector
    // boundary makes its exponential term ambiguous).  Spend the extended-
    // precision series budget before conceding; its noise floor sits about
    // three orders below double's.
    if (!(series_ok && good(s.est, s.value)) && !good(a.est, a.value)) {
        SeriesOut ld = series_core<long double>(alpha, beta, z, params.target_rel,
                                                params.fallback_cap);
        if (ld.status == 0 && std::isfinite(ld.est) && (!series_ok || ld.est < s.est)) {
            s = ld;
            series_ran = series_ok = true;
        }
    }

    if (series_ok && asym_usable) {
        if (s.est <= a.est) return finish(s.value, MLRegime::Hybrid, s.est, s.terms);
        return finish(a.value, MLRegime::Hybrid, a.est, a.p);
    }
    if (series_ok) return finish(s.value, MLRegime::Series, s.est, s.terms);
    if (asym_ran) {
        // report even a non-finite asymptotic value: overflow is honest here
        return finish(a.value, MLRegime::Asymptotic, a.est, a.p);
    }
    if (boundary)
        throw SectorBoundary("ml: |arg z| within tolerance of alpha*pi/2 and no regime resolved the value");
    throw NonConvergence("ml: no evaluation regime succeeded");
}

std::complex<double> ml1(double alpha, C z) { return ml(alpha, 1.0, z).value; }

std::complex<double> ml2(double alpha, double beta, C z) {
    return ml(alpha, beta, z).value;
}

namespace {

// shifted series sum_j x^j / Gamma(alpha j + shift), for |x| small
C shifted_series(double alpha, double shift, C x) {
    C sum(0, 0), xp(1, 0);
    for (int j = 0; j < 300; ++j) {
        const C term = xp * rgamma(alpha * j + shift);
        sum += term;
        if (j > 2 && std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
        xp *= x;
    }
    return sum;
}

} // namespace

C ml_phi1(double alpha, C x) {
    if (std::abs(x) <= 2.0) return shifted_series(alpha, alpha + 1.0, x);
    return (ml(alpha, 1.0, x).value - 1.0) / x;
}

C ml_phi2(double alpha, C x) {
    if (std::abs(x) <= 2.0) return shifted_series(alpha, alpha + 2.0, x);
    return (ml(alpha, 2.0, x).value - 1.0) / x;
}

} // namespace fracstab::specfun
