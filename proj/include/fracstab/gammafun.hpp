#pragma once

// Real gamma utilities built around the reciprocal 1/Gamma(x).  The series
// and asymptotic expansions downstream divide by Gamma at arguments that walk
// through the poles 0, -1, -2, ...; computing the reciprocal directly turns
// those poles into exact zeros instead of inf/NaN noise.

namespace fracstab::specfun {

// sin(pi*x) with argument reduction done in exact arithmetic, so results near
// integer x keep full relative accuracy (plain std::sin(M_PI*x) does not).
double sinpi(double x);

// 1/Gamma(x) for real x.  Exactly 0.0 at x = 0, -1, -2, ... and for x large
// enough that Gamma overflows.  Relative accuracy ~1e-14 elsewhere.
double rgamma(double x);

// Gamma(x) for real x, poles mapped to +/-inf.
double gamma_real(double x);

namespace detail {

// Extended-precision variants used by the cancellation-prone series.
long double sinpi_ld(long double x);
long double rgamma_ld(long double x);

} // namespace detail

} // namespace fracstab::specfun
