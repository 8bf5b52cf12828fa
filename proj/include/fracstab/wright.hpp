#pragma once

#include "fracstab/errors.hpp"

namespace fracstab::specfun {

struct WrightParams {
    double alpha = 0.5;
    int truncation_terms = 4000; // series cap before NonConvergence
};

// Wright-type subordination density
//   Psi_alpha(s) = sum_{n>=0} (-s)^n / (n! Gamma(-alpha n + 1 - alpha)),
// the probability density on [0, inf) with integral 1 that subordinates the
// fractional resolvents to the classical semigroup.  The n = 0 base term is
// part of the sum: Psi_alpha(0) = 1/Gamma(1-alpha) > 0.
//
// The alternating series is summed with compensated arithmetic and a running
// cancellation bound eps * max |partial sum|.  Once that bound swallows the
// value (superexponentially small true values at large s), the function
// returns exactly 0 rather than noise, which keeps Psi_alpha >= 0 and keeps
// tail quadratures clean.  alpha = 1 is the degenerate limit: a unit point
// mass at s = 1, reported as density 0 everywhere.
double wright_psi(double alpha, double s, const WrightParams& params = WrightParams{});

} // namespace fracstab::specfun
