#pragma once

#include <functional>
#include <vector>

#include "fracstab/errors.hpp"

namespace fracstab::quad {

struct Rule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule of order n (computed once per n, cached).
const Rule& gauss_legendre(int n);

// Fixed-panel composite Gauss-Legendre on [a, b].
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 32);

// Adaptive bisection with a GL16/GL32 error estimate per panel.
// Throws QuadratureFailure if the tolerance cannot be met within max_depth.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 28);

} // namespace fracstab::quad
