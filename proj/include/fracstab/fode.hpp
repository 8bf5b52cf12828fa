#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fracstab/errors.hpp"
#include "fracstab/linalg.hpp"

namespace fracstab::fode {

enum class Spacing { Uniform, Graded };

// Node layout for one trajectory.  Graded grids t_j = t_end (j/steps)^gamma
// cluster at 0 to resolve the t^alpha initial layer; gamma = 2/alpha is the
// usual choice there.
struct TimeGrid {
    double t_end = 1.0;
    int steps = 100;
    Spacing spacing = Spacing::Uniform;
    double gamma = 1.0; // grading exponent, >= 1; ignored for Uniform

    static TimeGrid uniform(double t_end, int steps);
    static TimeGrid graded(double t_end, int steps, double gamma);

    // steps+1 strictly increasing nodes starting at t_0 = 0
    std::vector<double> nodes() const;
    void validate() const;
};

enum class Scheme { Duhamel, PECE, ModeResolvent };

const char* to_string(Spacing s);
const char* to_string(Scheme s);

// Vector-valued solution samples.  When a blow-up ceiling fires, states holds
// only the prefix computed before detection and truncated is set; otherwise
// states.size() == grid.steps + 1.
struct Trajectory {
    TimeGrid grid;
    std::vector<std::vector<double>> states;
    double alpha = 1.0;
    Scheme scheme = Scheme::Duhamel;
    bool truncated = false;
};

// Scalar complex variant used by the Duhamel formula (lambda may be complex).
struct ScalarTrajectory {
    TimeGrid grid;
    std::vector<std::complex<double>> states;
    double alpha = 1.0;
    Scheme scheme = Scheme::Duhamel;
};

struct LinearFDE {
    linalg::DenseMatrix A;
    double alpha = 1.0;
    // optional forcing f(t); empty function means f = 0
    std::function<std::vector<double>(double)> forcing;
};

// u(t) = E_alpha(lambda t^alpha) u0
//      + int_0^t (t-s)^{alpha-1} E_{alpha,alpha}(lambda (t-s)^alpha) f(s) ds.
// The convolution uses product integration: f is interpolated linearly on
// each panel and the singular kernel is integrated exactly through the
// closed-form antiderivatives x^alpha E_{alpha,alpha+1}(lambda x^alpha) and
// x^{alpha+1}(E_{alpha,alpha+1} - E_{alpha,alpha+2})(lambda x^alpha).
// An empty f means the homogeneous problem.
ScalarTrajectory scalar_duhamel(double alpha, std::complex<double> lambda,
                                std::complex<double> u0,
                                const std::function<std::complex<double>(double)>& f,
                                const TimeGrid& grid);

// S_alpha(t) = E_alpha(t^alpha A) and P_alpha(t) = E_{alpha,alpha}(t^alpha A).
// Diagonalizable A goes through the spectral formula; near-defective A falls
// back to the subordination quadrature.  S_alpha(0) = I exactly; P requires
// t > 0 because its kernel role carries the t^{alpha-1} singularity.
linalg::DenseMatrix resolvent_S(const linalg::DenseMatrix& A, double alpha, double t);
linalg::DenseMatrix resolvent_P(const linalg::DenseMatrix& A, double alpha, double t);

enum class ResolventKind { S, P };

// int_0^inf Psi_alpha(s) e^{s t^alpha A} ds (weight alpha*s Psi_alpha for P)
// by composite Gauss-Legendre after adaptive tail truncation.  Valid for any
// real square A including defective ones; requires alpha < 1 (Psi_1 is a
// point mass, callers use expm directly).  Throws Overflow when the integrand
// peak leaves the representable range (unstable A at large t).
linalg::DenseMatrix resolvent_via_subordination(const linalg::DenseMatrix& A, double alpha,
                                                double t, ResolventKind which);

// Mild solution u(t) = S_alpha(t) u0 + int_0^t (t-s)^{alpha-1} P_alpha(t-s) f(s) ds.
// The forcing convolution interpolates P_alpha(t-s) f(s) linearly per panel
// against exact moments of (t-s)^{alpha-1}; resolvent evaluations are cached
// per distinct lag within the solve.
Trajectory solve_linear(const LinearFDE& sys, const std::vector<double>& u0,
                        const TimeGrid& grid);

struct PECEOptions {
    int corrector_sweeps = 1;      // 1..5
    double blowup_ceiling = 1e12;  // Euclidean state-norm ceiling
};

// Fractional Adams predictor-corrector for d_t^alpha u = g(u) in the Volterra
// form u = u0 + J^alpha g(u): rectangle-weight predictor, piecewise-linear
// product-integration corrector, corrector_sweeps passes per step.  When the
// state norm passes the ceiling the trajectory is truncated and marked
// instead of throwing; instability experiments rely on that.
Trajectory solve_nonlinear(double alpha,
                           const std::function<std::vector<double>(const std::vector<double>&)>& g,
                           const std::vector<double>& u0, const TimeGrid& grid,
                           const PECEOptions& opts = PECEOptions{});

// Discrete growth model with memory: u_k = u0 + sum_{j<k} (S(k-j) - S(k-j-1)) u_j.
// S maps an integer lag to the accumulated rate; S(0) must be 0.  Returns
// u_0..u_n.
std::vector<double> discrete_malthus(const std::function<double(int)>& S, double u0, int n);

} // namespace fracstab::fode
