#pragma once

#include <functional>
#include <vector>

#include "fracstab/errors.hpp"
#include "fracstab/fode.hpp"
#include "fracstab/stability.hpp"

namespace fracstab::rdsim {

enum class Shape { Interval, Rectangle };
enum class BC { Dirichlet, Neumann };

const char* to_string(Shape s);
const char* to_string(BC b);

// Interval [0,L] or rectangle [0,Lx]x[0,Ly]; modes = truncation order per
// axis.  The collocation grid is fixed at 2*modes midpoints per axis, which
// dealiases cubic nonlinearities and makes the discrete basis orthonormality
// exact.
struct DomainSpec {
    Shape shape = Shape::Interval;
    double Lx = 1.0;
    double Ly = 0.0;
    BC bc = BC::Neumann;
    int modes = 8;

    static DomainSpec interval(double L, BC bc, int modes);
    static DomainSpec rectangle(double Lx, double Ly, BC bc, int modes);
    void validate() const;
};

struct Mode {
    int k = 0;      // position in the sorted basis
    double mu = 0;  // Laplacian eigenvalue, nondecreasing in k
    int kx = 0;     // wave index per axis (ky unused for intervals)
    int ky = 0;
};

// Explicit Laplacian eigenbasis on the domain: cosines for Neumann (mu_0 = 0,
// constant eigenfunction), sines for Dirichlet (all mu_k > 0), tensor
// products on rectangles, each normalized to unit L2 norm.
struct EigenBasis {
    DomainSpec domain;
    std::vector<Mode> modes;
    std::vector<double> xs, ys; // collocation midpoints (ys empty for intervals)

    int points() const { return (int)xs.size() * (domain.shape == Shape::Interval ? 1 : (int)ys.size()); }
    int size() const { return (int)modes.size(); }

    // dense transform pair; exact inverses of each other on the truncated span
    // (midpoint quadrature is exact for products of retained basis functions)
    std::vector<double> to_coefficients(const std::vector<double>& values) const;
    std::vector<double> to_values(const std::vector<double>& coeffs) const;

    // basis function w_k evaluated at collocation point p (p = iy*M + ix on
    // rectangles)
    double eval(int k, int p) const;

private:
    friend EigenBasis eigenbasis(const DomainSpec&);
    // per-axis basis samples, row-major [wave row][point], plus transposes
    std::vector<double> ex_, ext_, ey_, eyt_;
    int nx_ = 0, ny_ = 0; // wave counts per axis
    int row_of(int wave) const { return domain.bc == BC::Dirichlet ? wave - 1 : wave; }
};

EigenBasis eigenbasis(const DomainSpec& domain);

// Multi-component field, stored either as basis coefficients (entry stride =
// basis.size()) or collocation values (stride = basis.points()), row-major
// [component][entry].
struct Field {
    enum class Rep { Coefficients, Collocation };
    Rep rep = Rep::Coefficients;
    int components = 1;
    std::vector<double> data;

    int stride() const { return components > 0 ? (int)data.size() / components : 0; }
    double at(int c, int i) const { return data[(std::size_t)c * stride() + i]; }
    double& at(int c, int i) { return data[(std::size_t)c * stride() + i]; }
};

Field to_coefficients(const EigenBasis& basis, const Field& f);
Field to_values(const EigenBasis& basis, const Field& f);

// L2 norm of the field (coefficient 2-norm; Parseval on the orthonormal basis)
double l2_norm(const Field& coeffs);

// max |u| over components and collocation points (reconstructs if needed)
double sup_norm(const EigenBasis& basis, const Field& f);

// per-mode energy E_k = sum_c beta_{c,k}^2 for a coefficient-rep field
std::vector<double> mode_energies(const Field& coeffs);

// Time series of coefficient-rep fields at stored output times.  truncated
// marks blow-up detection; states then cover a time prefix.
struct FieldTrajectory {
    std::vector<double> times;
    std::vector<Field> states;
    double alpha = 1.0;
    fode::Scheme scheme = fode::Scheme::ModeResolvent;
    bool truncated = false;
};

struct SimOptions {
    int output_every = 1;          // store every k-th grid node (final always kept)
    double blowup_ceiling = 1e250; // linear sims: L2 coefficient ceiling
    fode::PECEOptions pece{};      // nonlinear stepping controls
};

// Linear theory made executable: each basis mode evolves independently by the
// resolvent of its mode matrix A - mu_k diag(D).  Blow-up past the ceiling
// truncates and marks the trajectory.
FieldTrajectory simulate_linear_rd(const stability::RDSpec& spec, const DomainSpec& domain,
                                   const Field& u0, const fode::TimeGrid& grid,
                                   const SimOptions& opts = SimOptions{});

// Galerkin truncation of d_t^alpha u = D Lap u + g(u): coefficient dynamics
// solved by the fractional Adams scheme, with g evaluated pointwise on the
// collocation grid and projected back each call.
FieldTrajectory simulate_nonlinear_rd(
    double alpha, const std::function<std::vector<double>(const std::vector<double>&)>& g,
    const std::vector<double>& D, const DomainSpec& domain, const Field& u0,
    const fode::TimeGrid& grid, const SimOptions& opts = SimOptions{});

enum class RateKind { AlgebraicDecay, ExponentialGrowth };

struct RateFit {
    double value = 0;     // slope (exponent or rate)
    double r_squared = 0; // goodness of the line, 1 for exact
    int nodes_used = 0;
};

// Least-squares slope of log(norm) against log(t) (algebraic: returns the
// exponent) or against t (exponential: returns the rate) over nodes with
// t in [w0, w1].  Needs at least 10 usable nodes.
RateFit fit_rate_detail(const std::vector<double>& times, const std::vector<double>& norms,
                        double w0, double w1, RateKind kind);
double fit_rate(const std::vector<double>& times, const std::vector<double>& norms, double w0,
                double w1, RateKind kind);
double fit_rate(const fode::Trajectory& traj, double w0, double w1, RateKind kind);
double fit_rate(const FieldTrajectory& traj, double w0, double w1, RateKind kind);

} // namespace fracstab::rdsim
