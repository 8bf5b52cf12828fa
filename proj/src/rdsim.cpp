#include "fracstab/rdsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "fracstab/kernels.hpp"
#include "fracstab/linalg.hpp"

namespace fracstab::rdsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// one axis of the basis: K wave rows sampled on M = 2K midpoints of [0,L]
struct Axis {
    std::vector<double> e, et; // K x M and its transpose
    std::vector<double> x;     // midpoints
    double h = 0;
};

Axis build_axis(double L, BC bc, int K) {
    Axis ax;
    const int M = 2 * K;
    ax.h = L / M;
    ax.x.resize(M);
    for (int i = 0; i < M; ++i) ax.x[i] = (i + 0.5) * ax.h;

    ax.e.assign((std::size_t)K * M, 0.0);
    const double c0 = std::sqrt(1.0 / L);
    const double c1 = std::sqrt(2.0 / L);
    for (int r = 0; r < K; ++r) {
        const int wave = bc == BC::Dirichlet ? r + 1 : r;
        for (int i = 0; i < M; ++i) {
            const double arg = wave * kPi * ax.x[i] / L;
            double w;
            if (bc == BC::Dirichlet)
                w = c1 * std::sin(arg);
            else
                w = wave == 0 ? c0 : c1 * std::cos(arg);
            ax.e[(std::size_t)r * M + i] = w;
        }
    }
    ax.et.assign((std::size_t)M * K, 0.0);
    for (int r = 0; r < K; ++r)
        for (int i = 0; i < M; ++i) ax.et[(std::size_t)i * K + r] = ax.e[(std::size_t)r * M + i];
    return ax;
}

double axis_mu(double L, int wave) {
    const double w = wave * kPi / L;
    return w * w;
}

std::vector<double> transpose(const std::vector<double>& a, int rows, int cols) {
    std::vector<double> t((std::size_t)rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t[(std::size_t)c * rows + r] = a[(std::size_t)r * cols + c];
    return t;
}

// stored node indices: every opts.output_every-th grid node plus the last one
std::vector<int> stored_nodes(int last, int every) {
    if (every < 1) throw DomainError("output_every must be >= 1");
    std::vector<int> js;
    for (int j = 0; j <= last; j += every) js.push_back(j);
    if (js.back() != last) js.push_back(last);
    return js;
}

RateFit slope_ls(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= (double)n;
    my /= (double)n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("fit window collapses to a single abscissa");
    RateFit fit;
    fit.value = sxy / sxx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.nodes_used = (int)n;
    return fit;
}

} // namespace

const char* to_string(Shape s) { return s == Shape::Interval ? "interval" : "rectangle"; }
const char* to_string(BC b) { return b == BC::Dirichlet ? "dirichlet" : "neumann"; }

DomainSpec DomainSpec::interval(double L, BC bc, int modes) {
    DomainSpec d;
    d.shape = Shape::Interval;
    d.Lx = L;
    d.bc = bc;
    d.modes = modes;
    d.validate();
    return d;
}

DomainSpec DomainSpec::rectangle(double Lx, double Ly, BC bc, int modes) {
    DomainSpec d;
    d.shape = Shape::Rectangle;
    d.Lx = Lx;
    d.Ly = Ly;
    d.bc = bc;
    d.modes = modes;
    d.validate();
    return d;
}

void DomainSpec::validate() const {
    if (!(Lx > 0.0) || !std::isfinite(Lx)) throw DomainError("domain length Lx must be positive");
    if (shape == Shape::Rectangle && (!(Ly > 0.0) || !std::isfinite(Ly)))
        throw DomainError("domain length Ly must be positive");
    if (modes < 1) throw DomainError("modes must be >= 1");
}

EigenBasis eigenbasis(const DomainSpec& domain) {
    domain.validate();
    EigenBasis b;
    b.domain = domain;
    const int K = domain.modes;

    Axis ax = build_axis(domain.Lx, domain.bc, K);
    b.xs = ax.x;
    b.ex_ = std::move(ax.e);
    b.ext_ = std::move(ax.et);
    b.nx_ = K;

    const int wave0 = domain.bc == BC::Dirichlet ? 1 : 0;
    if (domain.shape == Shape::Interval) {
        b.modes.resize(K);
        for (int r = 0; r < K; ++r) {
            Mode& m = b.modes[r];
            m.k = r;
            m.kx = wave0 + r;
            m.mu = axis_mu(domain.Lx, m.kx);
        }
        return b;
    }

    Axis ay = build_axis(domain.Ly, domain.bc, K);
    b.ys = ay.x;
    b.ey_ = std::move(ay.e);
    b.eyt_ = std::move(ay.et);
    b.ny_ = K;

    b.modes.reserve((std::size_t)K * K);
    for (int rx = 0; rx < K; ++rx)
        for (int ry = 0; ry < K; ++ry) {
            Mode m;
            m.kx = wave0 + rx;
            m.ky = wave0 + ry;
            m.mu = axis_mu(domain.Lx, m.kx) + axis_mu(domain.Ly, m.ky);
            b.modes.push_back(m);
        }
    std::stable_sort(b.modes.begin(), b.modes.end(), [](const Mode& a, const Mode& c) {
        if (a.mu != c.mu) return a.mu < c.mu;
        if (a.kx != c.kx) return a.kx < c.kx;
        return a.ky < c.ky;
    });
    for (int k = 0; k < (int)b.modes.size(); ++k) b.modes[k].k = k;
    return b;
}

double EigenBasis::eval(int k, int p) const {
    const Mode& m = modes.at(k);
    const int Mx = (int)xs.size();
    if (domain.shape == Shape::Interval) return ex_[(std::size_t)row_of(m.kx) * Mx + p];
    const int ix = p % Mx, iy = p / Mx;
    return ex_[(std::size_t)row_of(m.kx) * Mx + ix] * ey_[(std::size_t)row_of(m.ky) * ys.size() + iy];
}

std::vector<double> EigenBasis::to_coefficients(const std::vector<double>& values) const {
    const int Mx = (int)xs.size();
    if (domain.shape == Shape::Interval) {
        if ((int)values.size() != Mx) throw DomainError("value vector does not match collocation grid");
        std::vector<double> c(nx_);
        kernels::matvec(ex_.data(), values.data(), c.data(), nx_, Mx);
        const double h = domain.Lx / Mx;
        for (double& v : c) v *= h;
        return c;
    }
    const int My = (int)ys.size();
    if ((int)values.size() != Mx * My) throw DomainError("value vector does not match collocation grid");
    // separable contraction: rows over x first, then columns over y
    std::vector<double> t1((std::size_t)My * nx_);
    for (int iy = 0; iy < My; ++iy)
        kernels::matvec(ex_.data(), values.data() + (std::size_t)iy * Mx, t1.data() + (std::size_t)iy * nx_,
                        nx_, Mx);
    std::vector<double> t1t = transpose(t1, My, nx_);
    std::vector<double> ct((std::size_t)nx_ * ny_);
    for (int rx = 0; rx < nx_; ++rx)
        kernels::matvec(ey_.data(), t1t.data() + (std::size_t)rx * My, ct.data() + (std::size_t)rx * ny_,
                        ny_, My);
    const double hh = (domain.Lx / Mx) * (domain.Ly / My);
    std::vector<double> c(modes.size());
    for (const Mode& m : modes)
        c[m.k] = hh * ct[(std::size_t)row_of(m.kx) * ny_ + row_of(m.ky)];
    return c;
}

std::vector<double> EigenBasis::to_values(const std::vector<double>& coeffs) const {
    if ((int)coeffs.size() != size()) throw DomainError("coefficient vector does not match basis size");
    const int Mx = (int)xs.size();
    if (domain.shape == Shape::Interval) {
        std::vector<double> v(Mx);
        kernels::matvec(ext_.data(), coeffs.data(), v.data(), Mx, nx_);
        return v;
    }
    const int My = (int)ys.size();
    std::vector<double> ct((std::size_t)nx_ * ny_, 0.0);
    for (const Mode& m : modes)
        ct[(std::size_t)row_of(m.kx) * ny_ + row_of(m.ky)] = coeffs[m.k];
    // u[iy][ix] = sum_rx sum_ry ct[rx][ry] ex[rx][ix] ey[ry][iy]
    std::vector<double> u((std::size_t)nx_ * My);
    for (int rx = 0; rx < nx_; ++rx)
        kernels::matvec(eyt_.data(), ct.data() + (std::size_t)rx * ny_, u.data() + (std::size_t)rx * My,
                        My, ny_);
    std::vector<double> ut = transpose(u, nx_, My);
    std::vector<double> v((std::size_t)My * Mx);
    for (int iy = 0; iy < My; ++iy)
        kernels::matvec(ext_.data(), ut.data() + (std::size_t)iy * nx_, v.data() + (std::size_t)iy * Mx,
                        Mx, nx_);
    return v;
}

Field to_coefficients(const EigenBasis& basis, const Field& f) {
    if (f.rep == Field::Rep::Coefficients) {
        if (f.stride() != basis.size()) throw DomainError("field does not match basis size");
        return f;
    }
    if (f.stride() != basis.points()) throw DomainError("field does not match collocation grid");
    Field out;
    out.rep = Field::Rep::Coefficients;
    out.components = f.components;
    out.data.reserve((std::size_t)f.components * basis.size());
    for (int c = 0; c < f.components; ++c) {
        std::vector<double> vals(f.data.begin() + (std::size_t)c * f.stride(),
                                 f.data.begin() + (std::size_t)(c + 1) * f.stride());
        auto co = basis.to_coefficients(vals);
        out.data.insert(out.data.end(), co.begin(), co.end());
    }
    return out;
}

Field to_values(const EigenBasis& basis, const Field& f) {
    if (f.rep == Field::Rep::Collocation) {
        if (f.stride() != basis.points()) throw DomainError("field does not match collocation grid");
        return f;
    }
    if (f.stride() != basis.size()) throw DomainError("field does not match basis size");
    Field out;
    out.rep = Field::Rep::Collocation;
    out.components = f.components;
    out.data.reserve((std::size_t)f.components * basis.points());
    for (int c = 0; c < f.components; ++c) {
        std::vector<double> co(f.data.begin() + (std::size_t)c * f.stride(),
                               f.data.begin() + (std::size_t)(c + 1) * f.stride());
        auto vals = basis.to_values(co);
        out.data.insert(out.data.end(), vals.begin(), vals.end());
    }
    return out;
}

double l2_norm(const Field& coeffs) {
    if (coeffs.rep != Field::Rep::Coefficients)
        throw DomainError("l2_norm expects a coefficient-rep field");
    return std::sqrt(kernels::nrm2sq(coeffs.data.data(), coeffs.data.size()));
}

double sup_norm(const EigenBasis& basis, const Field& f) {
    const Field v = to_values(basis, f);
    double m = 0.0;
    for (double x : v.data) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<double> mode_energies(const Field& coeffs) {
    if (coeffs.rep != Field::Rep::Coefficients)
        throw DomainError("mode_energies expects a coefficient-rep field");
    const int K = coeffs.stride();
    std::vector<double> e(K, 0.0);
    for (int c = 0; c < coeffs.components; ++c)
        for (int k = 0; k < K; ++k) e[k] += coeffs.at(c, k) * coeffs.at(c, k);
    return e;
}

FieldTrajectory simulate_linear_rd(const stability::RDSpec& spec, const DomainSpec& domain,
                                   const Field& u0, const fode::TimeGrid& grid,
                                   const SimOptions& opts) {
    grid.validate();
    if (!(opts.blowup_ceiling > 0.0)) throw DomainError("blowup ceiling must be positive");
    const EigenBasis basis = eigenbasis(domain);
    const int nc = spec.A.n;
    if (u0.components != nc) throw DomainError("initial field component count does not match system");
    const Field c0 = to_coefficients(basis, u0);
    const int K = basis.size();

    FieldTrajectory traj;
    traj.alpha = spec.alpha;
    traj.scheme = fode::Scheme::ModeResolvent;

    const auto nodes = grid.nodes();
    const auto js = stored_nodes(grid.steps, opts.output_every);

    // modes whose initial coefficients all vanish stay zero under the
    // block-diagonal evolution; skipping them also keeps an irrelevant
    // unstable mode from overflowing a long stable-mode run
    std::vector<char> active(K, 0);
    for (int k = 0; k < K; ++k)
        for (int c = 0; c < nc; ++c)
            if (c0.at(c, k) != 0.0) active[k] = 1;

    std::vector<double> b(nc), y(nc);
    for (int j : js) {
        const double t = nodes[j];
        Field st = c0;
        if (j != 0) {
            bool overflowed = false;
            for (int k = 0; k < K && !overflowed; ++k) {
                if (!active[k]) continue;
                linalg::DenseMatrix S;
                try {
                    S = fode::resolvent_S(stability::mode_matrix(spec, basis.modes[k].mu), spec.alpha, t);
                } catch (const Overflow&) {
                    overflowed = true;
                    break;
                }
                for (int c = 0; c < nc; ++c) b[c] = c0.at(c, k);
                for (int r = 0; r < nc; ++r) {
                    double acc = 0.0;
                    for (int c = 0; c < nc; ++c) acc += S(r, c) * b[c];
                    y[r] = acc;
                }
                for (int c = 0; c < nc; ++c) st.at(c, k) = y[c];
            }
            if (overflowed || !finite_all(st.data)) {
                traj.truncated = true;
                break;
            }
        }
        traj.times.push_back(t);
        traj.states.push_back(std::move(st));
        if (l2_norm(traj.states.back()) > opts.blowup_ceiling) {
            traj.truncated = true;
            break;
        }
    }
    return traj;
}

FieldTrajectory simulate_nonlinear_rd(
    double alpha, const std::function<std::vector<double>(const std::vector<double>&)>& g,
    const std::vector<double>& D, const DomainSpec& domain, const Field& u0,
    const fode::TimeGrid& grid, const SimOptions& opts) {
    grid.validate();
    if (!g) throw DomainError("reaction term must be callable");
    const EigenBasis basis = eigenbasis(domain);
    const int nc = u0.components;
    if ((int)D.size() != nc) throw DomainError("diffusion vector length does not match components");
    for (double d : D)
        if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("diffusion coefficients must be positive");
    const Field c0 = to_coefficients(basis, u0);
    const int K = basis.size();
    const int P = basis.points();

    std::vector<double> mu(K);
    for (int k = 0; k < K; ++k) mu[k] = basis.modes[k].mu;

    // coefficient-space right-hand side: -D_c mu_k b_{c,k} + (projection of g
    // evaluated pointwise on the collocation grid)
    auto rhs = [&](const std::vector<double>& state) {
        std::vector<double> out((std::size_t)nc * K);
        std::vector<std::vector<double>> vals(nc);
        for (int c = 0; c < nc; ++c) {
            std::vector<double> co(state.begin() + (std::size_t)c * K,
                                   state.begin() + (std::size_t)(c + 1) * K);
            vals[c] = basis.to_values(co);
        }
        std::vector<std::vector<double>> gv(nc, std::vector<double>(P));
        std::vector<double> in(nc);
        for (int p = 0; p < P; ++p) {
            for (int c = 0; c < nc; ++c) in[c] = vals[c][p];
            std::vector<double> gout = g(in);
            if ((int)gout.size() != nc)
                throw DomainError("reaction term returned " + std::to_string(gout.size()) +
                                  " components, expected " + std::to_string(nc));
            for (int c = 0; c < nc; ++c) gv[c][p] = gout[c];
        }
        for (int c = 0; c < nc; ++c) {
            auto gc = basis.to_coefficients(gv[c]);
            for (int k = 0; k < K; ++k)
                out[(std::size_t)c * K + k] = -D[c] * mu[k] * state[(std::size_t)c * K + k] + gc[k];
        }
        return out;
    };

    fode::Trajectory base = fode::solve_nonlinear(alpha, rhs, c0.data, grid, opts.pece);

    FieldTrajectory traj;
    traj.alpha = alpha;
    traj.scheme = fode::Scheme::PECE;
    traj.truncated = base.truncated;
    const auto nodes = grid.nodes();
    const int last = (int)base.states.size() - 1;
    for (int j : stored_nodes(last, opts.output_every)) {
        Field f;
        f.rep = Field::Rep::Coefficients;
        f.components = nc;
        f.data = base.states[j];
        traj.times.push_back(nodes[j]);
        traj.states.push_back(std::move(f));
    }
    return traj;
}

RateFit fit_rate_detail(const std::vector<double>& times, const std::vector<double>& norms,
                        double w0, double w1, RateKind kind) {
    if (times.size() != norms.size()) throw DomainError("times and norms must have equal length");
    if (!(w0 <= w1)) throw DomainError("fit window must satisfy w0 <= w1");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i], n = norms[i];
        if (t < w0 || t > w1) continue;
        if (!(n > 0.0) || !std::isfinite(n)) continue;
        if (kind == RateKind::AlgebraicDecay && !(t > 0.0)) continue;
        x.push_back(kind == RateKind::AlgebraicDecay ? std::log(t) : t);
        y.push_back(std::log(n));
    }
    if (x.size() < 10)
        throw InsufficientData("fit window holds " + std::to_string(x.size()) +
                               " usable nodes, need at least 10");
    return slope_ls(x, y);
}

double fit_rate(const std::vector<double>& times, const std::vector<double>& norms, double w0,
                double w1, RateKind kind) {
    return fit_rate_detail(times, norms, w0, w1, kind).value;
}

double fit_rate(const fode::Trajectory& traj, double w0, double w1, RateKind kind) {
    const auto nodes = traj.grid.nodes();
    std::vector<double> t, n;
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        t.push_back(nodes[j]);
        n.push_back(std::sqrt(kernels::nrm2sq(traj.states[j].data(), traj.states[j].size())));
    }
    return fit_rate(t, n, w0, w1, kind);
}

double fit_rate(const FieldTrajectory& traj, double w0, double w1, RateKind kind) {
    std::vector<double> n;
    n.reserve(traj.states.size());
    for (const Field& f : traj.states) n.push_back(l2_norm(f));
    return fit_rate(traj.times, n, w0, w1, kind);
}

} // namespace fracstab::rdsim
