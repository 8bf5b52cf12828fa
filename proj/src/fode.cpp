#include "fracstab/fode.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fracstab/gammafun.hpp"
#include "fracstab/mittag_leffler.hpp"
#include "fracstab/quadrature.hpp"
#include "fracstab/wright.hpp"

namespace fracstab::fode {

namespace {

using C = std::complex<double>;
using linalg::DenseMatrix;

constexpr double kPi = 3.141592653589793238462643383279502884;

void validate_alpha(double alpha, bool allow_one = true) {
    if (!(alpha > 0.0) || alpha > 1.0 || (!allow_one && alpha == 1.0))
        throw DomainError("alpha must lie in (0,1" + std::string(allow_one ? "]" : ")"));
}

double vec_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool vec_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

std::vector<double> matvec(const DenseMatrix& M, const std::vector<double>& v) {
    std::vector<double> out(M.n, 0.0);
    for (int i = 0; i < M.n; ++i) {
        double acc = 0;
        for (int j = 0; j < M.n; ++j) acc += M(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

// Lag t_n - t_j computed in canonical form: on uniform grids it depends only
// on n-j bit-for-bit, so per-lag caches actually hit.
struct LagOf {
    const TimeGrid& grid;
    const std::vector<double>& nodes;
    double operator()(int n, int j) const {
        if (grid.spacing == Spacing::Uniform)
            return grid.t_end * (double(n - j) / grid.steps);
        return nodes[n] - nodes[j];
    }
};

// Spectral path for f(t^alpha A): apply f on the eigenvalues.  Falls back to
// the subordination quadrature when the eigenbasis is too ill-conditioned or
// an eigenvalue lands in the Mittag-Leffler sector guard band.
DenseMatrix resolvent_spectral_or_subordinate(const DenseMatrix& A, double alpha, double t,
                                              ResolventKind which) {
    const double tau = std::pow(t, alpha);
    const double beta = (which == ResolventKind::S) ? 1.0 : alpha;
    try {
        return linalg::apply_analytic(
            A, [&](C z) { return specfun::ml(alpha, beta, tau * z).value; });
    } catch (const DefectiveMatrix&) {
    } catch (const SectorBoundary&) {
    }
    return resolvent_via_subordination(A, alpha, t, which);
}

} // namespace

const char* to_string(Spacing s) { return s == Spacing::Uniform ? "uniform" : "graded"; }

const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::Duhamel: return "duhamel";
    case Scheme::PECE: return "pece";
    case Scheme::ModeResolvent: return "mode_resolvent";
    }
    return "unknown";
}

TimeGrid TimeGrid::uniform(double t_end, int steps) {
    TimeGrid g;
    g.t_end = t_end;
    g.steps = steps;
    g.spacing = Spacing::Uniform;
    g.gamma = 1.0;
    g.validate();
    return g;
}

TimeGrid TimeGrid::graded(double t_end, int steps, double gamma) {
    TimeGrid g;
    g.t_end = t_end;
    g.steps = steps;
    g.spacing = Spacing::Graded;
    g.gamma = gamma;
    g.validate();
    return g;
}

void TimeGrid::validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("TimeGrid: t_end must be > 0");
    if (steps < 1) throw DomainError("TimeGrid: steps must be >= 1");
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw DomainError("TimeGrid: gamma must be >= 1");
    if (spacing == Spacing::Graded) {
        // grading must not underflow node spacing to zero
        const double first = t_end * std::pow(1.0 / steps, gamma);
        if (!(first > 0.0)) throw DomainError("TimeGrid: grading underflows the first node");
    }
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> t(steps + 1);
    for (int j = 0; j <= steps; ++j) {
        const double r = double(j) / steps;
        t[j] = (spacing == Spacing::Uniform) ? t_end * r : t_end * std::pow(r, gamma);
    }
    t[steps] = t_end;
    return t;
}

ScalarTrajectory scalar_duhamel(double alpha, C lambda, C u0,
                                const std::function<C(double)>& f, const TimeGrid& grid) {
    validate_alpha(alpha);
    grid.validate();
    const std::vector<double> t = grid.nodes();
    const int N = grid.steps;
    const LagOf lag{grid, t};

    ScalarTrajectory out;
    out.grid = grid;
    out.alpha = alpha;
    out.scheme = Scheme::Duhamel;
    out.states.resize(N + 1);
    out.states[0] = u0;

    std::vector<C> fv;
    if (f) {
        fv.resize(N + 1);
        for (int j = 0; j <= N; ++j) fv[j] = f(t[j]);
    }

    // I0(x) = int_0^x s^{a-1} E_{a,a}(lambda s^a) ds = x^a E_{a,a+1}(lambda x^a)
    // I1(x) = int_0^x s^a   E_{a,a}(lambda s^a) ds
    //       = x^{a+1} (E_{a,a+1} - E_{a,a+2})(lambda x^a)
    // cached per distinct lag x
    std::unordered_map<double, std::pair<C, C>> anti;
    auto weights_at = [&](double x) -> const std::pair<C, C>& {
        auto it = anti.find(x);
        if (it != anti.end()) return it->second;
        C i0 = 0.0, i1 = 0.0;
        if (x > 0.0) {
            try {
                const double xa = std::pow(x, alpha);
                const C arg = lambda * xa;
                const C e1 = specfun::ml_phi1(alpha, arg);
                const C e2 = specfun::ml_phi2(alpha, arg);
                i0 = xa * e1;
                i1 = xa * x * (e1 - e2);
            } catch (const Error& e) {
                throw QuadratureFailure(std::string("scalar_duhamel: kernel weight failed: ") +
                                        e.what());
            }
        }
        return anti.emplace(x, std::make_pair(i0, i1)).first->second;
    };

    for (int n = 1; n <= N; ++n) {
        C u = specfun::ml1(alpha, lambda * std::pow(t[n], alpha)) * u0;
        if (f) {
            C acc = 0.0, comp = 0.0; // Kahan: panel weights span many scales
            std::pair<C, C> right = weights_at(lag(n, n)); // x = 0
            for (int j = n - 1; j >= 0; --j) {
                const double b = lag(n, j);
                const std::pair<C, C> left = weights_at(b);
                const C d0 = left.first - right.first;
                const C d1 = left.second - right.second;
                const double h = t[j + 1] - t[j];
                const C term = fv[j] * d0 + (fv[j + 1] - fv[j]) * (b * d0 - d1) / h;
                const C y = term - comp;
                const C s = acc + y;
                comp = (s - acc) - y;
                acc = s;
                right = left;
            }
            u += acc;
        }
        out.states[n] = u;
    }
    return out;
}

DenseMatrix resolvent_S(const DenseMatrix& A, double alpha, double t) {
    validate_alpha(alpha);
    if (!(t >= 0.0)) throw DomainError("resolvent_S: t must be >= 0");
    if (t == 0.0) return DenseMatrix::identity(A.n);
    if (alpha == 1.0) return linalg::expm(A, t);
    return resolvent_spectral_or_subordinate(A, alpha, t, ResolventKind::S);
}

DenseMatrix resolvent_P(const DenseMatrix& A, double alpha, double t) {
    validate_alpha(alpha);
    if (!(t > 0.0)) throw DomainError("resolvent_P: t must be > 0 (kernel t^{alpha-1} singular)");
    if (alpha == 1.0) return linalg::expm(A, t);
    return resolvent_spectral_or_subordinate(A, alpha, t, ResolventKind::P);
}

DenseMatrix resolvent_via_subordination(const DenseMatrix& A, double alpha, double t,
                                        ResolventKind which) {
    validate_alpha(alpha, /*allow_one=*/false);
    if (!(t > 0.0)) throw DomainError("resolvent_via_subordination: t must be > 0");
    const double tau = std::pow(t, alpha);
    const double omega = linalg::numerical_abscissa(A); // ||e^{sA}|| <= e^{omega s}
    const double anorm = linalg::norm2(A);

    // log Psi_alpha(s) ~ -c s^p with p = 1/(1-alpha); the integrand bound
    // exp(-c s^p + s tau omega) always decays eventually, but its peak can
    // leave double range for unstable A at large t.
    const double p = 1.0 / (1.0 - alpha);
    const double c = (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha));
    if (omega > 0.0) {
        const double speak = std::pow(tau * omega / (c * p), 1.0 / (p - 1.0));
        const double peak_log = c * (p - 1.0) * std::pow(speak, p);
        if (peak_log > 690.0)
            throw Overflow("resolvent_via_subordination: integrand peak exceeds double range");
    }

    const double drift = tau * std::max(omega, 0.0);
    double s_max = 2.0;
    while (-c * std::pow(s_max, p) + s_max * drift > -46.0) s_max *= 1.2;

    // panel width resolves both the Psi scale (~0.5) and the e^{s tau A} scale
    const int panels =
        std::clamp((int)std::ceil(s_max * (2.0 + tau * anorm) / 2.0), 8, 800);
    const auto& rule = quad::gauss_legendre(12);

    DenseMatrix out(A.n);
    const double w_panel = s_max / panels;
    for (int pi = 0; pi < panels; ++pi) {
        const double a = pi * w_panel;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double s = a + 0.5 * w_panel * (rule.nodes[q] + 1.0);
            double psi = specfun::wright_psi(alpha, s);
            if (which == ResolventKind::P) psi *= alpha * s;
            if (psi == 0.0) continue; // clamped superexponential tail
            const double w = 0.5 * w_panel * rule.weights[q] * psi;
            const DenseMatrix E = linalg::expm(A, s * tau);
            for (std::size_t k = 0; k < out.a.size(); ++k) out.a[k] += w * E.a[k];
        }
    }
    return out;
}

Trajectory solve_linear(const LinearFDE& sys, const std::vector<double>& u0,
                        const TimeGrid& grid) {
    validate_alpha(sys.alpha);
    grid.validate();
    if ((int)u0.size() != sys.A.n) throw DomainError("solve_linear: u0 dimension mismatch");
    const double alpha = sys.alpha;
    const std::vector<double> t = grid.nodes();
    const int N = grid.steps;
    const LagOf lag{grid, t};

    Trajectory out;
    out.grid = grid;
    out.alpha = alpha;
    out.scheme = Scheme::Duhamel;
    out.states.resize(N + 1);
    out.states[0] = u0;

    std::vector<std::vector<double>> fv;
    if (sys.forcing) {
        fv.resize(N + 1);
        for (int j = 0; j <= N; ++j) {
            fv[j] = sys.forcing(t[j]);
            if ((int)fv[j].size() != sys.A.n)
                throw DomainError("solve_linear: forcing dimension mismatch");
        }
    }

    // P_alpha(lag) f(s_j) interpolated linearly per panel against exact
    // moments of (t-s)^{alpha-1}; P evaluations cached per distinct lag.
    std::unordered_map<double, DenseMatrix> pcache;
    const double inv_gamma_alpha = specfun::rgamma(alpha);
    auto P_at = [&](double x) -> const DenseMatrix& {
        auto it = pcache.find(x);
        if (it != pcache.end()) return it->second;
        DenseMatrix P(sys.A.n);
        if (x > 0.0) {
            P = resolvent_P(sys.A, alpha, x);
        } else {
            for (int i = 0; i < sys.A.n; ++i) P(i, i) = inv_gamma_alpha; // E_{a,a}(0) = 1/G(a)
        }
        return pcache.emplace(x, std::move(P)).first->second;
    };

    for (int n = 1; n <= N; ++n) {
        std::vector<double> u = matvec(resolvent_S(sys.A, alpha, t[n]), u0);
        if (sys.forcing) {
            double aa = 0.0, aa0 = 0.0, aa1 = 0.0; // lag at s_{j+1} and its moments
            std::vector<double> Gr = matvec(P_at(0.0), fv[n]);
            for (int j = n - 1; j >= 0; --j) {
                const double b = lag(n, j);
                const double ba = std::pow(b, alpha);
                const double b0 = ba / alpha;          // int_0^b tau^{a-1}
                const double b1 = ba * b / (alpha + 1.0); // int_0^b tau^a
                const double m0 = b0 - aa0;
                const double m1 = b1 - aa1;
                const double h = t[j + 1] - t[j];
                const std::vector<double> Gl = matvec(P_at(b), fv[j]);
                const double wl = (m1 - aa * m0) / h;
                const double wr = (b * m0 - m1) / h;
                for (int i = 0; i < sys.A.n; ++i) u[i] += wl * Gl[i] + wr * Gr[i];
                aa = b;
                aa0 = b0;
                aa1 = b1;
                Gr = Gl;
            }
        }
        out.states[n] = std::move(u);
    }
    return out;
}

Trajectory solve_nonlinear(double alpha,
                           const std::function<std::vector<double>(const std::vector<double>&)>& g,
                           const std::vector<double>& u0, const TimeGrid& grid,
                           const PECEOptions& opts) {
    validate_alpha(alpha);
    grid.validate();
    if (!g) throw DomainError("solve_nonlinear: g must be callable");
    if (opts.corrector_sweeps < 1 || opts.corrector_sweeps > 5)
        throw DomainError("solve_nonlinear: corrector_sweeps must be in 1..5");
    if (!(opts.blowup_ceiling > 0.0)) throw DomainError("solve_nonlinear: ceiling must be > 0");

    const std::vector<double> t = grid.nodes();
    const int N = grid.steps;
    const int dim = (int)u0.size();
    const double rg1 = specfun::rgamma(alpha);

    Trajectory out;
    out.grid = grid;
    out.alpha = alpha;
    out.scheme = Scheme::PECE;
    out.states.reserve(N + 1);
    out.states.push_back(u0);

    std::vector<std::vector<double>> gv;
    gv.reserve(N + 1);
    gv.push_back(g(u0));
    if ((int)gv[0].size() != dim) throw DomainError("solve_nonlinear: g dimension mismatch");

    std::vector<double> pred(dim), acc(dim);
    for (int n = 1; n <= N; ++n) {
        const double tn = t[n];
        // predictor: left-rectangle values against exact kernel moments
        pred = u0;
        {
            double aa0 = 0.0;
            for (int j = n - 1; j >= 0; --j) {
                const double b = tn - t[j];
                const double b0 = std::pow(b, alpha) / alpha;
                const double w = (b0 - aa0) * rg1;
                for (int i = 0; i < dim; ++i) pred[i] += w * gv[j][i];
                aa0 = b0;
            }
        }
        if (!vec_finite(pred)) {
            out.truncated = true;
            break;
        }

        // corrector sweeps: piecewise-linear product integration, the node-n
        // value refreshed from the latest iterate
        std::vector<double> cur = pred;
        for (int sweep = 0; sweep < opts.corrector_sweeps; ++sweep) {
            const std::vector<double> gn = g(cur);
            acc = u0;
            double aa = 0.0, aa0 = 0.0, aa1 = 0.0;
            const std::vector<double>* grp = &gn;
            for (int j = n - 1; j >= 0; --j) {
                const double b = tn - t[j];
                const double ba = std::pow(b, alpha);
                const double b0 = ba / alpha;
                const double b1 = ba * b / (alpha + 1.0);
                const double m0 = b0 - aa0;
                const double m1 = b1 - aa1;
                const double h = t[j + 1] - t[j];
                const double wl = rg1 * (m1 - aa * m0) / h;
                const double wr = rg1 * (b * m0 - m1) / h;
                const std::vector<double>& gl = gv[j];
                for (int i = 0; i < dim; ++i) acc[i] += wl * gl[i] + wr * (*grp)[i];
                aa = b;
                aa0 = b0;
                aa1 = b1;
                grp = &gv[j];
            }
            cur = acc;
            if (!vec_finite(cur)) break;
        }

        if (!vec_finite(cur)) {
            out.truncated = true;
            break;
        }
        out.states.push_back(cur);
        if (vec_norm(cur) > opts.blowup_ceiling) {
            out.truncated = true;
            break;
        }
        gv.push_back(g(cur));
    }
    return out;
}

std::vector<double> discrete_malthus(const std::function<double(int)>& S, double u0, int n) {
    if (!S) throw DomainError("discrete_malthus: S must be callable");
    if (n < 0) throw DomainError("discrete_malthus: n must be >= 0");
    std::vector<double> Sv(n + 1);
    for (int k = 0; k <= n; ++k) Sv[k] = S(k);
    if (Sv[0] != 0.0) throw DomainError("discrete_malthus: S(0) must be 0");

    std::vector<double> d(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) d[k] = Sv[k] - Sv[k - 1];

    std::vector<double> u(n + 1);
    u[0] = u0;
    for (int k = 1; k <= n; ++k) {
        double acc = u0;
        for (int j = 0; j < k; ++j) acc += d[k - j] * u[j];
        u[k] = acc;
    }
    return u;
}

} // namespace fracstab::fode
