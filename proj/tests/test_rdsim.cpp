#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fracstab/fode.hpp"
#include "fracstab/mittag_leffler.hpp"
#include "fracstab/rdsim.hpp"
#include "fracstab/stability.hpp"

using namespace fracstab;
using rdsim::BC;
using rdsim::DomainSpec;
using rdsim::Field;
using linalg::DenseMatrix;

namespace {
constexpr double kPi = 3.14159265358979323846;

Field coeff_field(int components, int modes) {
    Field f;
    f.rep = Field::Rep::Coefficients;
    f.components = components;
    f.data.assign((std::size_t)components * modes, 0.0);
    return f;
}
} // namespace

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(rdsim::eigenbasis(DomainSpec::interval(0.0, BC::Neumann, 3)), DomainError);
    CHECK_THROWS_AS(rdsim::eigenbasis(DomainSpec::interval(1.0, BC::Neumann, 0)), DomainError);
    CHECK_THROWS_AS(rdsim::eigenbasis(DomainSpec::rectangle(1.0, -2.0, BC::Dirichlet, 3)),
                    DomainError);
}

TEST_CASE("laplacian eigenvalue ladders") {
    auto bn = rdsim::eigenbasis(DomainSpec::interval(kPi, BC::Neumann, 3));
    REQUIRE(bn.size() == 3);
    CHECK(bn.modes[0].mu == doctest::Approx(0.0));
    CHECK(bn.modes[1].mu == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(bn.modes[2].mu == doctest::Approx(4.0).epsilon(1e-13));

    auto bd = rdsim::eigenbasis(DomainSpec::interval(1.0, BC::Dirichlet, 2));
    CHECK(bd.modes[0].mu == doctest::Approx(kPi * kPi).epsilon(1e-13));
    CHECK(bd.modes[1].mu == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-13));

    // tensor ladder k^2 + l^2 over {0,1,2}^2, sorted: 0,1,1,2,4,4,5,5,8
    auto br = rdsim::eigenbasis(DomainSpec::rectangle(kPi, kPi, BC::Neumann, 3));
    const double want[] = {0, 1, 1, 2, 4, 4, 5, 5, 8};
    REQUIRE(br.size() == 9);
    for (int i = 0; i < 9; ++i) CHECK(br.modes[i].mu == doctest::Approx(want[i]).epsilon(1e-12));
    // ties broken by (kx, ky) so the ordering is reproducible
    CHECK(br.modes[1].kx == 0);
    CHECK(br.modes[2].kx == 1);
}

TEST_CASE("midpoint collocation grid is exactly orthonormal") {
    for (auto bc : {BC::Neumann, BC::Dirichlet}) {
        auto b = rdsim::eigenbasis(DomainSpec::interval(2.7, bc, 9));
        const int M = b.points();
        REQUIRE(M == 18); // two points per mode
        const double h = 2.7 / M;
        // midpoints
        CHECK(b.xs[0] == doctest::Approx(0.5 * h).epsilon(1e-15));
        double worst = 0;
        for (int j = 0; j < b.size(); ++j)
            for (int k = 0; k < b.size(); ++k) {
                double s = 0;
                for (int p = 0; p < M; ++p) s += b.eval(j, p) * b.eval(k, p);
                worst = std::max(worst, std::fabs(h * s - (j == k ? 1.0 : 0.0)));
            }
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("transform round trips") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);

    auto b = rdsim::eigenbasis(DomainSpec::interval(1.7, BC::Dirichlet, 12));
    Field c = coeff_field(2, b.size());
    for (auto& v : c.data) v = U(rng);
    auto back = rdsim::to_coefficients(b, rdsim::to_values(b, c));
    for (std::size_t i = 0; i < c.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(c.data[i]).epsilon(1e-13));

    auto br = rdsim::eigenbasis(DomainSpec::rectangle(1.0, 2.0, BC::Neumann, 6));
    Field cr = coeff_field(1, br.size());
    for (auto& v : cr.data) v = U(rng);
    auto backr = rdsim::to_coefficients(br, rdsim::to_values(br, cr));
    for (std::size_t i = 0; i < cr.data.size(); ++i)
        CHECK(backr.data[i] == doctest::Approx(cr.data[i]).epsilon(1e-13));
}

TEST_CASE("coefficient refinement is stable under enlarging the basis") {
    // a function inside the K=4 span has identical coefficients in the K=6
    // basis (discrete integrals are exact for band-limited products)
    auto b4 = rdsim::eigenbasis(DomainSpec::interval(kPi, BC::Neumann, 4));
    auto b6 = rdsim::eigenbasis(DomainSpec::interval(kPi, BC::Neumann, 6));
    const double a[] = {0.4, -0.7, 0.2, 0.05};

    auto sample = [&](const rdsim::EigenBasis& b) {
        Field f;
        f.rep = Field::Rep::Collocation;
        f.components = 1;
        f.data.resize(b.points());
        for (int p = 0; p < b.points(); ++p) {
            double s = 0;
            const double norm0 = std::sqrt(1.0 / kPi), norm = std::sqrt(2.0 / kPi);
            for (int j = 0; j < 4; ++j)
                s += a[j] * (j == 0 ? norm0 : norm * std::cos(j * b.xs[p]));
            f.data[p] = s;
        }
        return rdsim::to_coefficients(b, f);
    };
    auto c4 = sample(b4), c6 = sample(b6);
    for (int j = 0; j < 4; ++j) {
        CHECK(c4.data[j] == doctest::Approx(a[j]).epsilon(1e-13));
        CHECK(c6.data[j] == doctest::Approx(a[j]).epsilon(1e-13));
    }
    for (int j = 4; j < 6; ++j) CHECK(std::fabs(c6.data[j]) < 1e-13);
}

TEST_CASE("norms and energies") {
    auto b = rdsim::eigenbasis(DomainSpec::interval(2.0, BC::Neumann, 8));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    Field c = coeff_field(1, b.size());
    for (auto& v : c.data) v = U(rng);

    // Parseval: Euclidean coefficient norm equals the collocation L2 norm
    auto vals = rdsim::to_values(b, c);
    double q = 0;
    const double h = 2.0 / b.points();
    for (double v : vals.data) q += v * v;
    CHECK(rdsim::l2_norm(c) == doctest::Approx(std::sqrt(h * q)).epsilon(1e-12));

    auto E = rdsim::mode_energies(c);
    REQUIRE((int)E.size() == b.size());
    for (int k = 0; k < b.size(); ++k)
        CHECK(E[k] == doctest::Approx(c.data[k] * c.data[k]).epsilon(1e-15));

    // sup norm of a constant field is the constant
    Field cc;
    cc.rep = Field::Rep::Collocation;
    cc.components = 1;
    cc.data.assign(b.points(), -0.37);
    CHECK(rdsim::sup_norm(b, cc) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("constant mode is invariant under pure Neumann diffusion") {
    auto dom = DomainSpec::interval(kPi, BC::Neumann, 6);
    auto b = rdsim::eigenbasis(dom);
    stability::RDSpec spec{DenseMatrix(1, {0.0}), {1.0}, 0.6};
    Field u0;
    u0.rep = Field::Rep::Collocation;
    u0.components = 1;
    u0.data.assign(b.points(), 0.37);
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(3.0, 60));
    CHECK(!traj.truncated);
    for (auto& st : traj.states)
        for (int k = 0; k < b.size(); ++k) {
            const double want = k == 0 ? 0.37 * std::sqrt(kPi) : 0.0;
            CHECK(std::fabs(st.at(0, k) - want) < 1e-12);
        }
}

TEST_CASE("single Dirichlet mode follows the scalar Mittag-Leffler decay") {
    const double alpha = 0.5;
    auto dom = DomainSpec::interval(kPi, BC::Dirichlet, 8);
    auto b = rdsim::eigenbasis(dom);
    stability::RDSpec spec{DenseMatrix(1, {0.0}), {1.0}, alpha};
    Field u0;
    u0.rep = Field::Rep::Collocation;
    u0.components = 1;
    u0.data.resize(b.points());
    for (int p = 0; p < b.points(); ++p) u0.data[p] = std::sin(b.xs[p]);
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(4.0, 40));
    const double c0 = std::sqrt(kPi / 2.0); // coefficient of the normalized sine
    double worst = 0, leak = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto m = specfun::ml(alpha, 1.0, -std::pow(traj.times[i], alpha));
        worst = std::max(worst, std::abs(traj.states[i].at(0, 0) - c0 * m.value.real()));
        for (int k = 1; k < b.size(); ++k)
            leak = std::max(leak, std::fabs(traj.states[i].at(0, k)));
    }
    CHECK(worst < 1e-9);
    CHECK(leak < 1e-10);
}

TEST_CASE("rectangle single mode decays with its tensor eigenvalue") {
    const double alpha = 0.5;
    auto dom = DomainSpec::rectangle(kPi, 2.0, BC::Neumann, 4);
    auto b = rdsim::eigenbasis(dom);
    int kc = -1;
    for (int k = 0; k < b.size(); ++k)
        if (b.modes[k].kx == 1 && b.modes[k].ky == 0) kc = k;
    REQUIRE(kc >= 0);
    const double mu = b.modes[kc].mu;
    CHECK(mu == doctest::Approx(1.0).epsilon(1e-13));

    stability::RDSpec spec{DenseMatrix(1, {0.0}), {1.0}, alpha};
    Field u0 = coeff_field(1, b.size());
    u0.data[kc] = 0.8;
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(2.0, 25));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double want =
            0.8 * specfun::ml(alpha, 1.0, -mu * std::pow(traj.times[i], alpha)).value.real();
        CHECK(traj.states[i].at(0, kc) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("nonlinear path: spatially constant field reduces to the scalar ODE") {
    const double alpha = 0.7;
    auto dom = DomainSpec::interval(2.0, BC::Neumann, 5);
    auto b = rdsim::eigenbasis(dom);
    auto g = [](const std::vector<double>& v) {
        return std::vector<double>{v[0] - v[0] * v[0] * v[0]};
    };
    Field u0;
    u0.rep = Field::Rep::Collocation;
    u0.components = 1;
    u0.data.assign(b.points(), 0.1);
    auto grid = fode::TimeGrid::uniform(2.0, 400);
    auto traj = rdsim::simulate_nonlinear_rd(alpha, g, {1.0}, dom, u0, grid);
    auto ode = fode::solve_nonlinear(alpha, g, {0.1}, grid);
    double worst = 0, spat = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const int j = (int)std::lround(traj.times[i] / 2.0 * 400);
        worst = std::max(worst,
                         std::fabs(traj.states[i].at(0, 0) / std::sqrt(2.0) - ode.states[j][0]));
        for (int k = 1; k < b.size(); ++k) spat = std::max(spat, std::fabs(traj.states[i].at(0, k)));
    }
    CHECK(worst < 1e-8);
    CHECK(spat < 1e-10);
}

TEST_CASE("nonlinear path with g = 0 matches the linear simulator") {
    const double alpha = 0.6;
    auto dom = DomainSpec::interval(kPi, BC::Neumann, 6);
    auto b = rdsim::eigenbasis(dom);
    Field u0;
    u0.rep = Field::Rep::Collocation;
    u0.components = 1;
    u0.data.resize(b.points());
    for (int p = 0; p < b.points(); ++p)
        u0.data[p] = 0.3 + std::cos(b.xs[p]) - 0.2 * std::cos(2 * b.xs[p]);
    auto grid = fode::TimeGrid::uniform(1.5, 300);
    stability::RDSpec spec{DenseMatrix(1, {0.0}), {0.8}, alpha};
    auto lin = rdsim::simulate_linear_rd(spec, dom, u0, grid);
    auto g0 = [](const std::vector<double>& v) { return std::vector<double>(v.size(), 0.0); };
    auto non = rdsim::simulate_nonlinear_rd(alpha, g0, {0.8}, dom, u0, grid);
    REQUIRE(lin.times.size() == non.times.size());
    double worst = 0;
    for (std::size_t i = 0; i < lin.times.size(); ++i)
        for (int k = 0; k < b.size(); ++k)
            worst = std::max(worst, std::fabs(lin.states[i].at(0, k) - non.states[i].at(0, k)));
    CHECK(worst < 2e-3);

    // mass conservation: with no reaction the mean (mode 0) never moves,
    // PECE time-stepping included
    const double m0 = non.states.front().at(0, 0);
    for (auto& st : non.states) CHECK(std::fabs(st.at(0, 0) - m0) < 1e-12);
}

TEST_CASE("rate fitting") {
    std::vector<double> t, n1, n2;
    for (int i = 0; i < 200; ++i) {
        const double ti = 1.0 + 0.05 * i;
        t.push_back(ti);
        n1.push_back(std::pow(ti, -0.5));
        n2.push_back(std::exp(0.3 * ti));
    }
    CHECK(rdsim::fit_rate(t, n1, 1.0, 11.0, rdsim::RateKind::AlgebraicDecay) ==
          doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(rdsim::fit_rate(t, n2, 1.0, 11.0, rdsim::RateKind::ExponentialGrowth) ==
          doctest::Approx(0.3).epsilon(1e-6));

    auto fit = rdsim::fit_rate_detail(t, n1, 1.0, 11.0, rdsim::RateKind::AlgebraicDecay);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.nodes_used == 200);

    // windows with fewer than 10 usable nodes refuse to fit
    CHECK_THROWS_AS(rdsim::fit_rate(t, n1, 1.0, 1.2, rdsim::RateKind::AlgebraicDecay),
                    InsufficientData);

    // noise lowers r^2 but not below a sane floor here
    std::mt19937 rng(11);
    std::normal_distribution<double> N(0.0, 0.02);
    auto noisy = n1;
    for (auto& v : noisy) v *= std::exp(N(rng));
    auto nf = rdsim::fit_rate_detail(t, noisy, 1.0, 11.0, rdsim::RateKind::AlgebraicDecay);
    CHECK(nf.r_squared < 1.0);
    CHECK(nf.r_squared > 0.9);
    CHECK(nf.value == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("fitting the Mittag-Leffler tail recovers -alpha") {
    const double alpha = 0.5;
    std::vector<double> t, n;
    for (int i = 0; i < 400; ++i) {
        const double ti = std::pow(10.0, 1.9 + 2.2 * i / 399.0);
        t.push_back(ti);
        n.push_back(std::abs(specfun::ml(alpha, 1.0, -std::pow(ti, alpha)).value));
    }
    const double s = rdsim::fit_rate(t, n, 1e2, 1e4, rdsim::RateKind::AlgebraicDecay);
    CHECK(s == doctest::Approx(-alpha).epsilon(0.05));
}

TEST_CASE("unstable Turing mode grows at the spectral rate") {
    const double alpha = 0.8;
    stability::RDSpec spec{DenseMatrix(2, {1.0, -2.0, 1.5, -2.0}), {0.05, 1.0}, alpha};
    auto dom = DomainSpec::interval(kPi, BC::Neumann, 12);
    auto b = rdsim::eigenbasis(dom);
    const int kc = 3; // mu = 9, inside the unstable window
    auto sp = linalg::eig(stability::mode_matrix(spec, b.modes[kc].mu));
    const double lmax = sp.eigenvalues[0].real();
    REQUIRE(lmax > 0.0);
    Field u0 = coeff_field(2, b.size());
    u0.at(0, kc) = 1e-3 * sp.vec(0, 0).real();
    u0.at(1, kc) = 1e-3 * sp.vec(1, 0).real();
    const double rate = std::pow(lmax, 1.0 / alpha);
    const double t1 = 10.0 / rate;
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(t1, 400));
    std::vector<double> tt, nn;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        tt.push_back(traj.times[i]);
        nn.push_back(std::hypot(traj.states[i].at(0, kc), traj.states[i].at(1, kc)));
    }
    const double fitted = rdsim::fit_rate(tt, nn, 6.0 / rate, t1, rdsim::RateKind::ExponentialGrowth);
    CHECK(std::fabs(fitted - rate) / rate < 0.03);

    double leak = 0;
    for (auto& st : traj.states)
        for (int k = 0; k < b.size(); ++k) {
            if (k == kc) continue;
            leak = std::max(leak, std::hypot(st.at(0, k), st.at(1, k)));
        }
    CHECK(leak < 1e-10);
}

TEST_CASE("stable diffusion mode decays algebraically with exponent -alpha") {
    const double alpha = 0.6;
    stability::RDSpec spec{DenseMatrix(1, {0.0}), {1.0}, alpha};
    auto dom = DomainSpec::interval(kPi, BC::Neumann, 4);
    Field u0 = coeff_field(1, rdsim::eigenbasis(dom).size());
    u0.data[2] = 1.0; // mu = 4
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(2000.0, 400));
    const double s = rdsim::fit_rate(traj, 100.0, 2000.0, rdsim::RateKind::AlgebraicDecay);
    CHECK(std::fabs(s + alpha) < 0.05 * alpha);
}

TEST_CASE("blow-up truncates the trajectory instead of throwing") {
    stability::RDSpec spec{DenseMatrix(1, {5.0}), {1e-3}, 0.8};
    auto dom = DomainSpec::interval(1.0, BC::Neumann, 2);
    Field u0 = coeff_field(1, 2);
    u0.data = {1.0, 0.0};
    rdsim::SimOptions o;
    o.blowup_ceiling = 1e6;
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(200.0, 100), o);
    CHECK(traj.truncated);
    CHECK(traj.states.size() < 101);
    CHECK(traj.times.size() == traj.states.size());
}

TEST_CASE("output thinning keeps every n-th node plus the endpoint") {
    stability::RDSpec spec{DenseMatrix(1, {0.0}), {1.0}, 0.5};
    auto dom = DomainSpec::interval(1.0, BC::Neumann, 2);
    Field u0 = coeff_field(1, 2);
    u0.data = {1.0, 0.5};
    rdsim::SimOptions o;
    o.output_every = 7;
    auto traj = rdsim::simulate_linear_rd(spec, dom, u0, fode::TimeGrid::uniform(1.0, 100), o);
    CHECK(traj.times.size() == 16); // 0,7,...,98 plus 100
    CHECK(traj.times.back() == 1.0);

    // thinning applies to the nonlinear driver too
    auto g0 = [](const std::vector<double>& v) { return std::vector<double>(v.size(), 0.0); };
    auto nt = rdsim::simulate_nonlinear_rd(0.5, g0, {1.0}, dom, u0,
                                           fode::TimeGrid::uniform(1.0, 100), o);
    CHECK(nt.times.size() == 16);
    CHECK(nt.times.back() == 1.0);
}
