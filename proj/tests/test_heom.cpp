#include <doctest.h>

#include <cmath>
#include <random>

#include "sbrc/heom.hpp"

using namespace sbrc;
using doctest::Approx;

namespace {
SpinBosonParams fig(double pi_alpha) { return SpinBosonParams::from_pi_alpha(0.5, pi_alpha, 0.05, 0.95); }
DensityMatrix site_one() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1;
    return DensityMatrix(m, Space::tls);
}
std::size_t binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<std::size_t>(std::llround(r));
}
}  // namespace

TEST_CASE("Matsubara coefficients") {
    HeomParams hp;
    hp.alpha_h = 0.1;
    hp.K = 3;
    const auto e = matsubara(hp);
    CHECK(e.mu[0] == 0.05);
    CHECK(e.mu[1] == Approx(6.6138793).epsilon(1e-8));
    CHECK(e.c[0].real() == Approx(0.1052434).epsilon(1e-6));
    CHECK(e.c[0].imag() == Approx(-0.0025).epsilon(1e-12));
    CHECK(e.c[1].real() == Approx(0.0015917).epsilon(1e-4));
    CHECK(e.c[1].imag() == 0.0);
    for (int m = 1; m < 3; ++m) CHECK(e.mu[m + 1] > e.mu[m]);
    CHECK(std::abs(e.terminator.imag()) < 1e-14);
    // terminator shrinks as Matsubara terms are added
    HeomParams more = hp;
    more.K = 10;
    CHECK(std::abs(matsubara(more).terminator) < std::abs(e.terminator));
    // pole: beta omega_c = 2 pi
    HeomParams pole = hp;
    pole.beta = 2 * pi / pole.omega_c;
    CHECK_THROWS_AS(matsubara(pole), DegeneracyError);
}

TEST_CASE("hierarchy enumeration") {
    CHECK(Hierarchy::enumerate(0, 3).size() == 1);
    const auto h = Hierarchy::enumerate(2, 1);
    CHECK(h.size() == 6);
    CHECK(Hierarchy::count(2, 1) == 6);
    for (int Nc : {0, 1, 5, 12})
        for (int K : {0, 1, 2, 4}) {
            CHECK(Hierarchy::count(Nc, K) == binomial(Nc + K + 1, K + 1));
            CHECK(Hierarchy::enumerate(Nc, K).size() == Hierarchy::count(Nc, K));
        }
    const auto g = Hierarchy::enumerate(6, 2);
    for (int m = 0; m < 3; ++m) CHECK(g.occupation(0, m) == 0);
    const auto up = g.plus(0, 0);
    REQUIRE(up != Hierarchy::kAbsent);
    CHECK(g.occupation(up, 0) == 1);
    CHECK(g.occupation(up, 1) == 0);
    CHECK(g.tier(up) == 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i > 0) CHECK(g.tier(i) >= g.tier(i - 1));
        for (int m = 0; m < 3; ++m) {
            if (g.plus(i, m) != Hierarchy::kAbsent) CHECK(g.minus(g.plus(i, m), m) == std::int64_t(i));
            if (g.minus(i, m) != Hierarchy::kAbsent) CHECK(g.plus(g.minus(i, m), m) == std::int64_t(i));
            if (g.tier(i) == 6) CHECK(g.plus(i, m) == Hierarchy::kAbsent);
        }
    }
    CHECK_THROWS_AS(Hierarchy::enumerate(40, 8, 1000), CapacityError);
}

TEST_CASE("parallel and serial right-hand sides agree; top trace is conserved") {
    const auto p = fig(1.0);
    const auto h = Hierarchy::enumerate(8, 2);
    const auto e = matsubara(HeomParams::from_spin_boson(p, 2, 8));
    const auto op = make_heom_operator(h, e, p);
    std::mt19937 rng(9);
    std::normal_distribution<double> g;
    std::vector<cplx> in(4 * h.size()), a(in.size()), b(in.size());
    for (auto& x : in) x = cplx(g(rng), g(rng));
    heom_rhs(op, in.data(), a.data());
    heom_rhs_serial(op, in.data(), b.data());
    double diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    CHECK(diff == 0.0);
    // d/dt tr rho_0 = a[0] + a[3] for a 2x2 block in row-major order
    CHECK(std::abs(a[0] + a[3]) <= 1e-12);
}

TEST_CASE("single-index hierarchy is a time-local dissipator") {
    const auto p = fig(0.5);
    const auto hier = Hierarchy::enumerate(0, 0);
    const auto e = matsubara(HeomParams::from_spin_boson(p, 0, 0));
    HierarchyState s(hier);
    Matrix rho(2, 2);
    rho << 0.6, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.4;
    s.set_block(0, rho);
    const Matrix out = heom_rhs(s, e, p).block(0);
    const Matrix q = pauli(PauliAxis::z);
    const Matrix hs = 0.25 * q + 0.5 * pauli(PauliAxis::x);
    const cplx coeff = pi * p.alpha / (p.beta * p.omega_c) - I * pi * p.alpha / 2.0 - e.c[0] / e.mu[0];
    const Matrix qq = q * (q * rho - rho * q) - (q * rho - rho * q) * q;
    const Matrix expected = -I * (hs * rho - rho * hs) - coeff * qq;
    CHECK((out - expected).norm() < 1e-13);
}

TEST_CASE("decoupled HEOM follows the Rabi closed form") {
    SpinBosonParams p = fig(0.0);
    p.epsilon = 0.0;
    const auto grid = TimeGrid::uniform(35, 351);
    const auto run = heom_run(site_one(), grid, p, 1, 3);
    double err = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        err = std::max(err, std::abs(run.states[i](0, 0).real() - std::pow(std::cos(grid[i] / 2), 2)));
    CHECK(err <= 1e-6);
}

TEST_CASE("auxiliary matrices scale linearly with the coupling") {
    const auto grid = TimeGrid::uniform(5, 11);
    auto tier1 = [&](double alpha) {
        SpinBosonParams p = fig(0.0);
        p.alpha = alpha;
        const auto h = Hierarchy::enumerate(3, 1);
        const auto e = matsubara(HeomParams::from_spin_boson(p, 1, 3));
        HierarchyState s(h);
        s.set_block(0, site_one().matrix());
        // one explicit step is enough to populate tier 1 linearly in alpha
        const auto d = heom_rhs(s, e, p);
        double m = 0;
        for (std::size_t i = 0; i < h.size(); ++i)
            if (h.tier(i) == 1) m = std::max(m, d.block(i).norm());
        return m;
    };
    const double slope = std::log(tier1(1e-2) / tier1(1e-3)) / std::log(10.0);
    CHECK(slope == Approx(1.0).epsilon(0.1));
}

TEST_CASE("trajectory invariants and convergence ladder") {
    const auto grid = TimeGrid::uniform(10, 101);
    HeomOptions o;
    o.convergence_tol = 2e-3;
    const auto r = heom_propagate(site_one(), grid, fig(0.5), 0, 4, o);
    CHECK(r.converged);
    CHECK(r.run.max_trace_error <= 1e-9);
    CHECK(r.run.max_hermiticity_defect <= 1e-9);
    CHECK((r.run.states[0].matrix() - site_one().matrix()).norm() == 0.0);
    REQUIRE(r.record.size() >= 2);
    CHECK(r.record.back().change < o.convergence_tol);

    o.convergence_tol = 1e-12;
    o.max_Nc = 8;
    CHECK_THROWS_AS(heom_propagate(site_one(), grid, fig(0.5), 0, 4, o), ConvergenceError);
}

TEST_CASE("weak coupling HEOM steady state is canonical") {
    const auto p = fig(0.02);
    const auto grid = TimeGrid::uniform(8000, 81);
    const auto run = heom_run(site_one(), grid, p, 1, 12);
    const Matrix rho = run.states.back().matrix();
    // compare ln(rho_gg/rho_ee) in the H_S eigenbasis with beta * eta
    const Matrix hs = 0.25 * pauli(PauliAxis::z) + 0.5 * pauli(PauliAxis::x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
    const Matrix r = es.eigenvectors().adjoint() * rho * es.eigenvectors();
    CHECK(std::abs(std::log(r(0, 0).real() / r(1, 1).real()) - p.beta * p.eta()) <= 1e-2);
}
