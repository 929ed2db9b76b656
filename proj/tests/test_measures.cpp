#include <doctest.h>

#include <cmath>
#include <random>

#include "sbrc/integrator.hpp"
#include "sbrc/mapping.hpp"
#include "sbrc/measures.hpp"
#include "sbrc/rcme.hpp"
#include "sbrc/weak.hpp"

using namespace sbrc;
using doctest::Approx;

namespace {

Matrix fock(int M, int n) {
    Matrix m = Matrix::Zero(M, M);
    m(n, n) = 1;
    return m;
}

Matrix thermal_rc(int M, double nbar) {
    Matrix m = Matrix::Zero(M, M);
    const double q = nbar / (1 + nbar);
    double z = 0;
    for (int k = 0; k < M; ++k) z += std::pow(q, k);
    for (int k = 0; k < M; ++k) m(k, k) = std::pow(q, k) / z;
    return m;
}

Matrix coherent(int M, cplx amp) {
    Vector v(M);
    double f = 1;
    for (int k = 0; k < M; ++k) {
        if (k > 0) f *= std::sqrt(double(k));
        v(k) = std::exp(-std::norm(amp) / 2) * std::pow(amp, k) / f;
    }
    v.normalize();
    return v * v.adjoint();
}

double von_neumann(const Matrix& r) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    double s = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-300) s -= p * std::log(p);
    }
    return s;
}

}  // namespace

TEST_CASE("moments") {
    const auto v = moments(fock(6, 0));
    CHECK(v.mean.norm() < 1e-15);
    CHECK((v.cov - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-14);
    const auto f = moments(fock(6, 1));
    CHECK((f.cov - 1.5 * Eigen::Matrix2d::Identity()).norm() < 1e-14);
    const auto t = moments(thermal_rc(60, 0.5));
    CHECK((t.cov - 1.0 * Eigen::Matrix2d::Identity()).norm() < 1e-9);
}

TEST_CASE("gaussian entropy") {
    GaussianMoments m;
    CHECK(gaussian_entropy(m) == 0.0);
    m.cov = 1.5 * Eigen::Matrix2d::Identity();
    CHECK(gaussian_entropy(m) == Approx(1.3862944).epsilon(1e-7));
    const Matrix th = thermal_rc(40, 0.5);
    CHECK(std::abs(gaussian_entropy(moments(th)) - entropy(th)) < 1e-6);
    m.cov = 0.3 * Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(gaussian_entropy(m), InvalidMomentsError);
}

TEST_CASE("non-Gaussianity") {
    CHECK(non_gaussianity(thermal_rc(40, 0.7)) < 1e-7);
    CHECK(non_gaussianity(fock(6, 1)) == Approx(2 * std::log(2.0)).epsilon(1e-6));
    CHECK(non_gaussianity(coherent(40, 1.0)) < 1e-5);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 30; ++k) {
        Matrix d = Matrix::Zero(8, 8);
        double z = 0;
        for (int i = 0; i < 8; ++i) {
            d(i, i) = u(rng);
            z += d(i, i).real();
        }
        CHECK(non_gaussianity(Matrix(d / z)) >= 0.0);
    }
}

TEST_CASE("non-Gaussianity is invariant under Gaussian unitaries") {
    const int M = 60;
    Matrix rho = Matrix::Zero(M, M);
    rho(0, 0) = 0.7;
    rho(1, 1) = 0.3;
    rho(0, 1) = rho(1, 0) = 0.2;
    const Matrix a = annihilator(M);
    // squeezing plus displacement, small enough to stay inside the truncation
    const Matrix gen = 0.15 * (a * a - a.adjoint() * a.adjoint()) + 0.3 * (a.adjoint() - a);
    const Matrix u = expm(gen);
    const Matrix moved = u * rho * u.adjoint();
    CHECK(std::abs(non_gaussianity(Matrix(0.5 * (moved + moved.adjoint()))) - non_gaussianity(rho)) < 1e-8);
}

TEST_CASE("mutual information") {
    CHECK(mutual_information(tensor(Matrix(0.5 * Matrix::Identity(2, 2)), thermal_rc(4, 0.3))) < 1e-9);
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1 / std::sqrt(2.0);
    CHECK(mutual_information(Matrix(bell * bell.adjoint())) == Approx(1.3862944).epsilon(1e-7));
    std::mt19937 rng(12);
    std::normal_distribution<double> g;
    for (int k = 0; k < 30; ++k) {
        Matrix x(10, 10);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) x(i, j) = cplx(g(rng), g(rng));
        Matrix r = x * x.adjoint();
        r /= r.trace().real();
        const double q = mutual_information(r);
        CHECK(q >= 0.0);
        CHECK(q <= 2 * std::log(2.0) + 1e-9);
    }
}

TEST_CASE("mutual information of the H0 thermal state matches an independent evaluation") {
    const auto p = SpinBosonParams::from_pi_alpha(0.5, 0.1, 0.05, 0.95);
    const auto m = map_to_rc(p, 100);
    REQUIRE(m.lambda == Approx(0.5));
    const int M = 24;
    // independent pipeline: real symmetric H0, dense exponential, explicit traces
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < M; ++k) {
            const int i = s * M + k;
            const double sz = s == 0 ? 1 : -1;
            h(i, i) = 0.25 * sz + 5.0 * k;
            h(i, (1 - s) * M + k) = 0.5;
            if (k + 1 < M) h(i, i + 1) = h(i + 1, i) = 0.5 * sz * std::sqrt(k + 1.0);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXd w = (-p.beta * (es.eigenvalues().array() - es.eigenvalues()(0))).exp();
    w /= w.sum();
    const Eigen::MatrixXd rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd rs = Eigen::MatrixXd::Zero(2, 2), rr = Eigen::MatrixXd::Zero(M, M);
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            for (int k = 0; k < M; ++k) rs(s, t) += rho(s * M + k, t * M + k);
    for (int s = 0; s < 2; ++s) rr += rho.block(s * M, s * M, M, M);
    const double ref = von_neumann(rs.cast<cplx>()) + von_neumann(rr.cast<cplx>()) -
                       (-(w.array() * w.array().max(1e-300).log()).sum());

    const auto th = thermal_state(build_h0(m, p, M), p.beta, Space::tls_rc);
    CHECK(std::abs(mutual_information(th) - ref) < 1e-8);
}

TEST_CASE("thermal states") {
    const Matrix h = 0.25 * pauli(PauliAxis::z) + 0.5 * pauli(PauliAxis::x);
    CHECK((thermal_state(h, 0.0, Space::tls).matrix() - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-15);
    const auto th = thermal_state(h, 1.3, Space::tls);
    CHECK((th.matrix() * h - h * th.matrix()).norm() < 1e-12);

    auto p = SpinBosonParams::from_pi_alpha(0.5, 0.5, 0.05, 0.95);
    auto m = map_to_rc(p, 100);
    m.lambda = 0.0;
    const int M = 5;
    const auto joint = thermal_state(build_h0(m, p, M), p.beta, Space::tls_rc);
    Matrix rc = Matrix::Zero(M, M);
    for (int k = 0; k < M; ++k) rc(k, k) = std::exp(-p.beta * m.Omega * k);
    rc /= rc.trace();
    const Matrix expected = tensor(tls_gibbs(p).matrix(), rc);
    CHECK((joint.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigenbasis observables") {
    const auto p = SpinBosonParams::from_pi_alpha(0.5, 0.5, 0.05, 0.95);
    const auto g = eigenbasis_observables(tls_gibbs(p), p);
    CHECK(g.ratio == Approx(2.8924).epsilon(1e-4));
    CHECK(std::abs(g.coherence) < 1e-14);
    const auto half = eigenbasis_observables(Matrix(0.5 * Matrix::Identity(2, 2)), p);
    CHECK(half.ratio == Approx(1.0));
    CHECK(std::abs(half.coherence) < 1e-15);

    const auto m = map_to_rc(p, 100);
    const auto th = thermal_state(build_h0(m, p, 24), p.beta, Space::tls_rc);
    CHECK(std::abs(eigenbasis_observables(partial_trace(th, Space::tls), p).coherence) > 1e-3);

    const Matrix v = tls_eigenbasis(p);
    const Matrix ground = v.col(0) * v.col(0).adjoint();
    CHECK_THROWS_AS(eigenbasis_observables(ground, p), RatioOverflowError);
}

TEST_CASE("state measures tolerate small negative eigenvalues") {
    Matrix rho = tensor(Matrix(0.5 * Matrix::Identity(2, 2)), fock(4, 0));
    rho(1, 1) += 0.01;
    rho(0, 0) -= 0.01;
    rho(0, 1) = rho(1, 0) = 0.1;  // vacuum/one-photon coherence with tiny population
    const auto m = state_measures(rho);
    CHECK(m.negative_weight > 0.0);
    CHECK(m.qmi >= 0.0);
    CHECK(m.top_fock_weight == Approx(0.0).epsilon(1e-14));
}
