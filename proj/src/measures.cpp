#include "sbrc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sbrc/weak.hpp"

namespace sbrc {

GaussianMoments moments(const Matrix& rho_rc) {
    const Eigen::Index M = rho_rc.rows();
    if (M < 1 || rho_rc.cols() != M) throw ArgumentError("moments: RC state must be square");
    Matrix rho = Matrix::Zero(M + 1, M + 1);
    rho.topLeftCorner(M, M) = rho_rc;
    const Matrix a = annihilator(static_cast<int>(M + 1));
    const double s = 1.0 / std::sqrt(2.0);
    const Matrix x = s * (a + a.adjoint());
    const Matrix p = s * I * (a.adjoint() - a);

    auto expect = [&](const Matrix& op) { return (rho * op).trace().real(); };
    GaussianMoments g;
    g.mean << expect(x), expect(p);
    const double xx = expect(x * x), pp = expect(p * p);
    const double xp = 0.5 * expect(x * p + p * x);
    g.cov << xx - g.mean(0) * g.mean(0), xp - g.mean(0) * g.mean(1),
        xp - g.mean(0) * g.mean(1), pp - g.mean(1) * g.mean(1);
    return g;
}

GaussianMoments moments(const DensityMatrix& rho_rc) { return moments(rho_rc.matrix()); }

double gaussian_entropy(const GaussianMoments& m) {
    const double det = m.cov.determinant();
    if (det < 0.25 - 1e-6)
        throw InvalidMomentsError("gaussian_entropy: det(cov) = " + std::to_string(det) +
                                  " violates the uncertainty relation");
    const double nu = std::max(0.5, std::sqrt(std::max(det, 0.0)));
    const double up = nu + 0.5, down = nu - 0.5;
    double s = up * std::log(up);
    if (down > 0) s -= down * std::log(down);
    return s;
}

double non_gaussianity(const Matrix& rho_rc) {
    const double d = gaussian_entropy(moments(rho_rc)) - entropy(rho_rc);
    if (d < -1e-8)
        throw InvalidMomentsError("non_gaussianity: negative value " + std::to_string(d));
    return std::max(d, 0.0);
}

double non_gaussianity(const DensityMatrix& rho_rc) { return non_gaussianity(rho_rc.matrix()); }

double top_fock_weight(const Matrix& rho_rc) {
    const Eigen::Index M = rho_rc.rows();
    double w = rho_rc(M - 1, M - 1).real();
    if (M >= 2) w += rho_rc(M - 2, M - 2).real();
    return w;
}

double mutual_information(const Matrix& rho) {
    const double s = entropy(partial_trace(rho, Space::tls)) + entropy(partial_trace(rho, Space::rc)) -
                     entropy(rho);
    return std::max(s, 0.0);
}

double mutual_information(const DensityMatrix& rho) {
    if (rho.space() != Space::tls_rc)
        throw ArgumentError("mutual_information: state must live on TLS(x)RC");
    return mutual_information(rho.matrix());
}

StateMeasures state_measures(const Matrix& rho) {
    const Matrix rs = partial_trace(rho, Space::tls);
    const Matrix rr = partial_trace(rho, Space::rc);
    const ClippedEntropy sj = entropy_clipped(rho), ss = entropy_clipped(rs), sr = entropy_clipped(rr);
    StateMeasures m;
    m.qmi = std::max(0.0, ss.value + sr.value - sj.value);
    m.negative_weight = std::max({sj.negative_weight, ss.negative_weight, sr.negative_weight});
    m.top_fock_weight = top_fock_weight(rr);
    try {
        m.nongauss = std::max(0.0, gaussian_entropy(moments(rr)) - sr.value);
    } catch (const InvalidMomentsError&) {
        m.nongauss = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

DensityMatrix thermal_state(const Matrix& h, double beta, Space space) {
    if (!(beta >= 0)) throw ArgumentError("thermal_state: beta must be >= 0");
    const auto eig = eig_hermitian(h);
    const double e0 = eig.values(0);
    Matrix rho = hermitian_function(eig, [&](double e) { return cplx(std::exp(-beta * (e - e0))); });
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()), space);
}

EigenbasisObservables eigenbasis_observables(const Matrix& rho_s, const SpinBosonParams& params) {
    if (rho_s.rows() != 2 || rho_s.cols() != 2)
        throw ArgumentError("eigenbasis_observables: TLS state must be 2x2");
    const Matrix v = tls_eigenbasis(params);
    const Matrix r = v.adjoint() * rho_s * v;
    const double gg = r(0, 0).real(), ee = r(1, 1).real();
    if (ee < 1e-300) throw RatioOverflowError("eigenbasis_observables: excited population vanishes");
    EigenbasisObservables out;
    out.ratio = gg / ee;
    out.ln_ratio = std::log(gg) - std::log(ee);
    out.coherence = r(0, 1);
    return out;
}

EigenbasisObservables eigenbasis_observables(const DensityMatrix& rho_s, const SpinBosonParams& params) {
    return eigenbasis_observables(rho_s.matrix(), params);
}

}  // namespace sbrc
