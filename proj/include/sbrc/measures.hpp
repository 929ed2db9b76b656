// measures.hpp — RC non-Gaussianity, TLS-RC mutual information, thermal
// states and TLS eigenbasis observables.

#pragma once

#include <Eigen/Dense>

#include "sbrc/core.hpp"
#include "sbrc/operators.hpp"

namespace sbrc {

// First and second moments of R = (x, p), x = (a + a^dag)/sqrt2,
// p = i (a^dag - a)/sqrt2, with cov_ij = <{dR_i, dR_j}>/2 (vacuum = 1/2).
struct GaussianMoments {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Identity() * 0.5;
};

// Exact moments of the truncated state: operators are built one Fock level
// larger than the state so that x^2 and p^2 are not clipped at the top level.
GaussianMoments moments(const Matrix& rho_rc);
GaussianMoments moments(const DensityMatrix& rho_rc);

// Entropy of the single-mode Gaussian state with these moments.
// Throws InvalidMomentsError when det(cov) < 1/4 - 1e-6.
double gaussian_entropy(const GaussianMoments& m);

// S(moment-matched Gaussian) - S(rho); zero iff rho is Gaussian.
double non_gaussianity(const Matrix& rho_rc);
double non_gaussianity(const DensityMatrix& rho_rc);

// Population of the two highest Fock levels. Above this threshold the
// second moments are truncation-sensitive and results carry a warning.
inline constexpr double kTruncationWarningWeight = 1e-6;
double top_fock_weight(const Matrix& rho_rc);

// S(rho_s) + S(rho_RC) - S(rho), clipped at 0.
double mutual_information(const Matrix& rho);
double mutual_information(const DensityMatrix& rho);

// QMI and RC non-Gaussianity of a TLS (x) RC state along a trajectory. The
// RC master equation is not completely positive, so transient states can
// carry negative eigenvalues; entropies here use entropy_clipped and the
// discarded weight is reported. Steady and thermal states go through the
// strict functions above.
struct StateMeasures {
    double qmi = 0.0;
    double nongauss = 0.0;       // NaN when the RC moments violate the uncertainty relation
    double negative_weight = 0.0;  // largest discarded weight of the three spectra
    double top_fock_weight = 0.0;
};
StateMeasures state_measures(const Matrix& rho);

// exp(-beta H)/Z, with the ground energy subtracted before exponentiating.
DensityMatrix thermal_state(const Matrix& h, double beta, Space space);

class RatioOverflowError : public SolverError {
public:
    using SolverError::SolverError;
};

struct EigenbasisObservables {
    double ratio = 1.0;      // rho_gg / rho_ee
    double ln_ratio = 0.0;
    cplx coherence = 0.0;    // rho_ge
};

// rho_s in the eigenbasis of H_S (phase convention of eig_hermitian).
// Throws RatioOverflowError when rho_ee < 1e-300.
EigenbasisObservables eigenbasis_observables(const Matrix& rho_s, const SpinBosonParams& params);
EigenbasisObservables eigenbasis_observables(const DensityMatrix& rho_s, const SpinBosonParams& params);

}  // namespace sbrc
