// rcme.hpp — reaction-coordinate master equation for the TLS (x) RC composite.
//
//   d rho/dt = -i[H0, rho] - [A, [chi, rho]] + [A, {Xi, rho}],   A = a + a^dagger
//
// H0 = (eps/2) sz + (Delta/2) sx + lambda sz A + Omega a^dagger a. The rate
// operators are evaluated in the eigenbasis of H0 with the imaginary Lamb
// shift dropped.

#pragma once

#include <functional>
#include <vector>

#include "sbrc/core.hpp"
#include "sbrc/operators.hpp"
#include "sbrc/superoperator.hpp"

namespace sbrc {

// Largest RC truncation for which the dense (2M)^2 generator is formed.
inline constexpr int kMaxDenseTruncation = 32;

struct RateOperators {
    Matrix chi;                 // Hermitian
    Matrix xi;                  // anti-Hermitian
    Eigen::MatrixXd bohr;       // xi_jk = phi_j - phi_k, eigenbasis of H0
};

// Position operator I_2 (x) (a + a^dagger).
Matrix rc_position(int M);

Matrix build_h0(const MappedParams& mapped, const SpinBosonParams& params, int M);

// Threshold below which a Bohr frequency counts as degenerate, relative to
// max(1, Omega).
inline constexpr double kDegenerateBohrTol = 1e-12;

RateOperators build_rate_operators(const EigenDecomposition& h0, double gamma, double beta, int M,
                                   double omega_scale = 1.0);

Superoperator build_liouvillian(const Matrix& h0, const RateOperators& rates);

// Operator-form generator, O((2M)^3) per application.
Matrix apply_liouvillian(const Matrix& h0, const Matrix& coupling, const RateOperators& rates,
                         const Matrix& rho);

// Everything the RC solver needs for one scenario at one truncation.
struct RcmeModel {
    SpinBosonParams params;
    MappedParams mapped;
    int M = 0;
    Matrix h0;
    Matrix coupling;
    EigenDecomposition h0_eig;
    RateOperators rates;

    static RcmeModel build(const SpinBosonParams& params, const MappedParams& mapped, int M);

    Matrix apply(const Matrix& rho) const { return apply_liouvillian(h0, coupling, rates, rho); }
    bool dense_feasible() const noexcept { return M <= kMaxDenseTruncation; }
    Superoperator liouvillian() const { return build_liouvillian(h0, rates); }
    // Real generator in the Hermitian basis, built column by column from apply().
    RealMatrix hermitian_liouvillian() const;
};

// |1><1| (x) Gibbs(Omega a^dagger a, beta), normalised within the truncation.
DensityMatrix rcme_initial_state(const MappedParams& mapped, double beta, int M);

// Dense exponential stepping when the truncation allows it, otherwise the
// matrix-free adaptive integrator.
Trajectory rcme_propagate(const RcmeModel& model, const DensityMatrix& rho0, const TimeGrid& grid,
                          const PropagationOptions& opts = {});

DensityMatrix rcme_steady_state(const RcmeModel& model, SteadyStateInfo* info = nullptr);

// <1|rho_s|1> for each state of a TLS (x) RC trajectory.
std::vector<double> tls_population(const Trajectory& traj);

// Maps a TLS (x) RC trajectory to a time series whose convergence is tested.
using TrajectoryObservable = std::function<std::vector<double>(const Trajectory&)>;

struct TruncationStep {
    int M = 0;
    double change = 0.0;  // max_t |obs(M) - obs(2M)|; NaN for the last M tried
};

struct TruncationResult {
    int M = 0;
    std::vector<TruncationStep> record;
    Trajectory trajectory;  // the run at M
    bool converged = true;
};

struct TruncationOptions {
    double tol = 1e-3;
    int first_M = 4;
    int max_M = 256;
    PropagationOptions propagation;
    // Return the run at the largest M (converged = false) instead of throwing
    // when max_M is reached.
    bool accept_unconverged = false;
};

// Smallest M in first_M, 2 first_M, ... whose observable changes by < tol
// when M doubles. Throws ConvergenceError when max_M is reached.
TruncationResult converge_truncation(const SpinBosonParams& params, const MappedParams& mapped,
                                     const TimeGrid& grid, const TruncationOptions& opts = {},
                                     const TrajectoryObservable& observable = tls_population);

// Steady-state analogue of converge_truncation: doubles M until the steady
// state's observable (default: entries of the reduced TLS state, QMI and RC
// non-Gaussianity) moves by < tol. Needs the dense generator, so M beyond
// kMaxDenseTruncation throws CapacityError.
using SteadyObservable = std::function<std::vector<double>(const DensityMatrix&)>;
std::vector<double> default_steady_observable(const DensityMatrix& rho);

struct SteadyTruncationResult {
    int M = 0;
    std::vector<TruncationStep> record;
    DensityMatrix state;  // steady state at M
    SteadyStateInfo info;
};

SteadyTruncationResult converge_steady_truncation(const SpinBosonParams& params, const MappedParams& mapped,
                                                  double tol = 1e-3, int first_M = 4,
                                                  const SteadyObservable& observable = default_steady_observable);

}  // namespace sbrc
