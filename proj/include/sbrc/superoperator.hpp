// superoperator.hpp — dense Liouville-space generators, propagation and
// kernel extraction shared by the RC and weak-coupling solvers.
//
// Density matrices are vectorized column-major: vec(rho)[i + n*j] = rho(i, j),
// so vec(A X B) = (B^T (x) A) vec(X).

#pragma once

#include <functional>
#include <vector>

#include "sbrc/core.hpp"
#include "sbrc/integrator.hpp"
#include "sbrc/operators.hpp"

namespace sbrc {

class Superoperator {
public:
    Superoperator() = default;
    explicit Superoperator(Matrix entries);

    Eigen::Index hilbert_dim() const noexcept { return n_; }
    Eigen::Index dim() const noexcept { return entries_.rows(); }
    const Matrix& matrix() const noexcept { return entries_; }

    Matrix apply(const Matrix& rho) const;

private:
    Matrix entries_;
    Eigen::Index n_ = 0;
};

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, Eigen::Index n);

// Coordinates in the orthonormal Hermitian basis {E_ii, (E_ij + E_ji)/sqrt2,
// i(E_ij - E_ji)/sqrt2}, laid out like vec: y[i + n*j] is rho_ii on the
// diagonal, sqrt2 Re rho_ij above it (i < j) and sqrt2 Im rho_ji below it.
// A Hermiticity-preserving generator is a real matrix in this basis, which
// halves memory and quarters the cost of dense exponentials and SVDs.
RealVector hermitian_coordinates(const Matrix& rho);
Matrix from_hermitian_coordinates(const RealVector& y, Eigen::Index n);

// Left/right multiplication superoperators: vec(A X) and vec(X B).
Matrix left_multiplication(const Matrix& a);
Matrix right_multiplication(const Matrix& b);

// A function rho -> d rho / dt applied without forming the dense matrix.
using OperatorGenerator = std::function<Matrix(const Matrix& rho)>;

// Real matrix of L in the Hermitian basis. Throws ArgumentError when L does
// not map Hermitian matrices to Hermitian matrices (1e-10 relative).
RealMatrix hermitian_representation(const Superoperator& L);
RealMatrix hermitian_representation(const OperatorGenerator& L, Eigen::Index n);

enum class PropagationMethod {
    adaptive,     // Dormand-Prince 5(4), error-controlled
    exponential,  // exact exp(L dt) of the dense generator
};

struct PropagationOptions {
    double tol = 1e-8;  // local relative tolerance of the adaptive scheme
    PropagationMethod method = PropagationMethod::adaptive;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    double max_trace_error = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = 1.0;
    IntegratorStats stats;
};

// Output states must keep |tr - 1| and the hermiticity defect below this;
// violations throw IntegrationError.
inline constexpr double kTrajectoryInvariantTol = 1e-9;

Trajectory propagate(const Superoperator& L, const DensityMatrix& rho0, const TimeGrid& grid,
                     const PropagationOptions& opts = {});

// Exact exponential propagation of a generator given in the Hermitian basis.
Trajectory propagate_hermitian(const RealMatrix& L, const DensityMatrix& rho0, const TimeGrid& grid);

// Matrix-free variant; only PropagationMethod::adaptive is available.
Trajectory propagate(const OperatorGenerator& L, const DensityMatrix& rho0, const TimeGrid& grid,
                     const PropagationOptions& opts = {});

struct SteadyStateInfo {
    double relaxation_gap = 0.0;  // smallest nonzero |eigenvalue| of L (estimate)
    double scale = 0.0;           // largest entry of the balanced bordered matrix
};

// Unit-trace Hermitian kernel element of L. Solves the bordered system
// (L + u tr^T) x = u after diagonal balancing, by LU. The RC generators are
// strongly non-normal: their second smallest singular value falls far below
// the relaxation gap as M grows, so neither an SVD kernel nor an SVD rank test
// is reliable there. Degeneracy is instead judged from the spectrum: throws
// DegeneracyError when the smallest nonzero |eigenvalue| (inverse iteration)
// is below 1e-10 times the scale of the balanced matrix.
DensityMatrix steady_state(const Superoperator& L, Space space, SteadyStateInfo* info = nullptr);
DensityMatrix steady_state_hermitian(const RealMatrix& L, Space space, SteadyStateInfo* info = nullptr);

// Osborne balancing in place: a <- D^-1 a D. Returns diag(D).
RealVector balance(RealMatrix& a, int sweeps = 20);

}  // namespace sbrc
