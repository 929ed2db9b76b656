// operators.hpp — truncated boson / qubit algebra on the TLS (x) RC space.
//
// Ordering convention: the TLS is always the left (slow) Kronecker factor,
// so index = tls * M + fock.

#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "sbrc/errors.hpp"

namespace sbrc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx I{0.0, 1.0};

enum class Space { tls, rc, tls_rc };

const char* to_string(Space s);

// Square, Hermitian, unit-trace matrix tagged with the space it lives on.
// Construction checks hermiticity (1e-10 entrywise) and trace (1e-9);
// positivity is checked separately because the RC master equation is not
// of Lindblad form.
class DensityMatrix {
public:
    static constexpr double kHermiticityTol = 1e-10;
    static constexpr double kTraceTol = 1e-9;

    DensityMatrix(Matrix entries, Space space);

    // Skips the invariant checks. Used for intermediate results whose
    // invariants are verified by the caller.
    static DensityMatrix unchecked(Matrix entries, Space space);

    const Matrix& matrix() const noexcept { return m_; }
    Space space() const noexcept { return space_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    double min_eigenvalue() const;

    // Empty (0 x 0) placeholder, e.g. for result records filled later.
    DensityMatrix() = default;

private:
    Matrix m_;
    Space space_ = Space::tls;
};

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // columns are eigenvectors
};

// Max entrywise |H - H^dagger|.
double hermiticity_defect(const Matrix& h);

Matrix annihilator(int M);
Matrix identity(Eigen::Index n);

enum class PauliAxis { x, y, z };
// sigma_z = |1><1| - |2><2| with |1> the first basis vector.
Matrix pauli(PauliAxis which);

// Kronecker product, A is the slow index.
Matrix tensor(const Matrix& a, const Matrix& b);

// Reduced state on the kept factor of a 2 x M bipartition.
DensityMatrix partial_trace(const DensityMatrix& rho, Space keep);
Matrix partial_trace(const Matrix& rho, Space keep);

// Ascending eigenvalues. Each eigenvector's first component with modulus
// above 1e-12 is rotated to be real and positive, which fixes the phase.
EigenDecomposition eig_hermitian(const Matrix& h);

// V f(Lambda) V^dagger.
Matrix hermitian_function(const Matrix& h, const std::function<cplx(double)>& f);
Matrix hermitian_function(const EigenDecomposition& eig, const std::function<cplx(double)>& f);

// Von Neumann entropy with natural log; eigenvalues within [-1e-9, 1+1e-9]
// are clipped into [0, 1], anything further out throws.
double entropy(const DensityMatrix& rho);
double entropy(const Matrix& rho);

// Half the trace norm of the difference.
double trace_distance(const Matrix& a, const Matrix& b);

// Entropy of a matrix that may have (slightly) negative eigenvalues, as the
// RC master equation produces: negative eigenvalues are set to zero and the
// rest renormalised. `negative_weight` is the discarded |sum of negatives|.
struct ClippedEntropy {
    double value = 0.0;
    double negative_weight = 0.0;
};
ClippedEntropy entropy_clipped(const Matrix& rho);

}  // namespace sbrc
