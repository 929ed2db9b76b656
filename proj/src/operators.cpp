#include "sbrc/operators.hpp"

#include <algorithm>
#include <cmath>

namespace sbrc {

const char* to_string(Space s) {
    switch (s) {
        case Space::tls: return "TLS";
        case Space::rc: return "RC";
        case Space::tls_rc: return "TLS(x)RC";
    }
    return "?";
}

double hermiticity_defect(const Matrix& h) {
    if (h.rows() != h.cols()) throw ArgumentError("hermiticity_defect: matrix not square");
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Matrix entries, Space space) : m_(std::move(entries)), space_(space) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
        throw ArgumentError("DensityMatrix: entries must be a non-empty square matrix");
    if (space_ == Space::tls && m_.rows() != 2)
        throw ArgumentError("DensityMatrix: TLS state must be 2x2");
    if (space_ == Space::tls_rc && m_.rows() % 2 != 0)
        throw ArgumentError("DensityMatrix: TLS(x)RC dimension must be even");
    const double herm = hermiticity_defect(m_);
    if (herm > kHermiticityTol)
        throw ArgumentError("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
    const double tr_err = std::abs(m_.trace() - cplx(1.0));
    if (tr_err > kTraceTol)
        throw ArgumentError("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
}

DensityMatrix DensityMatrix::unchecked(Matrix entries, Space space) {
    DensityMatrix d;
    d.m_ = std::move(entries);
    d.space_ = space;
    return d;
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix annihilator(int M) {
    if (M < 1) throw ArgumentError("annihilator: M must be >= 1");
    Matrix a = Matrix::Zero(M, M);
    for (int n = 0; n + 1 < M; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    return a;
}

Matrix pauli(PauliAxis which) {
    Matrix s(2, 2);
    switch (which) {
        case PauliAxis::x: s << 0, 1, 1, 0; break;
        case PauliAxis::y: s << 0, -I, I, 0; break;
        case PauliAxis::z: s << 1, 0, 0, -1; break;
    }
    return s;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix partial_trace(const Matrix& rho, Space keep) {
    const Eigen::Index n = rho.rows();
    if (n != rho.cols() || n < 2 || n % 2 != 0)
        throw ArgumentError("partial_trace: dimension is not 2 x M");
    const Eigen::Index M = n / 2;
    switch (keep) {
        case Space::tls: {
            Matrix out(2, 2);
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t) out(s, t) = rho.block(s * M, t * M, M, M).trace();
            return out;
        }
        case Space::rc:
            return rho.block(0, 0, M, M) + rho.block(M, M, M, M);
        case Space::tls_rc:
            break;
    }
    throw ArgumentError("partial_trace: keep must be TLS or RC");
}

DensityMatrix partial_trace(const DensityMatrix& rho, Space keep) {
    if (rho.space() != Space::tls_rc)
        throw ArgumentError("partial_trace: input must live on TLS(x)RC");
    return DensityMatrix::unchecked(partial_trace(rho.matrix(), keep), keep);
}

EigenDecomposition eig_hermitian(const Matrix& h) {
    if (h.rows() != h.cols()) throw ArgumentError("eig_hermitian: matrix not square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermiticity_defect(h) > 1e-10 * scale)
        throw ArgumentError("eig_hermitian: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw SolverError("eig_hermitian: eigensolver failed");
    EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
        auto col = out.vectors.col(k);
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            const double mag = std::abs(col(i));
            if (mag > 1e-12) {
                col *= std::conj(col(i)) / mag;
                col(i) = mag;
                break;
            }
        }
    }
    return out;
}

Matrix hermitian_function(const EigenDecomposition& eig, const std::function<cplx(double)>& f) {
    const auto& v = eig.vectors;
    Eigen::VectorXcd fv(eig.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.values(i));
    return v * fv.asDiagonal() * v.adjoint();
}

Matrix hermitian_function(const Matrix& h, const std::function<cplx(double)>& f) {
    return hermitian_function(eig_hermitian(h), f);
}

namespace {
constexpr double kClip = 1e-9;

double entropy_of_spectrum(const RealVector& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        double x = p(i);
        if (x < -kClip || x > 1.0 + kClip)
            throw ArgumentError("entropy: eigenvalue " + std::to_string(x) + " outside [0, 1]");
        x = std::clamp(x, 0.0, 1.0);
        if (x > 0.0) s -= x * std::log(x);
    }
    return s;
}
}  // namespace

double entropy(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    return entropy_of_spectrum(es.eigenvalues());
}

double entropy(const DensityMatrix& rho) { return entropy(rho.matrix()); }

ClippedEntropy entropy_clipped(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    RealVector p = es.eigenvalues();
    ClippedEntropy out;
    double kept = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < 0.0) {
            out.negative_weight -= p(i);
            p(i) = 0.0;
        }
        kept += p(i);
    }
    if (kept <= 0.0) throw ArgumentError("entropy_clipped: no positive spectrum");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double x = p(i) / kept;
        if (x > 0.0) out.value -= x * std::log(x);
    }
    return out;
}

double trace_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ArgumentError("trace_distance: shape mismatch");
    Eigen::BDCSVD<Matrix> svd(a - b);
    return 0.5 * svd.singularValues().sum();
}

}  // namespace sbrc
