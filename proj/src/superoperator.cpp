#include "sbrc/superoperator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbrc {

Superoperator::Superoperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw ArgumentError("Superoperator: matrix must be square");
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(entries_.rows()))));
    if (n * n != entries_.rows())
        throw ArgumentError("Superoperator: dimension is not a perfect square");
    n_ = n;
}

Matrix Superoperator::apply(const Matrix& rho) const {
    if (rho.rows() != n_ || rho.cols() != n_)
        throw ArgumentError("Superoperator::apply: dimension mismatch");
    return unvectorize(entries_ * vectorize(rho), n_);
}

Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, Eigen::Index n) {
    if (v.size() != n * n) throw ArgumentError("unvectorize: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

RealVector hermitian_coordinates(const Matrix& rho) {
    const Eigen::Index n = rho.rows();
    if (rho.cols() != n) throw ArgumentError("hermitian_coordinates: matrix must be square");
    RealVector y(n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        y(j + n * j) = rho(j, j).real();
        for (Eigen::Index i = 0; i < j; ++i) {
            // average with the mirrored entry so tiny anti-Hermitian noise cancels
            const cplx z = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
            y(i + n * j) = std::sqrt(2.0) * z.real();
            y(j + n * i) = std::sqrt(2.0) * z.imag();
        }
    }
    return y;
}

Matrix from_hermitian_coordinates(const RealVector& y, Eigen::Index n) {
    if (y.size() != n * n) throw ArgumentError("from_hermitian_coordinates: size mismatch");
    Matrix rho(n, n);
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        rho(j, j) = y(j + n * j);
        for (Eigen::Index i = 0; i < j; ++i) {
            const cplx z{s * y(i + n * j), s * y(j + n * i)};
            rho(i, j) = z;
            rho(j, i) = std::conj(z);
        }
    }
    return rho;
}

namespace {

// k-th Hermitian basis matrix in the layout of hermitian_coordinates.
Matrix hermitian_basis(Eigen::Index k, Eigen::Index n) {
    const Eigen::Index i = k % n, j = k / n;
    const double s = 1.0 / std::sqrt(2.0);
    Matrix b = Matrix::Zero(n, n);
    if (i == j) {
        b(i, i) = 1.0;
    } else if (i < j) {
        b(i, j) = s;
        b(j, i) = s;
    } else {
        // sqrt2 Im rho_ji is the coordinate, so the basis element is i(E_ji - E_ij)/sqrt2
        b(j, i) = cplx(0, s);
        b(i, j) = cplx(0, -s);
    }
    return b;
}

template <class Apply>
RealMatrix representation_by_columns(Eigen::Index n, const Apply& apply) {
    RealMatrix out(n * n, n * n);
    double defect = 0.0;
    for (Eigen::Index k = 0; k < n * n; ++k) {
        const Matrix image = apply(hermitian_basis(k, n));
        defect = std::max(defect, hermiticity_defect(image));
        out.col(k) = hermitian_coordinates(image);
    }
    const double scale = std::max(1.0, out.cwiseAbs().maxCoeff());
    if (defect > 1e-10 * scale)
        throw ArgumentError("hermitian_representation: generator does not preserve hermiticity (defect " +
                            std::to_string(defect) + ")");
    return out;
}

}  // namespace

RealMatrix hermitian_representation(const Superoperator& L) {
    const Eigen::Index n = L.hilbert_dim();
    return representation_by_columns(n, [&](const Matrix& b) { return L.apply(b); });
}

RealMatrix hermitian_representation(const OperatorGenerator& L, Eigen::Index n) {
    if (n < 1) throw ArgumentError("hermitian_representation: dimension must be positive");
    return representation_by_columns(n, L);
}

Matrix left_multiplication(const Matrix& a) {
    // vec(A X) = (I (x) A) vec(X)
    return tensor(identity(a.rows()), a);
}

Matrix right_multiplication(const Matrix& b) {
    // vec(X B) = (B^T (x) I) vec(X)
    return tensor(b.transpose(), identity(b.rows()));
}

namespace {

struct TrajectoryRecorder {
    Trajectory& traj;
    Eigen::Index n;
    Space space;

    void operator()(std::size_t, double t, const Vector& y) {
        Matrix rho = unvectorize(y, n);
        const double tr_err = std::abs(rho.trace() - cplx(1.0));
        const double herm = hermiticity_defect(rho);
        if (tr_err > kTrajectoryInvariantTol)
            throw IntegrationError("propagate: trace drifted by " + std::to_string(tr_err), t);
        if (herm > kTrajectoryInvariantTol)
            throw IntegrationError("propagate: hermiticity defect " + std::to_string(herm), t);
        traj.max_trace_error = std::max(traj.max_trace_error, tr_err);
        traj.max_hermiticity_defect = std::max(traj.max_hermiticity_defect, herm);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        auto state = DensityMatrix::unchecked(std::move(rho), space);
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, state.min_eigenvalue());
        traj.times.push_back(t);
        traj.states.push_back(std::move(state));
    }
};

IntegratorOptions integrator_options(const PropagationOptions& opts) {
    IntegratorOptions io;
    io.rtol = opts.tol;
    io.atol = opts.tol * 1e-3;
    return io;
}

}  // namespace

Trajectory propagate(const Superoperator& L, const DensityMatrix& rho0, const TimeGrid& grid,
                     const PropagationOptions& opts) {
    if (rho0.dim() != L.hilbert_dim()) throw ArgumentError("propagate: dimension mismatch");
    Trajectory traj;
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    TrajectoryRecorder rec{traj, L.hilbert_dim(), rho0.space()};
    const Vector y0 = vectorize(rho0.matrix());
    if (opts.method == PropagationMethod::exponential) {
        return propagate_hermitian(hermitian_representation(L), rho0, grid);
    } else {
        const Matrix& m = L.matrix();
        RhsFunction f = [&m](double, const Vector& y, Vector& dy) { dy.noalias() = m * y; };
        traj.stats = integrate_dopri5(f, y0, grid, std::ref(rec), integrator_options(opts));
    }
    return traj;
}

Trajectory propagate_hermitian(const RealMatrix& L, const DensityMatrix& rho0, const TimeGrid& grid) {
    const Eigen::Index n = rho0.dim();
    if (L.rows() != n * n || L.cols() != n * n)
        throw ArgumentError("propagate_hermitian: dimension mismatch");
    Trajectory traj;
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    TrajectoryRecorder rec{traj, n, rho0.space()};
    const auto& pts = grid.points();
    RealVector y = hermitian_coordinates(rho0.matrix());
    rec(0, pts.front(), vectorize(from_hermitian_coordinates(y, n)));
    RealMatrix prop;
    double cached_step = -1.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double step = pts[i] - pts[i - 1];
        if (std::abs(step - cached_step) > 1e-13 * std::max(1.0, step)) {
            // Exponential of the balanced matrix. The strong-coupling RC
            // generator is so non-normal that ||P^k v|| transiently reaches
            // 1e11 at M = 32; the unbalanced exponential's rounding, or any
            // 1e-12 touch-up of P, is amplified to O(1) errors.
            RealMatrix b = L * step;
            const RealVector d = balance(b);
            prop = d.asDiagonal() * expm(b) * d.cwiseInverse().asDiagonal();
            cached_step = step;
        }
        y = (prop * y).eval();
        rec(i, pts[i], vectorize(from_hermitian_coordinates(y, n)));
    }
    return traj;
}

Trajectory propagate(const OperatorGenerator& L, const DensityMatrix& rho0, const TimeGrid& grid,
                     const PropagationOptions& opts) {
    if (opts.method != PropagationMethod::adaptive)
        throw ArgumentError("propagate: matrix-free generators support only the adaptive method");
    const Eigen::Index n = rho0.dim();
    Trajectory traj;
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    TrajectoryRecorder rec{traj, n, rho0.space()};
    RhsFunction f = [&L, n](double, const Vector& y, Vector& dy) {
        const Matrix out = L(Eigen::Map<const Matrix>(y.data(), n, n));
        dy = Eigen::Map<const Vector>(out.data(), out.size());
    };
    traj.stats = integrate_dopri5(f, vectorize(rho0.matrix()), grid, std::ref(rec),
                                  integrator_options(opts));
    return traj;
}

RealVector balance(RealMatrix& a, int sweeps) {
    const Eigen::Index n = a.rows();
    RealVector d = RealVector::Ones(n);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double c = a.col(i).cwiseAbs().sum() - std::abs(a(i, i));
            const double r = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
            if (c == 0.0 || r == 0.0) continue;
            // nearest power of two to sqrt(r / c)
            const double f = std::exp2(std::round(0.5 * std::log2(r / c)));
            if (f == 1.0) continue;
            a.col(i) *= f;
            a.row(i) /= f;
            d(i) *= f;
            changed = true;
        }
        if (!changed) break;
    }
    return d;
}

DensityMatrix steady_state_hermitian(const RealMatrix& L, Space space, SteadyStateInfo* info) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(L.rows()))));
    if (L.rows() != L.cols() || n * n != L.rows())
        throw ArgumentError("steady_state: generator must be square with perfect-square dimension");
    const Eigen::Index N = L.rows();

    // B = L + u tr^T swaps the zero eigenvalue of L (left eigenvector tr) for
    // tr(u) = 1 and keeps the rest of the spectrum, so B x = u has the
    // unit-trace steady state as its unique solution iff the kernel of L is
    // one-dimensional.
    const RealVector tr = hermitian_coordinates(Matrix::Identity(n, n));
    RealVector u = RealVector::Zero(N);
    u(0) = 1.0;
    RealMatrix b = L;
    b.row(0) += tr.transpose();
    const RealVector d = balance(b);
    const double scale = b.cwiseAbs().maxCoeff();
    Eigen::PartialPivLU<RealMatrix> lu(b);

    // smallest |eigenvalue| of B by inverse iteration from a fixed start
    RealVector v = RealVector::Constant(N, 1.0 / std::sqrt(double(N)));
    for (Eigen::Index i = 0; i < N; ++i) v(i) *= 1.0 + 0.5 * std::sin(double(i));
    v.normalize();
    double gap = 0.0;
    for (int k = 0; k < 40; ++k) {
        RealVector w = lu.solve(v);
        const double nw = w.norm();
        if (!std::isfinite(nw) || nw == 0.0) {
            gap = 0.0;
            break;
        }
        v = w / nw;
        if (k >= 38) {
            // two-step estimate is insensitive to a dominant complex pair
            const RealVector w2 = lu.solve(v);
            gap = 1.0 / std::sqrt(nw * w2.norm());
            break;
        }
    }
    if (info) *info = {gap, scale};
    if (!(gap >= 1e-10 * scale))
        throw DegeneracyError("steady_state: kernel is not one-dimensional (slowest relaxation rate " +
                              std::to_string(gap) + ")");

    const RealVector x = d.cwiseProduct(lu.solve(u.cwiseQuotient(d)));
    Matrix rho = from_hermitian_coordinates(x, n);
    const double t = rho.trace().real();
    if (!std::isfinite(t) || std::abs(t) < 1e-300)
        throw DegeneracyError("steady_state: kernel element is traceless");
    rho /= t;
    return DensityMatrix::unchecked(std::move(rho), space);
}

DensityMatrix steady_state(const Superoperator& L, Space space, SteadyStateInfo* info) {
    return steady_state_hermitian(hermitian_representation(L), space, info);
}

}  // namespace sbrc
