#include "sbrc/rcme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sbrc/measures.hpp"

namespace sbrc {

Matrix rc_position(int M) {
    const Matrix a = annihilator(M);
    return tensor(identity(2), a + a.adjoint());
}

Matrix build_h0(const MappedParams& mapped, const SpinBosonParams& params, int M) {
    if (M < 1) throw ArgumentError("build_h0: M must be >= 1");
    const Matrix a = annihilator(M);
    const Matrix hs = 0.5 * params.epsilon * pauli(PauliAxis::z) + 0.5 * params.delta * pauli(PauliAxis::x);
    Matrix h = tensor(hs, identity(M));
    h += mapped.lambda * tensor(pauli(PauliAxis::z), a + a.adjoint());
    h += mapped.Omega * tensor(identity(2), a.adjoint() * a);
    return h;
}

RateOperators build_rate_operators(const EigenDecomposition& h0, double gamma, double beta, int M,
                                   double omega_scale) {
    const Eigen::Index n = h0.values.size();
    if (n != 2 * M) throw ArgumentError("build_rate_operators: H0 dimension is not 2M");
    const Matrix& v = h0.vectors;
    const Matrix a_eig = v.adjoint() * rc_position(M) * v;
    const double degenerate = kDegenerateBohrTol * std::max(1.0, omega_scale);

    RateOperators r;
    r.bohr.resize(n, n);
    Matrix chi_eig(n, n), xi_eig(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double x = h0.values(j) - h0.values(k);
            r.bohr(j, k) = x;
            double chi_coef, xi_coef;
            if (std::abs(x) < degenerate) {
                // lim_{x->0} J_RC(x) coth(beta x / 2) = 2 gamma / beta
                chi_coef = 0.5 * pi * 2.0 * gamma / beta;
                xi_coef = 0.0;
            } else {
                // J_RC is odd in x and coth is odd, so the product is even
                chi_coef = 0.5 * pi * gamma * x / std::tanh(0.5 * beta * x);
                xi_coef = 0.5 * pi * gamma * x;
            }
            chi_eig(j, k) = chi_coef * a_eig(j, k);
            xi_eig(j, k) = xi_coef * a_eig(j, k);
        }
    }
    r.chi = v * chi_eig * v.adjoint();
    r.xi = v * xi_eig * v.adjoint();
    return r;
}

Superoperator build_liouvillian(const Matrix& h0, const RateOperators& rates) {
    const Eigen::Index n = h0.rows();
    if (h0.cols() != n || rates.chi.rows() != n || rates.xi.rows() != n || n % 2 != 0)
        throw ArgumentError("build_liouvillian: dimension mismatch");
    const int M = static_cast<int>(n / 2);
    const Matrix a = rc_position(M);
    const Matrix& chi = rates.chi;
    const Matrix& xi = rates.xi;
    auto L = [](const Matrix& x) { return left_multiplication(x); };
    auto R = [](const Matrix& x) { return right_multiplication(x); };

    // [A,[chi,p]] = A chi p - A p chi - chi p A + p chi A
    // [A,{Xi,p}]  = A Xi p + A p Xi - Xi p A - p Xi A
    Matrix gen = -I * (L(h0) - R(h0));
    gen -= L(a * chi) - L(a) * R(chi) - L(chi) * R(a) + R(chi * a);
    gen += L(a * xi) + L(a) * R(xi) - L(xi) * R(a) - R(xi * a);
    return Superoperator(std::move(gen));
}

Matrix apply_liouvillian(const Matrix& h0, const Matrix& coupling, const RateOperators& rates,
                         const Matrix& rho) {
    // -[A,[chi,p]] + [A,{Xi,p}] = -[A, Z] with Z = (chi - Xi) p - p (chi + Xi)
    const Matrix z = (rates.chi - rates.xi) * rho - rho * (rates.chi + rates.xi);
    Matrix out = -I * (h0 * rho - rho * h0);
    out.noalias() -= coupling * z;
    out.noalias() += z * coupling;
    return out;
}

RcmeModel RcmeModel::build(const SpinBosonParams& params, const MappedParams& mapped, int M) {
    params.validate();
    RcmeModel m;
    m.params = params;
    m.mapped = mapped;
    m.mapped.M = M;
    m.M = M;
    m.h0 = build_h0(mapped, params, M);
    m.coupling = rc_position(M);
    m.h0_eig = eig_hermitian(m.h0);
    m.rates = build_rate_operators(m.h0_eig, mapped.gamma, params.beta, M, mapped.Omega);
    return m;
}

RealMatrix RcmeModel::hermitian_liouvillian() const {
    return hermitian_representation([this](const Matrix& rho) { return apply(rho); }, 2 * M);
}

DensityMatrix rcme_initial_state(const MappedParams& mapped, double beta, int M) {
    if (M < 1) throw ArgumentError("rcme_initial_state: M must be >= 1");
    Matrix rc = Matrix::Zero(M, M);
    double z = 0.0;
    for (int n = 0; n < M; ++n) {
        rc(n, n) = std::exp(-beta * mapped.Omega * n);
        z += rc(n, n).real();
    }
    rc /= z;
    Matrix up = Matrix::Zero(2, 2);
    up(0, 0) = 1.0;
    return DensityMatrix(tensor(up, rc), Space::tls_rc);
}

Trajectory rcme_propagate(const RcmeModel& model, const DensityMatrix& rho0, const TimeGrid& grid,
                          const PropagationOptions& opts) {
    if (opts.method == PropagationMethod::exponential) {
        if (!model.dense_feasible())
            throw CapacityError("rcme_propagate: M = " + std::to_string(model.M) +
                                " exceeds the dense limit for exponential propagation");
        return propagate_hermitian(model.hermitian_liouvillian(), rho0, grid);
    }
    OperatorGenerator gen = [&model](const Matrix& rho) { return model.apply(rho); };
    return propagate(gen, rho0, grid, opts);
}

DensityMatrix rcme_steady_state(const RcmeModel& model, SteadyStateInfo* info) {
    if (!model.dense_feasible())
        throw CapacityError("rcme_steady_state: M = " + std::to_string(model.M) +
                            " exceeds the dense limit");
    return steady_state_hermitian(model.hermitian_liouvillian(), Space::tls_rc, info);
}

std::vector<double> tls_population(const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        const Eigen::Index M = s.dim() / 2;
        out.push_back(s.matrix().block(0, 0, M, M).trace().real());
    }
    return out;
}

TruncationResult converge_truncation(const SpinBosonParams& params, const MappedParams& mapped,
                                     const TimeGrid& grid, const TruncationOptions& opts,
                                     const TrajectoryObservable& observable) {
    if (opts.first_M < 1) throw ArgumentError("converge_truncation: first_M must be >= 1");
    TruncationResult result;
    auto run = [&](int M) {
        const auto model = RcmeModel::build(params, mapped, M);
        PropagationOptions po = opts.propagation;
        if (po.method == PropagationMethod::exponential && !model.dense_feasible())
            po.method = PropagationMethod::adaptive;
        return rcme_propagate(model, rcme_initial_state(mapped, params.beta, M), grid, po);
    };

    if (std::isinf(opts.tol)) {
        result.M = opts.first_M;
        result.trajectory = run(opts.first_M);
        result.record.push_back({opts.first_M, std::numeric_limits<double>::quiet_NaN()});
        return result;
    }

    int M = opts.first_M;
    Trajectory prev_traj = run(M);
    std::vector<double> prev = observable(prev_traj);
    while (2 * M <= opts.max_M) {
        Trajectory next_traj = run(2 * M);
        std::vector<double> next = observable(next_traj);
        if (next.size() != prev.size())
            throw ArgumentError("converge_truncation: observable length changed with M");
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            change = std::max(change, std::abs(next[i] - prev[i]));
        result.record.push_back({M, change});
        if (change < opts.tol) {
            result.M = M;
            result.record.push_back({2 * M, std::numeric_limits<double>::quiet_NaN()});
            result.trajectory = std::move(prev_traj);
            return result;
        }
        prev = std::move(next);
        prev_traj = std::move(next_traj);
        M *= 2;
    }
    if (opts.accept_unconverged) {
        result.M = M;
        result.record.push_back({M, std::numeric_limits<double>::quiet_NaN()});
        result.trajectory = std::move(prev_traj);
        result.converged = false;
        return result;
    }
    throw ConvergenceError("converge_truncation: no convergence by M = " + std::to_string(opts.max_M));
}

std::vector<double> default_steady_observable(const DensityMatrix& rho) {
    const Matrix rs = partial_trace(rho.matrix(), Space::tls);
    return {rs(0, 0).real(), rs(0, 1).real(), rs(0, 1).imag(), mutual_information(rho.matrix()),
            non_gaussianity(partial_trace(rho.matrix(), Space::rc))};
}

SteadyTruncationResult converge_steady_truncation(const SpinBosonParams& params, const MappedParams& mapped,
                                                  double tol, int first_M, const SteadyObservable& observable) {
    if (first_M < 1) throw ArgumentError("converge_steady_truncation: first_M must be >= 1");
    auto solve = [&](int M, SteadyStateInfo& info) {
        if (M > kMaxDenseTruncation)
            throw CapacityError("converge_steady_truncation: no convergence within the dense limit M = " +
                                std::to_string(kMaxDenseTruncation));
        return rcme_steady_state(RcmeModel::build(params, mapped, M), &info);
    };
    SteadyTruncationResult result;
    int M = first_M;
    SteadyStateInfo info;
    DensityMatrix prev = solve(M, info);
    std::vector<double> prev_obs = observable(prev);
    while (true) {
        SteadyStateInfo next_info;
        DensityMatrix next = solve(2 * M, next_info);
        const std::vector<double> next_obs = observable(next);
        double change = 0.0;
        for (std::size_t i = 0; i < next_obs.size(); ++i)
            change = std::max(change, std::abs(next_obs[i] - prev_obs[i]));
        result.record.push_back({M, change});
        if (change < tol) {
            result.M = M;
            result.record.push_back({2 * M, std::numeric_limits<double>::quiet_NaN()});
            result.state = std::move(prev);
            result.info = info;
            return result;
        }
        prev = std::move(next);
        prev_obs = next_obs;
        info = next_info;
        M *= 2;
    }
}

}  // namespace sbrc
