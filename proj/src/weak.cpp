#include "sbrc/weak.hpp"

#include <cmath>

namespace sbrc {

Matrix tls_hamiltonian(const SpinBosonParams& params) {
    return 0.5 * params.epsilon * pauli(PauliAxis::z) + 0.5 * params.delta * pauli(PauliAxis::x);
}

Matrix tls_eigenbasis(const SpinBosonParams& params) {
    return eig_hermitian(tls_hamiltonian(params)).vectors;
}

WeakRates weak_rates(const SpinBosonParams& params) {
    params.validate();
    const double eta = params.eta();
    const double sin2 = params.delta * params.delta / (eta * eta);
    const double cos2 = params.epsilon * params.epsilon / (eta * eta);
    const double occupation = 1.0 / std::expm1(params.beta * eta);
    const double j = j_sb(eta, params);
    WeakRates r;
    r.down = 2.0 * pi * sin2 * j * (occupation + 1.0);
    r.up = 2.0 * pi * sin2 * j * occupation;
    // lim_{w->0+} J_SB(w) coth(beta w / 2) = 2 alpha / (beta omega_c)
    r.dephasing = 4.0 * pi * cos2 * params.alpha / (params.beta * params.omega_c);
    return r;
}

namespace {

// vec(D[L] rho) for D[L] rho = L rho L^dag - {L^dag L, rho} / 2.
Matrix dissipator(const Matrix& jump) {
    const Matrix ldl = jump.adjoint() * jump;
    return tensor(jump.conjugate(), jump) - 0.5 * left_multiplication(ldl) -
           0.5 * right_multiplication(ldl);
}

}  // namespace

Superoperator build_weak_generator(const SpinBosonParams& params) {
    const Matrix hs = tls_hamiltonian(params);
    const Matrix v = tls_eigenbasis(params);
    const Vector g = v.col(0), e = v.col(1);
    const Matrix lower = g * e.adjoint();
    const Matrix raise = e * g.adjoint();
    const Matrix zbar = e * e.adjoint() - g * g.adjoint();
    const WeakRates r = weak_rates(params);

    Matrix gen = -I * (left_multiplication(hs) - right_multiplication(hs));
    if (r.down > 0) gen += r.down * dissipator(lower);
    if (r.up > 0) gen += r.up * dissipator(raise);
    if (r.dephasing > 0) gen += 0.5 * r.dephasing * dissipator(zbar);
    return Superoperator(std::move(gen));
}

Trajectory weak_propagate(const Superoperator& generator, const DensityMatrix& rho0,
                          const TimeGrid& grid, const PropagationOptions& opts) {
    if (generator.hilbert_dim() != 2) throw ArgumentError("weak_propagate: generator is not 4x4");
    return propagate(generator, rho0, grid, opts);
}

DensityMatrix weak_steady_state(const Superoperator& generator, SteadyStateInfo* info) {
    if (generator.hilbert_dim() != 2) throw ArgumentError("weak_steady_state: generator is not 4x4");
    return steady_state(generator, Space::tls, info);
}

DensityMatrix tls_gibbs(const SpinBosonParams& params) {
    const auto eig = eig_hermitian(tls_hamiltonian(params));
    const double e0 = eig.values(0);
    Matrix g = hermitian_function(eig, [&](double x) { return cplx(std::exp(-params.beta * (x - e0))); });
    g /= g.trace();
    return DensityMatrix(0.5 * (g + g.adjoint()), Space::tls);
}

}  // namespace sbrc
