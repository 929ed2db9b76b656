// weak.hpp — secular Born-Markov reference solver on the bare TLS.
//
// Works in the eigenbasis {|g>, |e>} of H_S with mixing angle tan(theta) =
// Delta/epsilon. Relaxation and excitation rates follow detailed balance at
// the splitting eta, so the fixed point is Gibbs(H_S, beta).

#pragma once

#include "sbrc/core.hpp"
#include "sbrc/operators.hpp"
#include "sbrc/superoperator.hpp"

namespace sbrc {

struct WeakRates {
    double down = 0.0;      // |e> -> |g>
    double up = 0.0;        // |g> -> |e>
    double dephasing = 0.0; // Gamma_phi; the sigma_z jump enters at Gamma_phi / 2
};

Matrix tls_hamiltonian(const SpinBosonParams& params);

// Columns: |g>, |e> expressed in the {|1>, |2>} basis.
Matrix tls_eigenbasis(const SpinBosonParams& params);

WeakRates weak_rates(const SpinBosonParams& params);

Superoperator build_weak_generator(const SpinBosonParams& params);

Trajectory weak_propagate(const Superoperator& generator, const DensityMatrix& rho0,
                          const TimeGrid& grid, const PropagationOptions& opts = {});

DensityMatrix weak_steady_state(const Superoperator& generator, SteadyStateInfo* info = nullptr);

// exp(-beta H_S) / Z.
DensityMatrix tls_gibbs(const SpinBosonParams& params);

}  // namespace sbrc
