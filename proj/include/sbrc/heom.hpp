// heom.hpp — hierarchical equations of motion for the Drude-Lorentz
// spin-boson model (coupling operator Q = sigma_z).
//
// The bath correlation function is C(t) = sum_m c_m exp(-mu_m t) with
//   mu_0 = omega_c,  mu_m = 2 pi m / beta,
//   c_0 = (omega_c alpha_H / 2) (cot(beta omega_c / 2) - i),
//   c_m = (2 alpha_H omega_c / beta) mu_m / (mu_m^2 - omega_c^2),
// and alpha_H = pi alpha. Matsubara terms beyond K are folded into a
// Markovian terminator acting on every retained matrix.

#pragma once

#include <cstdint>
#include <vector>

#include "sbrc/core.hpp"
#include "sbrc/operators.hpp"
#include "sbrc/superoperator.hpp"

namespace sbrc {

struct HeomParams {
    double alpha_h = 0.0;  // pi * alpha
    double omega_c = 0.05;
    double beta = 0.95;
    int K = 0;   // Matsubara terms beyond m = 0
    int Nc = 0;  // tier cutoff

    static HeomParams from_spin_boson(const SpinBosonParams& params, int K, int Nc);
    void validate() const;
};

struct MatsubaraExpansion {
    std::vector<cplx> c;
    std::vector<double> mu;

    // alpha_H/(beta omega_c) - i alpha_H/2 - sum_{m<=K} c_m/mu_m; real up to
    // rounding since the imaginary parts cancel against c_0.
    cplx terminator = 0.0;
};

// Throws DegeneracyError when beta omega_c = 2 pi m for some m <= K.
MatsubaraExpansion matsubara(const HeomParams& params);

// Default cap on the number of hierarchy matrices (each 2x2 complex).
inline constexpr std::size_t kDefaultHierarchyCapacity = 4'000'000;

// Multi-indices n = (n_0..n_K) with sum <= Nc in graded lexicographic order
// (tier first, then lexicographically descending), with neighbour tables.
class Hierarchy {
public:
    static constexpr std::int64_t kAbsent = -1;

    // C(Nc + K + 1, K + 1); saturates at SIZE_MAX.
    static std::size_t count(int Nc, int K);

    // Throws CapacityError before allocating when count > capacity.
    static Hierarchy enumerate(int Nc, int K, std::size_t capacity = kDefaultHierarchyCapacity);

    std::size_t size() const noexcept { return tier_.size(); }
    int modes() const noexcept { return modes_; }
    int Nc() const noexcept { return Nc_; }
    int K() const noexcept { return modes_ - 1; }

    int occupation(std::size_t i, int m) const { return occ_[i * modes_ + m]; }
    int tier(std::size_t i) const { return tier_[i]; }
    std::int64_t plus(std::size_t i, int m) const { return plus_[i * modes_ + m]; }
    std::int64_t minus(std::size_t i, int m) const { return minus_[i * modes_ + m]; }

    // Flat position of a multi-index, or kAbsent.
    std::int64_t find(const std::vector<int>& n) const;

private:
    int Nc_ = 0;
    int modes_ = 1;
    std::vector<std::uint16_t> occ_;
    std::vector<int> tier_;
    std::vector<std::int64_t> plus_;
    std::vector<std::int64_t> minus_;
};

// Row-major 2x2 blocks, block 0 is the system density matrix.
struct HierarchyState {
    Hierarchy hierarchy;
    std::vector<cplx> data;

    explicit HierarchyState(Hierarchy h);
    std::size_t size() const noexcept { return hierarchy.size(); }
    Matrix block(std::size_t i) const;
    void set_block(std::size_t i, const Matrix& m);
};

// Everything the right-hand side needs, precomputed.
struct HeomOperator {
    const Hierarchy* hierarchy = nullptr;
    MatsubaraExpansion expansion;
    cplx hs[4];                    // H_S row-major
    std::vector<double> decay;     // sum_m n_m mu_m per index
};

HeomOperator make_heom_operator(const Hierarchy& h, const MatsubaraExpansion& exp,
                                const SpinBosonParams& params);

// d/dt of every block. OpenMP over hierarchy indices; each output block reads
// only the input snapshot.
void heom_rhs(const HeomOperator& op, const cplx* in, cplx* out);

// Single-threaded reference of heom_rhs, kept for testing and benchmarking.
void heom_rhs_serial(const HeomOperator& op, const cplx* in, cplx* out);

HierarchyState heom_rhs(const HierarchyState& state, const MatsubaraExpansion& exp,
                        const SpinBosonParams& params);

struct HeomRun {
    int Nc = 0;
    int K = 0;
    std::size_t matrices = 0;
    std::vector<double> times;
    std::vector<DensityMatrix> states;  // system matrix at each grid point
    double max_trace_error = 0.0;
    double max_hermiticity_defect = 0.0;
    IntegratorStats stats;
};

struct HeomOptions {
    double rtol = 1e-8;              // integrator tolerance
    double convergence_tol = 5e-4;   // max-over-time change of rho_11
    int max_Nc = 160;
    int max_K = 8;
    int Nc_step = 2;
    int K_step = 1;
    std::size_t capacity = kDefaultHierarchyCapacity;
};

// Fixed (Nc, K) run starting from rho0 with zero auxiliary matrices.
HeomRun heom_run(const DensityMatrix& rho0, const TimeGrid& grid, const SpinBosonParams& params,
                 int K, int Nc, const HeomOptions& opts = {});

struct HeomConvergenceStep {
    int Nc = 0;
    int K = 0;
    double change = 0.0;  // vs the previous (coarser) run; NaN for the first
};

struct HeomResult {
    HeomRun run;  // the finest run
    std::vector<HeomConvergenceStep> record;
    bool converged = false;
};

// Starts at (start_Nc, start_K) and refines the two cutoffs one at a time:
// Nc += Nc_step until the max-over-time change of rho_11 drops below
// convergence_tol, then K += K_step; if the extra Matsubara term still moves
// rho_11 by convergence_tol or more, the tier refinement resumes at the new K.
// Converged when a K step is below tolerance right after a tier step was.
// Raising both cutoffs in lock step is hopeless for slow baths: omega_c = 0.05
// needs Nc ~ 40-100 while K <= 2 suffices, and C(Nc + K + 1, K + 1) explodes.
// Throws ConvergenceError past (max_Nc, max_K), CapacityError when a
// refinement does not fit.
HeomResult heom_propagate(const DensityMatrix& rho0, const TimeGrid& grid,
                          const SpinBosonParams& params, int start_K, int start_Nc,
                          const HeomOptions& opts = {});

}  // namespace sbrc
