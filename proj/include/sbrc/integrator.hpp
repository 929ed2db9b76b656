// integrator.hpp — adaptive Dormand-Prince 5(4) for complex linear ODEs, plus
// an exact exponential stepper for time-independent dense generators.

#pragma once

#include <functional>
#include <vector>

#include "sbrc/core.hpp"
#include "sbrc/operators.hpp"

namespace sbrc {

// dy/dt = f(t, y); writes into `dy` (already sized).
using RhsFunction = std::function<void(double t, const Vector& y, Vector& dy)>;

// Called once per grid point with the grid index and state.
using Observer = std::function<void(std::size_t index, double t, const Vector& y)>;

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_initial = 0.0;  // 0 = automatic
    double h_min = 1e-14;    // relative to the current time scale
    long max_steps = 50'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

// Integrates from grid[0] through every grid point. Throws IntegrationError
// when the step size underflows or max_steps is exceeded.
IntegratorStats integrate_dopri5(const RhsFunction& f, Vector y0, const TimeGrid& grid,
                                 const Observer& observe, const IntegratorOptions& opts = {});

// y(t_i) = exp(L (t_i - t_{i-1})) y(t_{i-1}); the propagator is recomputed
// only when the step changes.
void integrate_exponential(const Matrix& generator, Vector y0, const TimeGrid& grid,
                           const Observer& observe);

using RealObserver = std::function<void(std::size_t index, double t, const RealVector& y)>;
void integrate_exponential(const RealMatrix& generator, RealVector y0, const TimeGrid& grid,
                           const RealObserver& observe);

// exp(A) by scaling and squaring with a Pade approximant.
Matrix expm(const Matrix& a);
RealMatrix expm(const RealMatrix& a);

}  // namespace sbrc
