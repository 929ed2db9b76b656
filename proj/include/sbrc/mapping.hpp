// mapping.hpp — spin-boson (Drude-Lorentz) to reaction-coordinate parameters.

#pragma once

#include "sbrc/core.hpp"

namespace sbrc {

// Smallest accepted Omega/omega_c; the mapping needs omega_c << Omega.
inline constexpr double kMinMappingRatio = 10.0;
inline constexpr double kDefaultMappingRatio = 100.0;

// Omega = ratio * omega_c, gamma = ratio / (2 pi), lambda = sqrt(pi alpha Omega / 2).
// M is left at 0.
MappedParams map_to_rc(const SpinBosonParams& params, double ratio = kDefaultMappingRatio);

// Spin-boson density implied by an RC with Ohmic residual bath:
//   4 gamma w Omega^2 lambda^2 / ((Omega^2 - w^2)^2 + (2 pi gamma Omega w)^2)
double reconstruct_j_sb(const MappedParams& mapped, double omega);

}  // namespace sbrc
