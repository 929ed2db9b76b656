#include "sbrc/mapping.hpp"

#include <cmath>
#include <string>

#include "sbrc/errors.hpp"

namespace sbrc {

MappedParams map_to_rc(const SpinBosonParams& params, double ratio) {
    params.validate();
    if (!(ratio >= kMinMappingRatio))
        throw ArgumentError("map_to_rc: ratio Omega/omega_c = " + std::to_string(ratio) +
                            " violates omega_c << Omega (need >= 10)");
    MappedParams m;
    m.Omega = ratio * params.omega_c;
    m.gamma = ratio / (2.0 * pi);
    m.lambda = std::sqrt(pi * params.alpha * m.Omega / 2.0);
    return m;
}

double reconstruct_j_sb(const MappedParams& mapped, double omega) {
    if (omega < 0) throw DomainError("reconstruct_j_sb: omega must be >= 0");
    const double W = mapped.Omega;
    const double g = mapped.gamma;
    const double l2 = mapped.lambda * mapped.lambda;
    const double detune = W * W - omega * omega;
    const double damp = 2.0 * pi * g * W * omega;
    return 4.0 * g * omega * W * W * l2 / (detune * detune + damp * damp);
}

}  // namespace sbrc
