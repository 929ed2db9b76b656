// core.hpp — parameter records and spectral densities shared by all solvers.
//
// Everything is expressed in units of the tunnelling Delta (hbar = 1).

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace sbrc {

inline constexpr double pi = std::numbers::pi;

// Conversion anchor used only in human-readable summaries.
inline constexpr double kDeltaWavenumbers = 200.0;  // cm^-1

struct SpinBosonParams {
    double epsilon = 0.5;   // bias
    double delta = 1.0;     // tunnelling
    double alpha = 0.0;     // dimensionless coupling
    double omega_c = 0.05;  // Drude-Lorentz cutoff
    double beta = 0.95;     // inverse temperature

    // The paper-style captions quote pi*alpha rather than alpha.
    static SpinBosonParams from_pi_alpha(double epsilon, double pi_alpha, double omega_c,
                                         double beta, double delta = 1.0);

    double pi_alpha() const noexcept { return pi * alpha; }
    double eta() const noexcept { return std::hypot(epsilon, delta); }

    // Throws ArgumentError naming the offending field.
    void validate() const;
};

// Reaction-coordinate representation. M is the RC Fock truncation; 0 means
// "not chosen yet" (set by truncation convergence).
struct MappedParams {
    double lambda = 0.0;
    double Omega = 0.0;
    double gamma = 0.0;
    int M = 0;
};

class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);

    // `samples` points from 0 to t_max inclusive.
    static TimeGrid uniform(double t_max, int samples);

    const std::vector<double>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double back() const { return points_.back(); }

    // True when all steps agree to 1e-12 relative.
    bool is_uniform() const;

private:
    std::vector<double> points_;
};

// Drude-Lorentz spin-boson spectral density  alpha*wc*w/(w^2 + wc^2).
double j_sb(double omega, const SpinBosonParams& params);

// Ohmic residual-bath density gamma*w (infinite cutoff).
double j_rc(double omega, double gamma);

}  // namespace sbrc
