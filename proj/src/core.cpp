#include "sbrc/core.hpp"

#include <algorithm>
#include <string>

#include "sbrc/errors.hpp"

namespace sbrc {

SpinBosonParams SpinBosonParams::from_pi_alpha(double epsilon, double pi_alpha, double omega_c,
                                               double beta, double delta) {
    SpinBosonParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.alpha = pi_alpha / pi;
    p.omega_c = omega_c;
    p.beta = beta;
    p.validate();
    return p;
}

void SpinBosonParams::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ValidationError(field, what);
    };
    require(std::isfinite(epsilon), "params.epsilon", "must be finite");
    require(delta > 0 && std::isfinite(delta), "params.delta", "must be > 0");
    require(omega_c > 0 && std::isfinite(omega_c), "params.omega_c", "must be > 0");
    require(beta > 0 && std::isfinite(beta), "params.beta", "must be > 0");
    require(alpha >= 0 && std::isfinite(alpha), "params.alpha", "must be >= 0");
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw ArgumentError("TimeGrid: empty");
    if (points_.front() != 0.0) throw ArgumentError("TimeGrid: first point must be 0");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1]))
            throw ArgumentError("TimeGrid: points must be strictly increasing");
    }
}

TimeGrid TimeGrid::uniform(double t_max, int samples) {
    if (!(t_max > 0)) throw ArgumentError("TimeGrid::uniform: t_max must be > 0");
    if (samples < 2) throw ArgumentError("TimeGrid::uniform: need at least 2 samples");
    std::vector<double> pts(static_cast<std::size_t>(samples));
    const double dt = t_max / (samples - 1);
    for (int i = 0; i < samples; ++i) pts[static_cast<std::size_t>(i)] = i * dt;
    pts.back() = t_max;
    return TimeGrid(std::move(pts));
}

bool TimeGrid::is_uniform() const {
    if (points_.size() < 3) return true;
    const double h = points_[1] - points_[0];
    for (std::size_t i = 2; i < points_.size(); ++i) {
        if (std::abs((points_[i] - points_[i - 1]) - h) > 1e-12 * std::max(1.0, h)) return false;
    }
    return true;
}

double j_sb(double omega, const SpinBosonParams& params) {
    if (omega < 0) throw DomainError("j_sb: omega must be >= 0");
    const double wc = params.omega_c;
    return params.alpha * wc * omega / (omega * omega + wc * wc);
}

double j_rc(double omega, double gamma) {
    if (omega < 0) throw DomainError("j_rc: omega must be >= 0");
    return gamma * omega;
}

}  // namespace sbrc
