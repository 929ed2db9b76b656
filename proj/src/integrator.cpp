#include "sbrc/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace sbrc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat (error weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double weighted_rms(const Vector& err, const Vector& y0, const Vector& y1,
                    const IntegratorOptions& o) {
    double acc = 0.0;
    const Eigen::Index n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = o.atol + o.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double r = std::abs(err(i)) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

double initial_step(const RhsFunction& f, double t0, const Vector& y0, const Vector& f0,
                    const IntegratorOptions& o, double span, long& nfev) {
    auto norm = [&](const Vector& v) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = o.atol + o.rtol * std::abs(y0(i));
            acc += std::norm(v(i)) / (sc * sc);
        }
        return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
    };
    const double d0 = norm(y0), d1 = norm(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vector y1 = y0 + h0 * f0;
    Vector f1(y0.size());
    f(t0 + h0, y1, f1);
    ++nfev;
    const double d2 = norm(f1 - f0) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100 * h0, h1, span});
}

}  // namespace

IntegratorStats integrate_dopri5(const RhsFunction& f, Vector y, const TimeGrid& grid,
                                 const Observer& observe, const IntegratorOptions& opts) {
    IntegratorStats stats;
    const auto& pts = grid.points();
    double t = pts.front();
    observe(0, t, y);
    if (pts.size() == 1) return stats;

    const Eigen::Index n = y.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    f(t, y, k1);
    ++stats.rhs_evaluations;

    double h = opts.h_initial > 0
                   ? opts.h_initial
                   : initial_step(f, t, y, k1, opts, pts.back() - t, stats.rhs_evaluations);
    long steps = 0;

    for (std::size_t target_index = 1; target_index < pts.size(); ++target_index) {
        const double target = pts[target_index];
        while (t < target) {
            if (++steps > opts.max_steps)
                throw IntegrationError("integrate_dopri5: exceeded max_steps", t);
            bool last = false;
            double step = h;
            if (t + step >= target || target - (t + step) < 1e-12 * std::max(1.0, std::abs(target))) {
                step = target - t;
                last = true;
            }

            ytmp = y + step * (a21 * k1);
            f(t + c2 * step, ytmp, k2);
            ytmp = y + step * (a31 * k1 + a32 * k2);
            f(t + c3 * step, ytmp, k3);
            ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * step, ytmp, k4);
            ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * step, ytmp, k5);
            ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + step, ytmp, k6);
            ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            f(t + step, ynew, k7);
            stats.rhs_evaluations += 6;
            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double en = weighted_rms(err, y, ynew, opts);
            if (!std::isfinite(en)) {
                ++stats.rejected;
                h = step * 0.1;
                if (h < opts.h_min * std::max(1.0, std::abs(t)))
                    throw IntegrationError("integrate_dopri5: non-finite state", t);
                continue;
            }
            if (en <= 1.0) {
                ++stats.accepted;
                t = last ? target : t + step;
                y.swap(ynew);
                k1.swap(k7);
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                // a step shortened to land on the grid does not limit the next one
                h = last ? std::max(h, step * fac) : step * fac;
            } else {
                ++stats.rejected;
                h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
                if (h < opts.h_min * std::max(1.0, std::abs(t)))
                    throw IntegrationError("integrate_dopri5: step size underflow", t);
            }
        }
        observe(target_index, t, y);
    }
    return stats;
}

Matrix expm(const Matrix& a) { return a.exp(); }
RealMatrix expm(const RealMatrix& a) { return a.exp(); }

namespace {

template <class Mat, class Vec, class Obs>
void exponential_steps(const Mat& generator, Vec y, const TimeGrid& grid, const Obs& observe) {
    const auto& pts = grid.points();
    observe(0, pts.front(), y);
    Mat propagator;
    double cached_step = -1.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double step = pts[i] - pts[i - 1];
        if (std::abs(step - cached_step) > 1e-13 * std::max(1.0, step)) {
            propagator = expm(Mat(generator * step));
            cached_step = step;
        }
        y = (propagator * y).eval();
        observe(i, pts[i], y);
    }
}

}  // namespace

void integrate_exponential(const Matrix& generator, Vector y, const TimeGrid& grid,
                           const Observer& observe) {
    exponential_steps(generator, std::move(y), grid, observe);
}

void integrate_exponential(const RealMatrix& generator, RealVector y, const TimeGrid& grid,
                           const RealObserver& observe) {
    exponential_steps(generator, std::move(y), grid, observe);
}

}  // namespace sbrc
