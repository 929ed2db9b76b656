#include "sbrc/heom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "sbrc/weak.hpp"

namespace sbrc {

HeomParams HeomParams::from_spin_boson(const SpinBosonParams& params, int K, int Nc) {
    params.validate();
    HeomParams h;
    h.alpha_h = pi * params.alpha;
    h.omega_c = params.omega_c;
    h.beta = params.beta;
    h.K = K;
    h.Nc = Nc;
    h.validate();
    return h;
}

void HeomParams::validate() const {
    if (!(alpha_h >= 0)) throw ValidationError("heom.alpha_h", "must be >= 0");
    if (!(omega_c > 0)) throw ValidationError("heom.omega_c", "must be > 0");
    if (!(beta > 0)) throw ValidationError("heom.beta", "must be > 0");
    if (K < 0) throw ValidationError("heom.K", "must be >= 0");
    if (Nc < 0) throw ValidationError("heom.Nc", "must be >= 0");
}

MatsubaraExpansion matsubara(const HeomParams& p) {
    p.validate();
    MatsubaraExpansion e;
    const double wc = p.omega_c;
    for (int m = 1; m <= p.K; ++m) {
        if (std::abs(p.beta * wc - 2.0 * pi * m) < 1e-12 * std::max(1.0, p.beta * wc))
            throw DegeneracyError("matsubara: beta * omega_c coincides with 2 pi m for m = " +
                                  std::to_string(m));
    }
    e.c.reserve(static_cast<std::size_t>(p.K) + 1);
    e.mu.reserve(static_cast<std::size_t>(p.K) + 1);
    e.mu.push_back(wc);
    e.c.push_back(0.5 * wc * p.alpha_h * cplx(1.0 / std::tan(0.5 * p.beta * wc), -1.0));
    for (int m = 1; m <= p.K; ++m) {
        const double mu = 2.0 * pi * m / p.beta;
        e.mu.push_back(mu);
        e.c.push_back(2.0 * p.alpha_h * wc / p.beta * mu / (mu * mu - wc * wc));
    }
    cplx term{p.alpha_h / (p.beta * wc), -0.5 * p.alpha_h};
    for (std::size_t m = 0; m < e.c.size(); ++m) term -= e.c[m] / e.mu[m];
    e.terminator = term;
    return e;
}

std::size_t Hierarchy::count(int Nc, int K) {
    if (Nc < 0 || K < 0) throw ArgumentError("Hierarchy::count: Nc and K must be >= 0");
    // C(Nc + K + 1, K + 1) by the multiplicative formula
    const long double k = K + 1;
    long double c = 1.0L;
    for (long double i = 1; i <= k; ++i) c = c * (Nc + i) / i;
    if (c > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2))
        return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(std::llround(c));
}

namespace {

void compositions(int remaining, int slot, int modes, std::vector<std::uint16_t>& cur,
                  std::vector<std::uint16_t>& out) {
    if (slot == modes - 1) {
        cur[slot] = static_cast<std::uint16_t>(remaining);
        out.insert(out.end(), cur.begin(), cur.end());
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[slot] = static_cast<std::uint16_t>(v);
        compositions(remaining - v, slot + 1, modes, cur, out);
    }
}

}  // namespace

Hierarchy Hierarchy::enumerate(int Nc, int K, std::size_t capacity) {
    const std::size_t n = count(Nc, K);
    if (n > capacity)
        throw CapacityError("Hierarchy: " + std::to_string(n) + " matrices for Nc = " +
                            std::to_string(Nc) + ", K = " + std::to_string(K) +
                            " exceeds capacity " + std::to_string(capacity));
    if (Nc > std::numeric_limits<std::uint16_t>::max())
        throw CapacityError("Hierarchy: Nc too large");
    Hierarchy h;
    h.Nc_ = Nc;
    h.modes_ = K + 1;
    const int modes = h.modes_;
    h.occ_.reserve(n * static_cast<std::size_t>(modes));
    std::vector<std::uint16_t> cur(static_cast<std::size_t>(modes), 0);
    for (int t = 0; t <= Nc; ++t) compositions(t, 0, modes, cur, h.occ_);
    if (h.occ_.size() != n * static_cast<std::size_t>(modes)) throw SolverError("Hierarchy: enumeration count mismatch");

    h.tier_.resize(n);
    std::unordered_map<std::uint64_t, std::int64_t> lookup;
    lookup.reserve(n);
    const std::uint64_t base = static_cast<std::uint64_t>(Nc) + 1;
    auto key_of = [&](const std::uint16_t* occ) {
        std::uint64_t key = 0;
        for (int m = modes - 1; m >= 0; --m) key = key * base + occ[m];
        return key;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t* occ = &h.occ_[i * modes];
        int t = 0;
        for (int m = 0; m < modes; ++m) t += occ[m];
        h.tier_[i] = t;
        lookup.emplace(key_of(occ), static_cast<std::int64_t>(i));
    }
    h.plus_.assign(n * modes, kAbsent);
    h.minus_.assign(n * modes, kAbsent);
    std::uint64_t stride = 1;
    for (int m = 0; m < modes; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint16_t* occ = &h.occ_[i * modes];
            const std::uint64_t key = key_of(occ);
            if (h.tier_[i] < Nc) h.plus_[i * modes + m] = lookup.at(key + stride);
            if (occ[m] > 0) h.minus_[i * modes + m] = lookup.at(key - stride);
        }
        stride *= base;
    }
    return h;
}

std::int64_t Hierarchy::find(const std::vector<int>& n) const {
    if (static_cast<int>(n.size()) != modes_) return kAbsent;
    // walk up from the zero index along raising maps
    std::int64_t pos = 0;
    for (int m = 0; m < modes_; ++m) {
        if (n[m] < 0) return kAbsent;
        for (int k = 0; k < n[m]; ++k) {
            pos = plus(static_cast<std::size_t>(pos), m);
            if (pos == kAbsent) return kAbsent;
        }
    }
    return pos;
}

HierarchyState::HierarchyState(Hierarchy h) : hierarchy(std::move(h)), data(4 * hierarchy.size(), 0.0) {}

Matrix HierarchyState::block(std::size_t i) const {
    Matrix m(2, 2);
    m << data[4 * i], data[4 * i + 1], data[4 * i + 2], data[4 * i + 3];
    return m;
}

void HierarchyState::set_block(std::size_t i, const Matrix& m) {
    if (m.rows() != 2 || m.cols() != 2) throw ArgumentError("HierarchyState: block must be 2x2");
    data[4 * i] = m(0, 0);
    data[4 * i + 1] = m(0, 1);
    data[4 * i + 2] = m(1, 0);
    data[4 * i + 3] = m(1, 1);
}

HeomOperator make_heom_operator(const Hierarchy& h, const MatsubaraExpansion& exp,
                                const SpinBosonParams& params) {
    if (static_cast<int>(exp.c.size()) != h.modes())
        throw ArgumentError("make_heom_operator: expansion has " + std::to_string(exp.c.size()) +
                            " terms, hierarchy expects " + std::to_string(h.modes()));
    HeomOperator op;
    op.hierarchy = &h;
    op.expansion = exp;
    const Matrix hs = tls_hamiltonian(params);
    op.hs[0] = hs(0, 0);
    op.hs[1] = hs(0, 1);
    op.hs[2] = hs(1, 0);
    op.hs[3] = hs(1, 1);
    op.decay.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        double d = 0.0;
        for (int m = 0; m < h.modes(); ++m) d += h.occupation(i, m) * exp.mu[m];
        op.decay[i] = d;
    }
    return op;
}

HierarchyState heom_rhs(const HierarchyState& state, const MatsubaraExpansion& exp,
                        const SpinBosonParams& params) {
    const HeomOperator op = make_heom_operator(state.hierarchy, exp, params);
    HierarchyState out(state.hierarchy);
    heom_rhs(op, state.data.data(), out.data.data());
    return out;
}

HeomRun heom_run(const DensityMatrix& rho0, const TimeGrid& grid, const SpinBosonParams& params,
                 int K, int Nc, const HeomOptions& opts) {
    if (rho0.dim() != 2) throw ArgumentError("heom_run: initial state must be a TLS state");
    const HeomParams hp = HeomParams::from_spin_boson(params, K, Nc);
    const MatsubaraExpansion exp = matsubara(hp);
    const Hierarchy hier = Hierarchy::enumerate(Nc, K, opts.capacity);
    const HeomOperator op = make_heom_operator(hier, exp, params);

    HeomRun run;
    run.Nc = Nc;
    run.K = K;
    run.matrices = hier.size();
    run.times.reserve(grid.size());
    run.states.reserve(grid.size());

    Vector y0 = Vector::Zero(static_cast<Eigen::Index>(4 * hier.size()));
    y0(0) = rho0(0, 0);
    y0(1) = rho0(0, 1);
    y0(2) = rho0(1, 0);
    y0(3) = rho0(1, 1);

    RhsFunction f = [&op](double, const Vector& y, Vector& dy) { heom_rhs(op, y.data(), dy.data()); };
    Observer observe = [&run](std::size_t, double t, const Vector& y) {
        Matrix rho(2, 2);
        rho << y(0), y(1), y(2), y(3);
        const double tr_err = std::abs(rho.trace() - cplx(1.0));
        const double herm = hermiticity_defect(rho);
        if (tr_err > kTrajectoryInvariantTol)
            throw IntegrationError("heom_run: trace drifted by " + std::to_string(tr_err), t);
        if (herm > kTrajectoryInvariantTol)
            throw IntegrationError("heom_run: hermiticity defect " + std::to_string(herm), t);
        run.max_trace_error = std::max(run.max_trace_error, tr_err);
        run.max_hermiticity_defect = std::max(run.max_hermiticity_defect, herm);
        run.times.push_back(t);
        run.states.push_back(DensityMatrix::unchecked(0.5 * (rho + rho.adjoint()), Space::tls));
    };
    IntegratorOptions io;
    io.rtol = opts.rtol;
    io.atol = opts.rtol * 1e-3;
    run.stats = integrate_dopri5(f, std::move(y0), grid, observe, io);
    return run;
}

namespace {

double max_population_change(const HeomRun& a, const HeomRun& b) {
    double change = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        change = std::max(change, std::abs(a.states[i](0, 0).real() - b.states[i](0, 0).real()));
    return change;
}

}  // namespace

HeomResult heom_propagate(const DensityMatrix& rho0, const TimeGrid& grid,
                          const SpinBosonParams& params, int start_K, int start_Nc,
                          const HeomOptions& opts) {
    if (opts.Nc_step <= 0) throw ArgumentError("heom_propagate: Nc_step must be positive");
    if (opts.K_step < 0) throw ArgumentError("heom_propagate: K_step must be >= 0");
    HeomResult result;
    int Nc = start_Nc, K = start_K;
    result.run = heom_run(rho0, grid, params, K, Nc, opts);
    result.record.push_back({Nc, K, std::numeric_limits<double>::quiet_NaN()});

    auto refine = [&](int next_Nc, int next_K) {
        if (next_Nc > opts.max_Nc || next_K > opts.max_K)
            throw ConvergenceError("heom_propagate: no convergence within Nc <= " + std::to_string(opts.max_Nc) +
                                   ", K <= " + std::to_string(opts.max_K) + " (last change " +
                                   std::to_string(result.record.back().change) + " at Nc = " +
                                   std::to_string(Nc) + ", K = " + std::to_string(K) + ")");
        HeomRun next = heom_run(rho0, grid, params, next_K, next_Nc, opts);
        const double change = max_population_change(result.run, next);
        Nc = next_Nc;
        K = next_K;
        result.record.push_back({Nc, K, change});
        result.run = std::move(next);
        return change;
    };

    while (true) {
        // deepen the hierarchy until another tier no longer matters
        while (refine(Nc + opts.Nc_step, K) >= opts.convergence_tol) {
        }
        if (opts.K_step == 0) break;
        // then check one more Matsubara term at this depth
        if (refine(Nc, K + opts.K_step) < opts.convergence_tol) break;
    }
    result.converged = true;
    return result;
}

}  // namespace sbrc
