// Acceptance run: one PASS/FAIL line per criterion, details indented below.
//
//   acceptance [--only 1,3,7] [--expect-fail N]...
//
// Exit status is 0 when every failing criterion was declared with
// --expect-fail and nothing threw; an expected failure that passes is
// reported but does not change the status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracle.hpp"
#include "sbrc/heom.hpp"
#include "sbrc/mapping.hpp"
#include "sbrc/measures.hpp"
#include "sbrc/rcme.hpp"
#include "sbrc/scenario.hpp"
#include "sbrc/weak.hpp"

using namespace sbrc;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> lines;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
    }
    void note(const std::string& what) { lines.push_back("      " + what); }
};

std::string fmt(const char* f, double x) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

SpinBosonParams fig(double pi_alpha, double beta = 0.95) {
    return SpinBosonParams::from_pi_alpha(0.5, pi_alpha, 0.05, beta);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Trajectory invariants gathered along the way for the property suite.
struct Invariants {
    int trajectories = 0;
    double trace = 0.0;
    double hermiticity = 0.0;
    void add(double t, double h) {
        ++trajectories;
        trace = std::max(trace, t);
        hermiticity = std::max(hermiticity, h);
    }
};

// Measure values gathered along the way for the property suite.
struct MeasureSamples {
    std::vector<double> qmi;
    std::vector<double> nongauss;
};

Invariants invariants;
MeasureSamples samples;

// RCME plus self-converged HEOM for a figure-1 case.
DynamicsResult figure1(const std::string& name) {
    ScenarioConfig c = builtin_scenario(name).front();
    c.solvers = {Solver::rcme, Solver::heom};
    DynamicsResult r = run_dynamics(c);
    invariants.add(r.max_trace_error, r.max_hermiticity_defect);
    return r;
}

void describe_runs(Outcome& o, const DynamicsResult& r) {
    std::string rec = "rcme truncation record:";
    for (const auto& s : r.truncation->record) rec += " M=" + std::to_string(s.M) + fmt(" (%.2e)", s.change);
    o.note(rec);
    o.note("heom: Nc=" + std::to_string(r.heom->run.Nc) + " K=" + std::to_string(r.heom->run.K) +
           " matrices=" + std::to_string(r.heom->run.matrices) +
           fmt(" last change %.2e", r.heom->record.back().change));
}

int rcme_extrema_1a = -1;

Outcome criterion1() {
    Outcome o;
    const DynamicsResult r = figure1("fig1a");
    describe_runs(o, r);
    o.check(r.truncation->converged, "rcme self-converged at M = " + std::to_string(r.truncation->M));
    o.check(r.heom->converged, "heom self-converged");
    const double d = max_abs_diff(r.rho11_rcme, r.rho11_heom);
    o.check(d <= 0.02, fmt("max_t |rho11 rcme - heom| = %.4f (<= 0.02)", d));
    rcme_extrema_1a = oracle::local_extrema(r.rho11_rcme);
    o.check(rcme_extrema_1a >= 3, "rcme rho11 local extrema = " + std::to_string(rcme_extrema_1a) + " (>= 3)");
    return o;
}

Outcome criterion2() {
    Outcome o;
    const DynamicsResult r = figure1("fig1b");
    describe_runs(o, r);
    o.check(r.truncation->converged, "rcme self-converged (M = " + std::to_string(r.truncation->M) + ")");
    o.check(r.heom->converged, "heom self-converged");
    const double d = max_abs_diff(r.rho11_rcme, r.rho11_heom);
    o.check(d <= 0.02, fmt("max_t |rho11 rcme - heom| = %.4f (<= 0.02)", d));
    const int ext = oracle::local_extrema(r.rho11_rcme);
    o.check(ext <= 1, "rcme rho11 local extrema = " + std::to_string(ext) + " (<= 1)");
    o.note("heom rho11 local extrema = " + std::to_string(oracle::local_extrema(r.rho11_heom)));
    if (rcme_extrema_1a >= 0)
        o.note("coherent-to-incoherent: " + std::to_string(rcme_extrema_1a) + " extrema at pi*alpha 0.1, " +
               std::to_string(ext) + " at 2.5");

    // Diagnostic only: the same comparison with a lower mapping ratio.
    TruncationOptions to;
    to.accept_unconverged = true;
    to.max_M = kMaxDenseTruncation;
    const auto grid = TimeGrid::uniform(35.0, 351);
    const auto tr = converge_truncation(fig(2.5), map_to_rc(fig(2.5), 30.0), grid, to);
    invariants.add(tr.trajectory.max_trace_error, tr.trajectory.max_hermiticity_defect);
    o.note(fmt("diagnostic, ratio 30: max_t |rho11 rcme - heom| = %.4f", max_abs_diff(tls_population(tr.trajectory),
                                                                                  r.rho11_heom)) +
           " (M = " + std::to_string(tr.M) + (tr.converged ? ", converged)" : ", not converged)"));
    return o;
}

Outcome criterion3() {
    Outcome o;
    for (double pa : {0.1, 0.5, 2.5}) {
        const auto p = fig(pa);
        const auto ss = weak_steady_state(build_weak_generator(p));
        const double d = trace_distance(ss.matrix(), tls_gibbs(p).matrix());
        o.check(d <= 1e-8, fmt("pi*alpha %.1f: ", pa) + fmt("trace distance to Gibbs(H_S) = %.2e (<= 1e-8)", d));
    }
    const std::vector<double> betas{0.5, 1.0, 1.5, 2.0, 2.5};
    std::vector<double> y;
    for (double b : betas) {
        const auto p = fig(0.5, b);
        y.push_back(eigenbasis_observables(weak_steady_state(build_weak_generator(p)), p).ln_ratio);
    }
    // least-squares line through (beta, ln ratio)
    const double n = static_cast<double>(betas.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        sx += betas[i];
        sy += y[i];
        sxx += betas[i] * betas[i];
        sxy += betas[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double resid = 0;
    for (std::size_t i = 0; i < betas.size(); ++i) resid = std::max(resid, std::abs(y[i] - slope * betas[i] - icpt));
    o.check(std::abs(slope - 1.1180340) <= 5e-8, fmt("slope = %.9f (eta = 1.1180340)", slope));
    o.check(resid < 1e-8, fmt("max fit residual = %.2e (< 1e-8)", resid));
    o.note(fmt("intercept = %.2e", icpt));
    return o;
}

ScenarioConfig steady_config(double pi_alpha, double beta, std::vector<Solver> solvers) {
    ScenarioConfig c;
    c.name = "acceptance";
    c.mode = Mode::steady;
    c.params = fig(pi_alpha, beta);
    c.solvers = std::move(solvers);
    c.measures = {Measure::steady, Measure::eigenbasis};
    return c;
}

Outcome criterion4() {
    Outcome o;
    for (double pa : {0.1, 0.5, 1.0, 2.5}) {
        const SteadyResult s = run_steady(steady_config(pa, 0.95, {Solver::rcme}));
        o.check(s.tls_trace_distance <= 0.01,
                fmt("pi*alpha %.1f: ", pa) +
                    fmt("rcme steady vs reduced thermal(H0) trace distance = %.2e (<= 0.01)", s.tls_trace_distance) +
                    " at M = " + std::to_string(s.M));
        samples.qmi.push_back(s.qmi_ss);
        samples.nongauss.push_back(s.nongauss_ss);
    }
    const SteadyResult h = run_steady(steady_config(0.5, 0.95, {Solver::heom}));
    o.note("heom at t = 300: Nc=" + std::to_string(h.heom_Nc) + " K=" + std::to_string(h.heom_K));
    const double dl = std::abs(h.heom->ln_ratio - h.thermal_h0.ln_ratio);
    const double dc = std::abs(std::abs(h.heom->coherence) - std::abs(h.thermal_h0.coherence));
    o.check(dl <= 0.05, fmt("heom ln ratio %.4f", h.heom->ln_ratio) +
                            fmt(" vs thermal %.4f", h.thermal_h0.ln_ratio) + fmt(": |diff| = %.4f (<= 0.05)", dl));
    o.check(dc <= 0.02, fmt("heom |coherence| %.4f", std::abs(h.heom->coherence)) +
                            fmt(" vs thermal %.4f", std::abs(h.thermal_h0.coherence)) +
                            fmt(": |diff| = %.4f (<= 0.02)", dc));
    return o;
}

Outcome criterion5() {
    Outcome o;
    const double eta = fig(0.5).eta();
    double prev = -1.0;
    bool increasing = true;
    std::string row = "|ln ratio - beta eta|:";
    for (double b : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const SteadyResult s = run_steady(steady_config(0.5, b, {Solver::rcme}));
        const double dev = std::abs(s.rcme.ln_ratio - b * eta);
        const double dev_th = std::abs(s.thermal_h0.ln_ratio - b * eta);
        row += fmt(" %.4f", dev) + fmt(" (thermal %.4f)", dev_th);
        increasing = increasing && dev > prev;
        prev = dev;
    }
    o.note(row);
    o.check(increasing, "rcme deviation strictly increases over beta = 0.5 .. 2.5");
    const SteadyResult s = run_steady(steady_config(0.5, 0.95, {Solver::rcme}));
    const double c = std::abs(s.rcme.coherence);
    o.check(c > 1e-8, fmt("|coherence| at beta 0.95 = %.4e (> 0)", c));
    return o;
}

Outcome criterion6() {
    Outcome o;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    for (double pa : {0.1, 2.5}) {
        ScenarioConfig c = steady_config(pa, 0.95, {Solver::rcme});
        c.measures = {Measure::steady, Measure::qmi, Measure::nongauss};
        const SteadyResult s = run_steady(c);
        const std::string tag = fmt("pi*alpha %.1f: ", pa);
        o.check(rel(s.nongauss_ss, s.nongauss_thermal_h0) <= 0.05,
                tag + fmt("delta_G %.6f", s.nongauss_ss) + fmt(" vs thermal %.6f", s.nongauss_thermal_h0) +
                    fmt(" (rel %.2e <= 0.05)", rel(s.nongauss_ss, s.nongauss_thermal_h0)));
        o.check(rel(s.qmi_ss, s.qmi_thermal_h0) <= 0.05,
                tag + fmt("QMI %.6f", s.qmi_ss) + fmt(" vs thermal %.6f", s.qmi_thermal_h0) +
                    fmt(" (rel %.2e <= 0.05)", rel(s.qmi_ss, s.qmi_thermal_h0)));
        if (pa == 2.5) o.check(s.nongauss_ss > 1e-8 && s.qmi_ss > 1e-8, "both measures > 0 at pi*alpha 2.5");
        samples.qmi.push_back(s.qmi_ss);
        samples.nongauss.push_back(s.nongauss_ss);
    }

    ScenarioConfig c = steady_config(0.1, 0.95, {Solver::rcme});
    c.mode = Mode::dynamics;
    c.measures = {Measure::population, Measure::qmi};
    c.t_max = 50.0;
    c.samples = 501;
    const DynamicsResult r = run_dynamics(c);
    invariants.add(r.max_trace_error, r.max_hermiticity_defect);
    std::vector<double> qmi;
    double neg = 0.0;
    for (const auto& m : r.rcme_measures) {
        qmi.push_back(m.qmi);
        neg = std::max(neg, m.negative_weight);
        samples.qmi.push_back(m.qmi);
        if (!std::isnan(m.nongauss)) samples.nongauss.push_back(m.nongauss);
    }
    const int ext = oracle::local_extrema(qmi);
    o.check(ext >= 1, "transient QMI at pi*alpha 0.1 on [0, 50] has " + std::to_string(ext) +
                          " local extrema (non-monotonic)");
    o.note(fmt("largest negative eigenvalue weight clipped along the run: %.2e", neg));
    return o;
}

Outcome criterion7() {
    Outcome o;
    if (invariants.trajectories > 0) {
        o.check(invariants.trace <= 1e-9 && invariants.hermiticity <= 1e-9,
                std::to_string(invariants.trajectories) + " acceptance trajectories: " +
                    fmt("trace error %.1e, ", invariants.trace) +
                    fmt("hermiticity defect %.1e (<= 1e-9)", invariants.hermiticity));
    } else {
        o.note("no acceptance trajectories in this run (criteria 1, 2, 6 skipped)");
    }

    for (double pa : {0.5, 2.5}) {
        const auto p = fig(pa);
        const auto cmp = oracle::compare_rate_operators(p, map_to_rc(p, 100.0), 4);
        o.check(cmp.worst_relative <= 1e-3 && cmp.worst_small <= 1e-7,
                fmt("pi*alpha %.1f: chi/Xi vs quadrature oracle, 2M = 8: ", pa) +
                    fmt("worst relative %.1e (<= 1e-3)", cmp.worst_relative) + " over " +
                    std::to_string(cmp.compared) + " entries");

        const auto model = RcmeModel::build(p, map_to_rc(p, 100.0), 4);
        const double scale_c = std::max(1.0, model.rates.chi.cwiseAbs().maxCoeff());
        const double scale_x = std::max(1.0, model.rates.xi.cwiseAbs().maxCoeff());
        const double hc = (model.rates.chi - model.rates.chi.adjoint()).cwiseAbs().maxCoeff() / scale_c;
        const double ax = (model.rates.xi + model.rates.xi.adjoint()).cwiseAbs().maxCoeff() / scale_x;
        o.check(hc <= 1e-12 && ax <= 1e-12, fmt("pi*alpha %.1f: ", pa) + fmt("chi Hermitian to %.1e, ", hc) +
                                                fmt("Xi anti-Hermitian to %.1e (<= 1e-12)", ax));
    }

    {
        SpinBosonParams p = fig(0.0);
        const auto grid = TimeGrid::uniform(35.0, 351);
        Matrix up = Matrix::Zero(2, 2);
        up(0, 0) = 1.0;
        const auto run = heom_run(DensityMatrix(up, Space::tls), grid, p, 1, 3);
        const double eta = p.eta(), w = p.delta / eta;
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double s = std::sin(eta * grid[i] / 2);
            err = std::max(err, std::abs(run.states[i](0, 0).real() - (1 - w * w * s * s)));
        }
        o.check(err <= 1e-6, fmt("heom at alpha = 0 vs Rabi closed form: %.1e (<= 1e-6)", err));
    }

    {
        HeomParams hp;
        hp.alpha_h = 0.1;
        hp.K = 1;
        const auto e = matsubara(hp);
        const bool ok = std::abs(e.mu[1] - 6.6138793) <= 1e-7 && std::abs(e.c[0].real() - 0.1052434) <= 1e-7 &&
                        std::abs(e.c[0].imag() + 0.0025) <= 1e-12 && std::abs(e.c[1].real() - 0.0015917) <= 1e-7 &&
                        e.c[1].imag() == 0.0;
        o.check(ok, fmt("Matsubara spot values: mu_1 = %.7f, ", e.mu[1]) + fmt("c_0 = %.7f", e.c[0].real()) +
                        fmt("%+.7fi, ", e.c[0].imag()) + fmt("c_1 = %.7f", e.c[1].real()));
    }

    {
        bool ok = true;
        int cases = 0;
        for (int K = 0; K <= 4; ++K)
            for (int Nc = 0; Nc <= 14; ++Nc) {
                double b = 1;
                for (int i = 1; i <= K + 1; ++i) b = b * (Nc + i) / i;
                const auto h = Hierarchy::enumerate(Nc, K);
                ok = ok && h.size() == static_cast<std::size_t>(std::llround(b)) &&
                     Hierarchy::count(Nc, K) == h.size();
                ++cases;
            }
        o.check(ok, "hierarchy size = C(Nc+K+1, K+1) for " + std::to_string(cases) + " (Nc, K) pairs");
    }

    {
        const auto p = fig(0.5);
        const auto m = map_to_rc(p, 100.0);
        double worst = 0.0;
        for (int k = 1; k <= 2000; ++k) {
            const double w = 10 * p.omega_c * k / 2000.0;
            worst = std::max(worst, std::abs(reconstruct_j_sb(m, w) - j_sb(w, p)) / j_sb(w, p));
        }
        o.check(worst <= 1e-2, fmt("J_SB reconstruction on (0, 10 omega_c] at ratio 100: worst %.2e (<= 1%%)", worst));
    }

    {
        // thermal states of H0 across the coupling range join the sampled values
        for (double pa : {0.1, 1.0, 2.5}) {
            const auto p = fig(pa);
            const auto th = thermal_state(build_h0(map_to_rc(p, 100.0), p, 16), p.beta, Space::tls_rc);
            samples.qmi.push_back(mutual_information(th));
            samples.nongauss.push_back(non_gaussianity(partial_trace(th.matrix(), Space::rc)));
        }
        double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin, gmin = qmin;
        for (double q : samples.qmi) qmin = std::min(qmin, q), qmax = std::max(qmax, q);
        for (double g : samples.nongauss) gmin = std::min(gmin, g);
        o.check(gmin >= 0.0, "delta_G >= 0 over " + std::to_string(samples.nongauss.size()) + " states" +
                                 fmt(" (min %.2e)", gmin));
        o.check(qmin >= 0.0 && qmax <= 2 * std::log(2.0),
                "0 <= QMI <= 2 ln 2 over " + std::to_string(samples.qmi.size()) + " states" +
                    fmt(" (range %.2e", qmin) + fmt(" .. %.4f)", qmax));
    }

    {
        Matrix f = Matrix::Zero(8, 8);
        f(1, 1) = 1.0;
        const double g = non_gaussianity(f);
        o.check(std::abs(g - 2 * std::log(2.0)) <= 1e-6,
                fmt("Fock |1> non-Gaussianity = %.9f", g) + fmt(" (2 ln 2 = %.9f)", 2 * std::log(2.0)));
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    std::vector<int> expect_fail;
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    app.add_option("--expect-fail", expect_fail, "Criterion known to fail; does not affect the exit status");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7};
    const std::set<int> selected(only.begin(), only.end());
    const std::set<int> expected(expect_fail.begin(), expect_fail.end());
    bool ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i + 1);
        if (!selected.empty() && !selected.count(n)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.check(false, std::string("error: ") + e.what());
            ok = false;  // an exception is never an expected failure
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string verdict = o.pass ? "PASS" : "FAIL";
        if (expected.count(n)) verdict += o.pass ? " (expected to fail)" : " (expected)";
        else ok = ok && o.pass;
        std::printf("criterion %d: %s  [%.1f s]\n", n, verdict.c_str(), secs);
        for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
        std::fflush(stdout);
    }
    return ok ? 0 : 1;
}
