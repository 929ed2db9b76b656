#include "sbrc/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <utility>

#include <json.hpp>

#include "sbrc/mapping.hpp"
#include "sbrc/weak.hpp"

namespace sbrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class E>
std::pair<const char*, E> entry(const char* name, E value) {
    return {name, value};
}

const std::vector<std::pair<const char*, Solver>> kSolvers = {
    entry("rcme", Solver::rcme), entry("weak", Solver::weak), entry("heom", Solver::heom)};
const std::vector<std::pair<const char*, Measure>> kMeasures = {
    entry("population", Measure::population), entry("qmi", Measure::qmi), entry("nongauss", Measure::nongauss),
    entry("steady", Measure::steady), entry("eigenbasis", Measure::eigenbasis)};
const std::vector<std::pair<const char*, Mode>> kModes = {
    entry("dynamics", Mode::dynamics), entry("steady", Mode::steady), entry("sweep", Mode::sweep)};
const std::vector<std::pair<const char*, SweepAxis>> kAxes = {entry("alpha", SweepAxis::alpha),
                                                               entry("beta", SweepAxis::beta)};
const std::vector<std::pair<const char*, PropagationMethod>> kMethods = {
    entry("exponential", PropagationMethod::exponential), entry("adaptive", PropagationMethod::adaptive)};

template <class E>
const char* name_of(const std::vector<std::pair<const char*, E>>& table, E value) {
    for (const auto& [n, v] : table)
        if (v == value) return n;
    return "?";
}

template <class E>
E parse_enum(const std::vector<std::pair<const char*, E>>& table, const std::string& key, const std::string& text) {
    for (const auto& [n, v] : table)
        if (text == n) return v;
    std::string options;
    for (const auto& [n, v] : table) options += (options.empty() ? "" : ", ") + std::string(n);
    throw ValidationError(key, "unknown value '" + text + "' (expected one of " + options + ")");
}

template <class E>
std::vector<E> parse_enum_list(const std::vector<std::pair<const char*, E>>& table, const std::string& key,
                               const std::vector<std::string>& items) {
    std::vector<E> out;
    for (const auto& item : items) {
        const E v = parse_enum(table, key, item);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    // canonical order keeps column layouts independent of how the list was written
    std::sort(out.begin(), out.end());
    return out;
}

template <class E>
std::string join_enum(const std::vector<std::pair<const char*, E>>& table, const std::vector<E>& values) {
    std::string out;
    for (E v : values) out += (out.empty() ? "" : ", ") + std::string(name_of(table, v));
    return out;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (double v : values) out += (out.empty() ? "" : ", ") + format_number(v);
    return out;
}

// Re-raises a library error with the scenario name prepended, keeping its type.
template <class F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const IntegrationError& e) {
        throw IntegrationError(context + ": " + e.what(), e.time_reached());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(context + ": " + e.what());
    } catch (const CapacityError& e) {
        throw CapacityError(context + ": " + e.what());
    } catch (const DegeneracyError& e) {
        throw DegeneracyError(context + ": " + e.what());
    } catch (const InvalidMomentsError& e) {
        throw InvalidMomentsError(context + ": " + e.what());
    } catch (const SolverError& e) {
        throw SolverError(context + ": " + e.what());
    } catch (const ValidationError& e) {
        std::string what = e.what();
        const std::string prefix = e.field() + ": ";
        if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
        throw ValidationError(e.field(), context + ": " + what);
    } catch (const ArgumentError& e) {
        throw ArgumentError(context + ": " + e.what());
    }
}

DensityMatrix excited_site_state() {
    Matrix up = Matrix::Zero(2, 2);
    up(0, 0) = 1.0;
    return DensityMatrix(up, Space::tls);
}

// eigenbasis_observables, but with the +inf sentinel instead of an error when
// the excited population vanishes.
EigenbasisObservables observables_or_sentinel(const Matrix& rho_s, const SpinBosonParams& params) {
    try {
        return eigenbasis_observables(rho_s, params);
    } catch (const RatioOverflowError&) {
        const Matrix v = tls_eigenbasis(params);
        const Matrix r = v.adjoint() * rho_s * v;
        EigenbasisObservables o;
        o.ratio = std::numeric_limits<double>::infinity();
        o.ln_ratio = std::numeric_limits<double>::infinity();
        o.coherence = r(0, 1);
        return o;
    }
}

double min_tls_eigenvalue(const Trajectory& traj) {
    double m = 1.0;
    for (const auto& s : traj.states) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(partial_trace(s.matrix(), Space::tls), Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues()(0));
    }
    return m;
}

}  // namespace

const char* to_string(Solver s) { return name_of(kSolvers, s); }
const char* to_string(Measure m) { return name_of(kMeasures, m); }
const char* to_string(Mode m) { return name_of(kModes, m); }
const char* to_string(SweepAxis a) { return name_of(kAxes, a); }

bool ScenarioConfig::has(Solver s) const { return std::find(solvers.begin(), solvers.end(), s) != solvers.end(); }
bool ScenarioConfig::has(Measure m) const {
    return std::find(measures.begin(), measures.end(), m) != measures.end();
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ValidationError("name", "must not be empty");
    if (!(params.epsilon == params.epsilon) || !std::isfinite(params.epsilon))
        throw ValidationError("params.epsilon", "must be finite");
    if (!(params.delta > 0)) throw ValidationError("params.delta", "must be > 0");
    if (!(params.alpha >= 0)) throw ValidationError("params.pi_alpha", "must be >= 0");
    if (!(params.omega_c > 0)) throw ValidationError("params.omega_c", "must be > 0");
    if (!(params.beta > 0)) throw ValidationError("params.beta", "must be > 0");
    if (!(ratio >= kMinMappingRatio))
        throw ValidationError("mapping.ratio", "must be >= " + format_number(kMinMappingRatio));
    if (!(t_max > 0)) throw ValidationError("grid.t_max", "must be > 0");
    if (samples < 2) throw ValidationError("grid.samples", "must be >= 2");
    if (solvers.empty()) throw ValidationError("solvers", "at least one solver is required");
    if (measures.empty()) throw ValidationError("measures", "at least one measure is required");
    if ((has(Measure::qmi) || has(Measure::nongauss)) && !has(Solver::rcme))
        throw ValidationError("measures", "qmi and nongauss need the rcme solver");
    if (!(rcme.truncation_tol > 0)) throw ValidationError("rcme.truncation_tol", "must be > 0");
    if (rcme.first_M < 1) throw ValidationError("rcme.first_M", "must be >= 1");
    if (rcme.max_M < rcme.first_M) throw ValidationError("rcme.max_M", "must be >= rcme.first_M");
    if (!(rcme.tol > 0)) throw ValidationError("rcme.tol", "must be > 0");
    if (!(rcme.positivity_floor <= 0)) throw ValidationError("rcme.positivity_floor", "must be <= 0");
    if (!(heom.convergence_tol > 0)) throw ValidationError("heom.convergence_tol", "must be > 0");
    if (!(heom.rtol > 0)) throw ValidationError("heom.rtol", "must be > 0");
    if (heom.start_Nc < 0) throw ValidationError("heom.start_Nc", "must be >= 0");
    if (heom.start_K < 0) throw ValidationError("heom.start_K", "must be >= 0");
    if (heom.Nc_step < 1) throw ValidationError("heom.Nc_step", "must be >= 1");
    if (heom.K_step < 0) throw ValidationError("heom.K_step", "must be >= 0");
    if (heom.max_Nc < heom.start_Nc) throw ValidationError("heom.max_Nc", "must be >= heom.start_Nc");
    if (heom.max_K < heom.start_K) throw ValidationError("heom.max_K", "must be >= heom.start_K");
    if (!(heom.t_steady > 0)) throw ValidationError("heom.t_steady", "must be > 0");
    if (heom.steady_samples < 2) throw ValidationError("heom.steady_samples", "must be >= 2");
    if (mode == Mode::sweep) {
        if (sweep_values.empty()) throw ValidationError("sweep.values", "must not be empty");
        for (double v : sweep_values) {
            if (sweep_axis == SweepAxis::alpha && !(v >= 0))
                throw ValidationError("sweep.values", "pi_alpha values must be >= 0");
            if (sweep_axis == SweepAxis::beta && !(v > 0))
                throw ValidationError("sweep.values", "beta values must be > 0");
        }
    }
}

ScenarioConfig ScenarioConfig::from_document(const ConfigDocument& doc) {
    doc.check_keys({"name", "mode", "solvers", "measures", "params.epsilon", "params.delta", "params.pi_alpha",
                    "params.alpha", "params.omega_c", "params.beta", "mapping.ratio", "grid.t_max", "grid.samples",
                    "sweep.axis", "sweep.values", "rcme.truncation_tol", "rcme.first_M", "rcme.max_M",
                    "rcme.accept_unconverged", "rcme.method", "rcme.tol", "rcme.positivity_floor", "heom.convergence_tol", "heom.rtol",
                    "heom.start_Nc", "heom.start_K", "heom.Nc_step", "heom.K_step", "heom.max_Nc", "heom.max_K",
                    "heom.t_steady", "heom.steady_samples"});
    ScenarioConfig c;
    c.name = doc.get_string("name", c.name);
    if (doc.has("mode")) c.mode = parse_enum(kModes, "mode", *doc.get("mode"));
    if (doc.has("solvers")) c.solvers = parse_enum_list(kSolvers, "solvers", doc.get_list("solvers", {}));
    if (doc.has("measures")) c.measures = parse_enum_list(kMeasures, "measures", doc.get_list("measures", {}));

    c.params.epsilon = doc.get_double("params.epsilon", c.params.epsilon);
    c.params.delta = doc.get_double("params.delta", c.params.delta);
    c.params.omega_c = doc.get_double("params.omega_c", c.params.omega_c);
    c.params.beta = doc.get_double("params.beta", c.params.beta);
    if (doc.has("params.pi_alpha") && doc.has("params.alpha"))
        throw ValidationError("params.alpha", "give either params.alpha or params.pi_alpha, not both");
    if (doc.has("params.pi_alpha")) c.params.alpha = doc.get_double("params.pi_alpha", 0.0) / pi;
    if (doc.has("params.alpha")) c.params.alpha = doc.get_double("params.alpha", 0.0);

    c.ratio = doc.get_double("mapping.ratio", c.ratio);
    c.t_max = doc.get_double("grid.t_max", c.t_max);
    c.samples = doc.get_int("grid.samples", c.samples);
    if (doc.has("sweep.axis")) c.sweep_axis = parse_enum(kAxes, "sweep.axis", *doc.get("sweep.axis"));
    c.sweep_values = doc.get_double_list("sweep.values", c.sweep_values);

    c.rcme.truncation_tol = doc.get_double("rcme.truncation_tol", c.rcme.truncation_tol);
    c.rcme.first_M = doc.get_int("rcme.first_M", c.rcme.first_M);
    c.rcme.max_M = doc.get_int("rcme.max_M", c.rcme.max_M);
    if (doc.has("rcme.accept_unconverged")) {
        const std::string v = *doc.get("rcme.accept_unconverged");
        if (v != "true" && v != "false")
            throw ValidationError("rcme.accept_unconverged", "must be true or false, got '" + v + "'");
        c.rcme.accept_unconverged = v == "true";
    }
    if (doc.has("rcme.method")) c.rcme.method = parse_enum(kMethods, "rcme.method", *doc.get("rcme.method"));
    c.rcme.tol = doc.get_double("rcme.tol", c.rcme.tol);
    c.rcme.positivity_floor = doc.get_double("rcme.positivity_floor", c.rcme.positivity_floor);

    c.heom.convergence_tol = doc.get_double("heom.convergence_tol", c.heom.convergence_tol);
    c.heom.rtol = doc.get_double("heom.rtol", c.heom.rtol);
    c.heom.start_Nc = doc.get_int("heom.start_Nc", c.heom.start_Nc);
    c.heom.start_K = doc.get_int("heom.start_K", c.heom.start_K);
    c.heom.Nc_step = doc.get_int("heom.Nc_step", c.heom.Nc_step);
    c.heom.K_step = doc.get_int("heom.K_step", c.heom.K_step);
    c.heom.max_Nc = doc.get_int("heom.max_Nc", c.heom.max_Nc);
    c.heom.max_K = doc.get_int("heom.max_K", c.heom.max_K);
    c.heom.t_steady = doc.get_double("heom.t_steady", c.heom.t_steady);
    c.heom.steady_samples = doc.get_int("heom.steady_samples", c.heom.steady_samples);
    c.validate();
    return c;
}

ConfigDocument ScenarioConfig::to_document() const {
    ConfigDocument d;
    d.set("name", name);
    d.set("mode", to_string(mode));
    d.set("solvers", join_enum(kSolvers, solvers));
    d.set("measures", join_enum(kMeasures, measures));
    d.set("params.epsilon", format_number(params.epsilon));
    d.set("params.delta", format_number(params.delta));
    d.set("params.alpha", format_number(params.alpha));
    d.set("params.omega_c", format_number(params.omega_c));
    d.set("params.beta", format_number(params.beta));
    d.set("mapping.ratio", format_number(ratio));
    d.set("grid.t_max", format_number(t_max));
    d.set("grid.samples", std::to_string(samples));
    d.set("sweep.axis", to_string(sweep_axis));
    if (!sweep_values.empty()) d.set("sweep.values", join_numbers(sweep_values));
    d.set("rcme.truncation_tol", format_number(rcme.truncation_tol));
    d.set("rcme.first_M", std::to_string(rcme.first_M));
    d.set("rcme.max_M", std::to_string(rcme.max_M));
    d.set("rcme.accept_unconverged", rcme.accept_unconverged ? "true" : "false");
    d.set("rcme.method", name_of(kMethods, rcme.method));
    d.set("rcme.tol", format_number(rcme.tol));
    d.set("rcme.positivity_floor", format_number(rcme.positivity_floor));
    d.set("heom.convergence_tol", format_number(heom.convergence_tol));
    d.set("heom.rtol", format_number(heom.rtol));
    d.set("heom.start_Nc", std::to_string(heom.start_Nc));
    d.set("heom.start_K", std::to_string(heom.start_K));
    d.set("heom.Nc_step", std::to_string(heom.Nc_step));
    d.set("heom.K_step", std::to_string(heom.K_step));
    d.set("heom.max_Nc", std::to_string(heom.max_Nc));
    d.set("heom.max_K", std::to_string(heom.max_K));
    d.set("heom.t_steady", format_number(heom.t_steady));
    d.set("heom.steady_samples", std::to_string(heom.steady_samples));
    return d;
}

std::vector<std::string> builtin_scenario_names() {
    return {"fig1a", "fig1b", "fig2", "fig3", "fig4a", "fig4b"};
}

std::vector<ScenarioConfig> builtin_scenario(const std::string& name) {
    // epsilon = 0.5, omega_c = 0.05, beta = 0.95 throughout
    ScenarioConfig base;
    base.params = SpinBosonParams::from_pi_alpha(0.5, 0.1, 0.05, 0.95);
    base.name = name;

    if (name == "fig1a" || name == "fig1b") {
        ScenarioConfig c = base;
        c.params = SpinBosonParams::from_pi_alpha(0.5, name == "fig1a" ? 0.1 : 2.5, 0.05, 0.95);
        c.mode = Mode::dynamics;
        c.solvers = {Solver::rcme, Solver::weak, Solver::heom};
        c.measures = {Measure::population};
        c.t_max = 35.0;
        c.samples = 351;
        // at pi*alpha = 2.5 the RC needs more levels than the dense limit allows
        c.rcme.accept_unconverged = name == "fig1b";
        return {c};
    }
    if (name == "fig2") {
        std::vector<ScenarioConfig> runs;
        for (const auto& [label, pa] : {std::pair{"weak", 0.1}, std::pair{"strong", 2.5}}) {
            ScenarioConfig c = base;
            c.name = std::string("fig2-") + label;
            c.params = SpinBosonParams::from_pi_alpha(0.5, pa, 0.05, 0.95);
            c.mode = Mode::dynamics;
            c.solvers = {Solver::rcme};
            c.measures = {Measure::population, Measure::qmi, Measure::nongauss, Measure::steady};
            c.t_max = 300.0;
            c.samples = 601;
            runs.push_back(c);
        }
        return runs;
    }
    if (name == "fig3" || name == "fig4b") {
        ScenarioConfig c = base;
        c.mode = Mode::sweep;
        c.sweep_axis = SweepAxis::alpha;
        c.solvers = {Solver::rcme};
        c.measures = {Measure::qmi, Measure::nongauss, Measure::steady, Measure::eigenbasis};
        if (name == "fig3") {
            c.sweep_values = {0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5};
        } else {
            c.solvers = {Solver::rcme, Solver::heom};
            c.sweep_values = {0.1, 0.5, 1.0, 1.5, 2.0, 2.5};
        }
        return {c};
    }
    if (name == "fig4a") {
        ScenarioConfig c = base;
        c.params = SpinBosonParams::from_pi_alpha(0.5, 0.5, 0.05, 0.95);
        c.mode = Mode::sweep;
        c.sweep_axis = SweepAxis::beta;
        c.solvers = {Solver::rcme, Solver::heom};
        c.measures = {Measure::steady, Measure::eigenbasis};
        c.sweep_values = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5};
        return {c};
    }
    std::string names;
    for (const auto& n : builtin_scenario_names()) names += (names.empty() ? "" : ", ") + n;
    throw ValidationError("scenario", "unknown scenario '" + name + "' (builtin: " + names + ")");
}

DynamicsResult run_dynamics(const ScenarioConfig& config) {
    config.validate();
    return with_context(config.name, [&] {
        DynamicsResult r;
        const TimeGrid grid = config.grid();
        r.times = grid.points();
        r.mapped = map_to_rc(config.params, config.ratio);

        if (config.has(Solver::rcme)) {
            TruncationOptions to;
            to.tol = config.rcme.truncation_tol;
            to.first_M = config.rcme.first_M;
            to.max_M = config.rcme.max_M;
            to.accept_unconverged = config.rcme.accept_unconverged;
            to.propagation.method = config.rcme.method;
            to.propagation.tol = config.rcme.tol;
            r.truncation = converge_truncation(config.params, r.mapped, grid, to);
            const Trajectory& traj = r.truncation->trajectory;
            if (!r.truncation->converged)
                r.warnings.push_back("rcme: truncation not converged by M = " + std::to_string(r.truncation->M) +
                                     " (rcme.truncation_tol " + format_number(config.rcme.truncation_tol) + ")");
            r.rho11_rcme = tls_population(traj);
            r.rcme_min_joint_eigenvalue = traj.min_eigenvalue;
            r.rcme_min_tls_eigenvalue = min_tls_eigenvalue(traj);
            r.max_trace_error = std::max(r.max_trace_error, traj.max_trace_error);
            r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, traj.max_hermiticity_defect);
            if (r.rcme_min_tls_eigenvalue < config.rcme.positivity_floor)
                throw IntegrationError("rcme: reduced TLS state lost positivity (min eigenvalue " +
                                           format_number(r.rcme_min_tls_eigenvalue) + ")",
                                       grid.back());
            if (r.rcme_min_joint_eigenvalue < config.rcme.positivity_floor)
                r.warnings.push_back("rcme: joint TLS-RC state has min eigenvalue " +
                                     format_number(r.rcme_min_joint_eigenvalue) +
                                     " (the RC master equation is not completely positive)");
            if (config.has(Measure::qmi) || config.has(Measure::nongauss)) {
                double top = 0.0;
                r.rcme_measures.reserve(traj.states.size());
                for (const auto& s : traj.states) {
                    r.rcme_measures.push_back(state_measures(s.matrix()));
                    top = std::max(top, r.rcme_measures.back().top_fock_weight);
                }
                if (top > kTruncationWarningWeight)
                    r.warnings.push_back("rcme: top two Fock levels hold up to " + format_number(top) +
                                         " of the RC population; moments are truncation-sensitive");
            }
        }
        if (config.has(Solver::weak)) {
            PropagationOptions po;
            po.method = PropagationMethod::exponential;
            const Trajectory traj =
                weak_propagate(build_weak_generator(config.params), excited_site_state(), grid, po);
            r.rho11_weak.reserve(traj.states.size());
            for (const auto& s : traj.states) r.rho11_weak.push_back(s(0, 0).real());
            r.max_trace_error = std::max(r.max_trace_error, traj.max_trace_error);
            r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, traj.max_hermiticity_defect);
        }
        if (config.has(Solver::heom)) {
            HeomOptions ho;
            ho.rtol = config.heom.rtol;
            ho.convergence_tol = config.heom.convergence_tol;
            ho.Nc_step = config.heom.Nc_step;
            ho.K_step = config.heom.K_step;
            ho.max_Nc = config.heom.max_Nc;
            ho.max_K = config.heom.max_K;
            r.heom = heom_propagate(excited_site_state(), grid, config.params, config.heom.start_K,
                                    config.heom.start_Nc, ho);
            r.rho11_heom.reserve(r.heom->run.states.size());
            for (const auto& s : r.heom->run.states) r.rho11_heom.push_back(s(0, 0).real());
            r.max_trace_error = std::max(r.max_trace_error, r.heom->run.max_trace_error);
            r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, r.heom->run.max_hermiticity_defect);
        }
        return r;
    });
}

SteadyResult run_steady(const ScenarioConfig& config) {
    config.validate();
    return with_context(config.name, [&] {
        SteadyResult r;
        r.pi_alpha = config.params.pi_alpha();
        r.beta = config.params.beta;
        const MappedParams mapped = map_to_rc(config.params, config.ratio);
        const SpinBosonParams& p = config.params;

        r.ln_ratio_gibbs_hs = observables_or_sentinel(tls_gibbs(p).matrix(), p).ln_ratio;

        // reference thermal state of H0 at the largest dense truncation
        const DensityMatrix th = thermal_state(build_h0(mapped, p, kMaxDenseTruncation), p.beta, Space::tls_rc);
        const Matrix th_s = partial_trace(th.matrix(), Space::tls);
        r.thermal_h0 = observables_or_sentinel(th_s, p);
        r.qmi_thermal_h0 = mutual_information(th.matrix());
        r.nongauss_thermal_h0 = non_gaussianity(partial_trace(th.matrix(), Space::rc));

        if (config.has(Solver::rcme)) {
            const SteadyTruncationResult st =
                converge_steady_truncation(p, mapped, config.rcme.truncation_tol, config.rcme.first_M);
            r.M = st.M;
            r.record = st.record;
            const Matrix rs = partial_trace(st.state.matrix(), Space::tls);
            const Matrix rr = partial_trace(st.state.matrix(), Space::rc);
            r.rcme = observables_or_sentinel(rs, p);
            r.qmi_ss = mutual_information(st.state.matrix());
            r.nongauss_ss = non_gaussianity(rr);
            r.tls_trace_distance = trace_distance(rs, th_s);
            if (top_fock_weight(rr) > kTruncationWarningWeight)
                r.warnings.push_back("rcme steady state: top two Fock levels hold " +
                                     format_number(top_fock_weight(rr)) + " of the RC population");
        } else {
            r.rcme.ln_ratio = kNaN;
            r.rcme.coherence = kNaN;
            r.qmi_ss = r.nongauss_ss = r.tls_trace_distance = kNaN;
        }

        if (config.has(Solver::heom)) {
            HeomOptions ho;
            ho.rtol = config.heom.rtol;
            ho.convergence_tol = config.heom.convergence_tol;
            ho.Nc_step = config.heom.Nc_step;
            ho.K_step = config.heom.K_step;
            ho.max_Nc = config.heom.max_Nc;
            ho.max_K = config.heom.max_K;
            const TimeGrid grid = TimeGrid::uniform(config.heom.t_steady, config.heom.steady_samples);
            const HeomResult hr =
                heom_propagate(excited_site_state(), grid, p, config.heom.start_K, config.heom.start_Nc, ho);
            r.heom = observables_or_sentinel(hr.run.states.back().matrix(), p);
            r.heom_Nc = hr.run.Nc;
            r.heom_K = hr.run.K;
        }
        return r;
    });
}

std::vector<std::string> sweep_header(bool with_heom) {
    std::vector<std::string> h = {"pi_alpha",          "beta",
                                  "ln_ratio_rcme",     "coherence_rcme",
                                  "ln_ratio_thermal_h0", "coherence_thermal_h0",
                                  "ln_ratio_gibbs_hs", "qmi_ss",
                                  "nongauss_ss",       "qmi_thermal_h0",
                                  "nongauss_thermal_h0"};
    if (with_heom) {
        h.push_back("ln_ratio_heom");
        h.push_back("coherence_heom");
    }
    h.push_back("M");
    h.push_back("status");
    return h;
}

CsvTable steady_table(const ScenarioConfig& config, const std::vector<std::optional<SteadyResult>>& points,
                      const std::vector<std::string>& errors) {
    const bool with_heom = config.has(Solver::heom);
    CsvTable t;
    t.header = sweep_header(with_heom);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<std::string> row;
        if (points[i]) {
            const SteadyResult& s = *points[i];
            for (double v : {s.pi_alpha, s.beta, s.rcme.ln_ratio, std::abs(s.rcme.coherence), s.thermal_h0.ln_ratio,
                             std::abs(s.thermal_h0.coherence), s.ln_ratio_gibbs_hs, s.qmi_ss, s.nongauss_ss,
                             s.qmi_thermal_h0, s.nongauss_thermal_h0})
                row.push_back(format_number(v));
            if (with_heom) {
                row.push_back(format_number(s.heom ? s.heom->ln_ratio : kNaN));
                row.push_back(format_number(s.heom ? std::abs(s.heom->coherence) : kNaN));
            }
            row.push_back(std::to_string(s.M));
            row.push_back("ok");
        } else {
            row.assign(t.header.size(), "nan");
            row.back() = "error: " + (i < errors.size() ? errors[i] : std::string("unknown"));
        }
        t.add_row(std::move(row));
    }
    return t;
}

namespace {

ScenarioConfig point_config(const ScenarioConfig& config, double value) {
    ScenarioConfig c = config;
    if (config.sweep_axis == SweepAxis::alpha)
        c.params.alpha = value / pi;
    else
        c.params.beta = value;
    c.name = config.name + "[" + to_string(config.sweep_axis) + "=" + format_number(value) + "]";
    c.mode = Mode::steady;
    return c;
}

struct SweepOutcome {
    std::vector<std::optional<SteadyResult>> points;
    std::vector<std::string> errors;
};

SweepOutcome sweep_points(const ScenarioConfig& config, int threads) {
    config.validate();
    const auto n = static_cast<long>(config.sweep_values.size());
    SweepOutcome out;
    out.points.resize(static_cast<std::size_t>(n));
    out.errors.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
    for (long i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out.points[k] = run_steady(point_config(config, config.sweep_values[k]));
        } catch (const std::exception& e) {
            out.errors[k] = e.what();
        }
    }
    return out;
}

}  // namespace

CsvTable sweep(const ScenarioConfig& config, int threads) {
    const SweepOutcome o = sweep_points(config, threads);
    return steady_table(config, o.points, o.errors);
}

CsvTable dynamics_table(const ScenarioConfig& config, const DynamicsResult& r) {
    CsvTable t;
    t.header = {"t"};
    std::vector<const std::vector<double>*> cols;
    for (Solver s : config.solvers) {
        t.header.push_back(std::string("rho11_") + to_string(s));
        cols.push_back(s == Solver::rcme ? &r.rho11_rcme : s == Solver::weak ? &r.rho11_weak : &r.rho11_heom);
    }
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        std::vector<double> row{r.times[i]};
        for (const auto* c : cols) row.push_back((*c)[i]);
        t.add_numeric_row(row);
    }
    return t;
}

CsvTable measures_table(const DynamicsResult& r) {
    CsvTable t;
    t.header = {"t", "qmi_rcme", "nongauss_rcme", "negative_weight_rcme"};
    for (std::size_t i = 0; i < r.rcme_measures.size(); ++i) {
        const auto& m = r.rcme_measures[i];
        t.add_numeric_row({r.times[i], m.qmi, m.nongauss, m.negative_weight});
    }
    return t;
}

CsvTable mapping_table(const SpinBosonParams& params, double ratio, int points) {
    if (points < 1) throw ArgumentError("mapping_table: points must be >= 1");
    const MappedParams m = map_to_rc(params, ratio);
    CsvTable t;
    t.header = {"omega", "j_sb", "j_sb_rc", "rel_error"};
    for (int k = 1; k <= points; ++k) {
        const double w = 10.0 * params.omega_c * k / points;
        const double a = j_sb(w, params), b = reconstruct_j_sb(m, w);
        t.add_numeric_row({w, a, b, a > 0 ? std::abs(b - a) / a : kNaN});
    }
    return t;
}

namespace {

using nlohmann::ordered_json;

ordered_json record_json(const std::vector<TruncationStep>& record) {
    ordered_json a = ordered_json::array();
    for (const auto& s : record) a.push_back({{"M", s.M}, {"change", s.change}});
    return a;
}

ordered_json steady_json(const SteadyResult& s) {
    ordered_json j = {{"pi_alpha", s.pi_alpha},
                      {"beta", s.beta},
                      {"M", s.M},
                      {"truncation_record", record_json(s.record)},
                      {"tls_trace_distance_to_thermal_h0", s.tls_trace_distance}};
    if (s.heom) j["heom"] = {{"Nc", s.heom_Nc}, {"K", s.heom_K}};
    j["warnings"] = s.warnings;
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, int threads) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());
    omp_set_num_threads(std::max(1, threads));

    RunReport report;
    const MappedParams mapped = map_to_rc(config.params, config.ratio);
    ordered_json manifest;
    manifest["software"] = {{"name", kSoftwareName}, {"version", kSoftwareVersion}};
    manifest["scenario"] = config.name;
    manifest["mode"] = to_string(config.mode);
    ordered_json cfg = ordered_json::object();
    const ConfigDocument doc = config.to_document();
    for (const auto& [k, v] : doc.values()) cfg[k] = v;
    manifest["config"] = cfg;
    manifest["config_text"] = doc.to_text();
    manifest["mapped"] = {{"lambda", mapped.lambda}, {"Omega", mapped.Omega}, {"gamma", mapped.gamma}};
    manifest["threads"] = threads;

    auto emit = [&](const std::string& file, const CsvTable& table) {
        const auto path = out_dir / file;
        write_csv(path, table);
        report.files.push_back(path);
    };

    if (config.mode == Mode::dynamics) {
        const DynamicsResult r = run_dynamics(config);
        emit("dynamics.csv", dynamics_table(config, r));
        if (!r.rcme_measures.empty()) emit("measures.csv", measures_table(r));
        ordered_json dyn = {{"max_trace_error", r.max_trace_error},
                            {"max_hermiticity_defect", r.max_hermiticity_defect}};
        if (r.truncation) {
            dyn["rcme"] = {{"M", r.truncation->M},
                           {"converged", r.truncation->converged},
                           {"truncation_record", record_json(r.truncation->record)},
                           {"min_joint_eigenvalue", r.rcme_min_joint_eigenvalue},
                           {"min_tls_eigenvalue", r.rcme_min_tls_eigenvalue}};
            report.summary.push_back(std::string(r.truncation->converged ? "rcme: converged M = "
                                                                         : "rcme: NOT converged, M = ") +
                                     std::to_string(r.truncation->M));
        }
        if (r.heom) {
            ordered_json rec = ordered_json::array();
            for (const auto& s : r.heom->record) rec.push_back({{"Nc", s.Nc}, {"K", s.K}, {"change", s.change}});
            dyn["heom"] = {{"Nc", r.heom->run.Nc},
                           {"K", r.heom->run.K},
                           {"matrices", r.heom->run.matrices},
                           {"converged", r.heom->converged},
                           {"record", rec}};
            report.summary.push_back("heom: converged Nc = " + std::to_string(r.heom->run.Nc) +
                                     ", K = " + std::to_string(r.heom->run.K));
        }
        manifest["dynamics"] = dyn;
        report.warnings = r.warnings;
        if (config.has(Measure::steady)) {
            const SteadyResult s = run_steady(config);
            emit("steady.csv", steady_table(config, {s}, {""}));
            manifest["steady"] = steady_json(s);
            report.warnings.insert(report.warnings.end(), s.warnings.begin(), s.warnings.end());
        }
    } else if (config.mode == Mode::steady) {
        const SteadyResult s = run_steady(config);
        emit("steady.csv", steady_table(config, {s}, {""}));
        manifest["steady"] = steady_json(s);
        report.warnings = s.warnings;
        report.summary.push_back("rcme steady state: M = " + std::to_string(s.M) +
                                 ", ln(rho_gg/rho_ee) = " + format_number(s.rcme.ln_ratio));
    } else {
        const SweepOutcome o = sweep_points(config, threads);
        emit("sweep.csv", steady_table(config, o.points, o.errors));
        ordered_json pts = ordered_json::array();
        std::size_t failed = 0;
        for (std::size_t i = 0; i < o.points.size(); ++i) {
            if (o.points[i]) {
                pts.push_back(steady_json(*o.points[i]));
                report.warnings.insert(report.warnings.end(), o.points[i]->warnings.begin(),
                                       o.points[i]->warnings.end());
            } else {
                pts.push_back({{"value", config.sweep_values[i]}, {"error", o.errors[i]}});
                report.warnings.push_back("sweep point " + format_number(config.sweep_values[i]) +
                                          " failed: " + o.errors[i]);
                ++failed;
            }
        }
        manifest["sweep"] = {{"axis", to_string(config.sweep_axis)}, {"points", pts}};
        report.summary.push_back("sweep: " + std::to_string(o.points.size() - failed) + "/" +
                                 std::to_string(o.points.size()) + " points succeeded");
    }

    ordered_json files = ordered_json::array();
    for (const auto& f : report.files) files.push_back(f.filename().string());
    manifest["outputs"] = files;
    manifest["warnings"] = report.warnings;
    const auto mpath = out_dir / "manifest.json";
    write_text(mpath, manifest.dump(2) + "\n");
    report.files.push_back(mpath);
    return report;
}

}  // namespace sbrc
