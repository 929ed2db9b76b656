// scenario.hpp — scenario configuration, orchestration of the three solvers
// and the measures, sweeps, and the files a run leaves behind.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbrc/config.hpp"
#include "sbrc/core.hpp"
#include "sbrc/csv.hpp"
#include "sbrc/heom.hpp"
#include "sbrc/measures.hpp"
#include "sbrc/rcme.hpp"

namespace sbrc {

inline constexpr const char* kSoftwareName = "sbrc";
inline constexpr const char* kSoftwareVersion = "0.1.0";

enum class Solver { rcme, weak, heom };
enum class Measure { population, qmi, nongauss, steady, eigenbasis };
enum class Mode { dynamics, steady, sweep };
enum class SweepAxis { alpha, beta };

const char* to_string(Solver s);
const char* to_string(Measure m);
const char* to_string(Mode m);
const char* to_string(SweepAxis a);

struct RcmeSettings {
    double truncation_tol = 1e-3;  // max-over-time |rho_11| change when M doubles
    int first_M = 4;
    int max_M = kMaxDenseTruncation;  // beyond this only the slow adaptive path is left
    bool accept_unconverged = false;  // report the max_M run (flagged) instead of failing
    PropagationMethod method = PropagationMethod::exponential;
    double tol = 1e-8;                // adaptive integrator tolerance
    double positivity_floor = -1e-4;  // applied to the reduced TLS state
};

struct HeomSettings {
    double convergence_tol = 5e-4;
    double rtol = 1e-8;
    int start_Nc = 4;
    int start_K = 0;
    int Nc_step = 2;
    int K_step = 1;
    int max_Nc = 160;
    int max_K = 8;
    double t_steady = 300.0;  // long-time point used as the HEOM steady state
    int steady_samples = 301;
};

struct ScenarioConfig {
    std::string name = "custom";
    Mode mode = Mode::dynamics;
    SpinBosonParams params;
    double ratio = 100.0;  // Omega / omega_c
    double t_max = 35.0;
    int samples = 351;
    std::vector<Solver> solvers{Solver::rcme};
    std::vector<Measure> measures{Measure::population};
    RcmeSettings rcme;
    HeomSettings heom;
    SweepAxis sweep_axis = SweepAxis::alpha;  // alpha values are pi * alpha
    std::vector<double> sweep_values;

    bool has(Solver s) const;
    bool has(Measure m) const;
    TimeGrid grid() const { return TimeGrid::uniform(t_max, samples); }

    // Throws ValidationError with the dotted key of the offending field.
    void validate() const;

    // Unknown keys and malformed values throw ValidationError.
    static ScenarioConfig from_document(const ConfigDocument& doc);
    // Every field, fully resolved; from_document(to_document()) round-trips.
    ConfigDocument to_document() const;
};

std::vector<std::string> builtin_scenario_names();

// The figure scenarios. Most are a single run; fig2 holds a weak and a
// strong coupling run (labelled by `name`). Throws ValidationError for an
// unknown name.
std::vector<ScenarioConfig> builtin_scenario(const std::string& name);

// Time-dependent results on the scenario grid.
struct DynamicsResult {
    std::vector<double> times;
    std::vector<double> rho11_rcme, rho11_weak, rho11_heom;
    std::vector<StateMeasures> rcme_measures;  // when qmi or nongauss is requested
    std::optional<TruncationResult> truncation;
    std::optional<HeomResult> heom;
    MappedParams mapped;
    double rcme_min_joint_eigenvalue = 0.0;
    double rcme_min_tls_eigenvalue = 0.0;
    double max_trace_error = 0.0;
    double max_hermiticity_defect = 0.0;
    std::vector<std::string> warnings;
};

// Throws the solver's error (with scenario context) on failure.
DynamicsResult run_dynamics(const ScenarioConfig& config);

// Steady-state observables at the config's parameters.
struct SteadyResult {
    double pi_alpha = 0.0;
    double beta = 0.0;
    EigenbasisObservables rcme;
    EigenbasisObservables thermal_h0;
    double ln_ratio_gibbs_hs = 0.0;
    double qmi_ss = 0.0, nongauss_ss = 0.0;
    double qmi_thermal_h0 = 0.0, nongauss_thermal_h0 = 0.0;
    double tls_trace_distance = 0.0;  // RCME steady vs reduced thermal state of H0
    int M = 0;
    std::vector<TruncationStep> record;
    std::optional<EigenbasisObservables> heom;
    int heom_Nc = -1, heom_K = -1;
    std::vector<std::string> warnings;
};

SteadyResult run_steady(const ScenarioConfig& config);

// Fixed sweep column names (heom columns are appended when requested).
std::vector<std::string> sweep_header(bool with_heom);

// One row per value, in input order. Failed points become error rows (NaN
// numbers, message in `status`). Points run concurrently on `threads`
// workers.
CsvTable sweep(const ScenarioConfig& config, int threads = 1);

struct RunReport {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> summary;
    std::vector<std::string> warnings;
};

// Runs config.mode and writes CSVs plus manifest.json into out_dir (created
// if missing). Throws IoError when out_dir is not writable.
RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, int threads = 1);

// CSV schemas shared by run_scenario and the golden tests.
CsvTable dynamics_table(const ScenarioConfig& config, const DynamicsResult& r);
CsvTable measures_table(const DynamicsResult& r);
CsvTable steady_table(const ScenarioConfig& config, const std::vector<std::optional<SteadyResult>>& points,
                      const std::vector<std::string>& errors);

// Spin-boson to RC mapping summary plus the reconstructed spectral density
// on (0, 10 omega_c]: omega, j_sb, j_sb_rc, rel_error.
CsvTable mapping_table(const SpinBosonParams& params, double ratio, int points = 200);

}  // namespace sbrc
