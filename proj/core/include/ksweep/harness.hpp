#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksweep/problems.hpp"
#include "ksweep/timeloop.hpp"

namespace ksweep {

/// Malformed or inconsistent configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  std::vector<Method> solvers{Method::nls_aa, Method::nest_aa, Method::nls_pic,
                              Method::nest_pic};
  std::vector<bool> ddsa_modes{false, true};
  std::vector<int> dt_exponents{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> levels{1, 2, 3, 4, 5, 6};
  // Level L runs 2^(L + cell_shift) cells per direction and dt = T_f 2^-(L + dt_shift).
  int cell_shift = 0;
  int dt_shift = 0;
  std::vector<double> eps_list{0.005, 0.002};
  double contraction_dt = 0.0025;
  double contraction_tol = 1e-10;
};

struct HarnessConfig {
  std::string problem = "diode";
  double eps = 0.2;
  std::string omega = "single";
  double transition_width = kDiodeTransitionWidth;
  std::optional<double> final_time;
  int nx = 200;
  int nv = 200;
  TimeConfig time;
  bool dt_given = false;
  std::optional<int> dt_exponent;  // dt = T_f / 2^k when set
  SolverConfig solver;
  bool fc_given = false;
  bool tol_given = false;
  std::string out_dir = "out";
  bool write_field = true;
  StudyConfig study;

  /// Problem definition with config-level overrides applied.
  ProblemConfig build_problem() const;
  /// Solver settings with problem-dependent defaults applied.
  SolverConfig resolved_solver(const ProblemConfig& p) const;
  /// Time settings with the problem's final time and the resolved solver.
  TimeConfig resolved_time(const ProblemConfig& p) const;
};

/// INI text with sections [problem], [mesh], [scheme], [solver], [output],
/// [study]. Unknown sections or keys and unparsable values raise ConfigError.
HarnessConfig parse_config(const std::string& text);
HarnessConfig load_config(const std::string& path);

struct RunOverrides {
  std::optional<std::string> solver;
  bool ddsa = false;
  std::optional<double> eps;
  std::optional<double> dt;
  std::optional<std::string> out_dir;
};

void apply_overrides(HarnessConfig& cfg, const RunOverrides& o);

/// Scientific notation with six significant digits and uppercase E.
std::string format_sci(double v);

inline constexpr const char* kStepsHeader = "step,t,iterations,sweeps,residual,status,wall_ms";
inline constexpr const char* kItersHeader = "step,iter,residual";
inline constexpr const char* kSummaryHeader =
    "problem,solver,ddsa,scheme,dt,steps,status,total_iterations,total_sweeps,total_ms,cell";
inline constexpr const char* kFieldHeader = "x,v,value";
inline constexpr const char* kConvergenceHeader = "level,dx,dv,dt,err_f,rate_f,err_E,rate_E";
inline constexpr const char* kEfficiencyHeader =
    "solver,ddsa,dt_exponent,dt,status,total_sweeps,total_ms,cell";
inline constexpr const char* kContractionHeader =
    "eps,method,iterations,sweeps,status,fitted_rate,kappa_nest,gain";

void write_steps_csv(const std::string& path, const std::vector<RunRecord>& records);
void write_iters_csv(const std::string& path, const std::vector<RunRecord>& records);
void write_field_csv(const std::string& path, const PhaseField& f);

/// Table cell: total sweeps when the run converged, else the status label.
std::string summary_cell(const RunResult& r);
std::string summary_row(const HarnessConfig& cfg, const TimeConfig& t, const RunResult& r);

/// Every resolved parameter, one `key = value` per line.
std::vector<std::pair<std::string, std::string>> manifest_entries(const HarnessConfig& cfg);
void write_manifest(const std::string& path, const HarnessConfig& cfg);

/// Exit code for a run outcome: 0, 3 (INF) or 4 (budget exhausted).
int exit_code_for(const Status& s);

/// Executes one run and writes steps.csv, iters.csv, summary.csv, field.csv
/// and manifest.ini into cfg.out_dir. Returns the process exit code.
int run(const HarnessConfig& cfg, std::ostream& log);

struct EfficiencyCell {
  Method method;
  bool ddsa;
  int dt_exponent;
  double dt;
  RunResult result;
};

/// Solver x dt matrix with dt = T_f / 2^k. Cells run on up to
/// KSWEEP_THREADS threads; writes efficiency.csv and efficiency.txt.
std::vector<EfficiencyCell> efficiency_matrix(const HarnessConfig& cfg, std::ostream& log);

struct ConvergenceRow {
  int level;
  double dx, dv, dt;
  double err_f, err_E;
  std::optional<double> rate_f, rate_E;
};

/// Manufactured-solution refinement: level L uses 2^(L + cell_shift) cells per
/// direction and dt = T_f 2^-(L + dt_shift). Writes convergence.csv; a failed
/// level ends the study.
std::vector<ConvergenceRow> convergence_study(const HarnessConfig& cfg, std::ostream& log);

struct ContractionRow {
  double eps;
  std::string method;
  int iterations;
  long sweeps;
  std::string status;
  double fitted_rate;
  double kappa_nest;
  double gain;
  std::vector<double> history;
};

/// First step of the single-scale diode for each eps with NLS Picard, Anderson
/// and their DDSA variants. Writes per-method iteration histories and
/// contraction.csv.
std::vector<ContractionRow> contraction_study(const HarnessConfig& cfg, std::ostream& log);

/// Threads allowed for independent study cells (KSWEEP_THREADS, default 1).
int thread_cap();

}  // namespace ksweep
