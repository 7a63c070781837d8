#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ksweep/problems.hpp"
#include "ksweep/solver.hpp"
#include "ksweep/step_system.hpp"

namespace ksweep {

enum class TimeScheme { euler, bdf2 };

TimeScheme parse_time_scheme(const std::string& name);
std::string to_string(TimeScheme s);

struct TimeConfig {
  double dt = 0.1;
  double final_time = 1.0;
  TimeScheme scheme = TimeScheme::euler;
  SolverConfig solver;
};

/// Number of steps, zero for an empty run; throws std::invalid_argument unless
/// dt divides the final time.
int step_count(const TimeConfig& cfg);

/// A problem bound to a mesh with its time-independent discrete data.
struct Discretization {
  ProblemConfig problem;
  PhaseMesh mesh;
  FieldCoupling coupling;
  InflowMoments inflow;
};

Discretization discretize(const ProblemConfig& problem, int nx, int nv);

PhaseField initial_field(const Discretization& d);

/// Sweep context for the step ending at t_next. `f_prev` is f^{n-1} (BDF2 only).
SweepContext step_context(const Discretization& d, const PhaseField& f_now,
                          const PhaseField* f_prev, double t_next, double dt,
                          TimeScheme scheme);

struct StepResult {
  PhaseField f;
  SolverState state;
  EffectiveField e;
  StepOutcome outcome;
};

/// One step: solve the fixed point from the state of f_now, then rebuild
/// f^{n+1} with one more sweep. `f_prev` null selects implicit Euler.
StepResult advance(const Discretization& d, const PhaseField& f_now, const PhaseField* f_prev,
                   double t_next, double dt, TimeScheme scheme, const SolverConfig& cfg);

/// First step of a BDF2 run: one implicit Euler step, flagged as startup.
StepResult bdf2_startup(const Discretization& d, const PhaseField& f0, double dt,
                        const SolverConfig& cfg);

struct ErrorNorms {
  double f = 0.0;
  double e = 0.0;
};

/// Relative errors against the exact solution at time t: f in L2 over phase
/// space (4-point Gauss per direction), E in the discrete L2 norm at cell
/// midpoints after dividing by the problem's field scale. Throws
/// std::domain_error on a zero exact norm.
ErrorNorms error_norms(const PhaseField& f, const EffectiveField& e, const ProblemConfig& p,
                       double t);

/// int int f^2 / M dv dx.
double energy_monitor(const PhaseField& f, double theta);

struct RunRecord {
  int step = 0;
  double t = 0.0;
  StepOutcome outcome;
  double energy = 0.0;
};

struct RunResult {
  std::vector<RunRecord> records;
  PhaseField f;
  EffectiveField e;
  Status status;
  long total_sweeps = 0;
  long total_iterations = 0;
  double total_ms = 0.0;
  int planned_steps = 0;
  bool terminated = false;  // stopped early on INF or R
};

using StepObserver = std::function<void(const RunRecord&)>;

/// Time loop; stops at the first INF or R outcome. FC steps continue and the
/// run status reports FC.
RunResult run_simulation(const Discretization& d, const TimeConfig& cfg,
                         const StepObserver& observer = {});

}  // namespace ksweep
