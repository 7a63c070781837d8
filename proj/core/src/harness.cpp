#include "ksweep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ksweep {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem", {"name", "eps", "omega", "transition_width", "final_time"}},
      {"mesh", {"nx", "nv"}},
      {"scheme", {"time", "dt", "dt_exponent"}},
      {"solver",
       {"method", "ddsa", "outer_tol", "inner_tol", "aa_window", "aa_relax", "max_sweeps",
        "inner", "fc", "fc_lo", "fc_hi", "ddsa_beta0"}},
      {"output", {"dir", "field"}},
      {"study",
       {"solvers", "ddsa", "dt_exponents", "levels", "cell_shift", "dt_shift", "eps", "contraction_dt",
        "contraction_tol"}},
  };
  return keys;
}

template <class T>
T convert(const std::string& key, const std::string& raw) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(raw));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("invalid value for " + key + ": '" + raw + "'");
  }
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = boost::to_lower_copy(boost::trim_copy(raw));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(", "), boost::token_compress_on);
  parts.erase(std::remove_if(parts.begin(), parts.end(),
                             [](const std::string& s) { return s.empty(); }),
              parts.end());
  return parts;
}

// Integer list; "a-b" expands to the inclusive range.
std::vector<int> int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  for (const std::string& p : split_list(raw)) {
    const auto dash = p.find('-', 1);
    if (dash != std::string::npos) {
      const int a = convert<int>(key, p.substr(0, dash));
      const int b = convert<int>(key, p.substr(dash + 1));
      if (b < a) throw ConfigError("empty range in " + key);
      for (int k = a; k <= b; ++k) out.push_back(k);
    } else {
      out.push_back(convert<int>(key, p));
    }
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string method_label(Method m, bool ddsa) { return to_string(m) + (ddsa ? "+ddsa" : ""); }

}  // namespace

std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5E", v);
  return buf;
}

ProblemConfig HarnessConfig::build_problem() const {
  ProblemConfig p;
  if (problem == "diode") {
    p = diode(eps, parse_omega_variant(omega), transition_width);
  } else if (problem == "manufactured") {
    p = manufactured(eps);
  } else {
    throw ConfigError("unknown problem: " + problem);
  }
  if (final_time) p.final_time = *final_time;
  return p;
}

SolverConfig HarnessConfig::resolved_solver(const ProblemConfig& p) const {
  SolverConfig s = solver;
  if (!fc_given) s.fc_enabled = p.fc_enabled;
  if (!tol_given && p.tolerance > 0) s.outer_tol = p.tolerance;
  return s;
}

TimeConfig HarnessConfig::resolved_time(const ProblemConfig& p) const {
  TimeConfig t = time;
  t.final_time = p.final_time;
  if (dt_given)
    t.dt = time.dt;
  else if (dt_exponent)
    t.dt = p.final_time / std::pow(2.0, *dt_exponent);
  else
    t.dt = p.final_time / 2.0;
  t.solver = resolved_solver(p);
  return t;
}

HarnessConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  HarnessConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError("key outside any section: " + section);
      throw ConfigError("unknown section: [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key: " + section + "." + key);
      const std::string raw = node.get_value<std::string>();
      const std::string name = section + "." + key;
      if (section == "problem") {
        if (key == "name") cfg.problem = boost::trim_copy(raw);
        if (key == "eps") cfg.eps = convert<double>(name, raw);
        if (key == "omega") cfg.omega = boost::trim_copy(raw);
        if (key == "transition_width") cfg.transition_width = convert<double>(name, raw);
        if (key == "final_time") cfg.final_time = convert<double>(name, raw);
      } else if (section == "mesh") {
        if (key == "nx") cfg.nx = convert<int>(name, raw);
        if (key == "nv") cfg.nv = convert<int>(name, raw);
      } else if (section == "scheme") {
        try {
          if (key == "time") cfg.time.scheme = parse_time_scheme(boost::trim_copy(raw));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        if (key == "dt") {
          cfg.time.dt = convert<double>(name, raw);
          cfg.dt_given = true;
        }
        if (key == "dt_exponent") cfg.dt_exponent = convert<int>(name, raw);
      } else if (section == "solver") {
        SolverConfig& s = cfg.solver;
        try {
          if (key == "method") s.method = parse_method(boost::trim_copy(raw));
          if (key == "inner") s.inner = parse_inner_method(boost::trim_copy(raw));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        if (key == "ddsa") s.ddsa = to_bool(name, raw);
        if (key == "outer_tol") {
          s.outer_tol = convert<double>(name, raw);
          cfg.tol_given = true;
        }
        if (key == "inner_tol") s.inner_tol = convert<double>(name, raw);
        if (key == "aa_window") s.aa_window = convert<int>(name, raw);
        if (key == "aa_relax") s.aa_relax = convert<double>(name, raw);
        if (key == "max_sweeps") s.max_sweeps = convert<long>(name, raw);
        if (key == "fc") {
          s.fc_enabled = to_bool(name, raw);
          cfg.fc_given = true;
        }
        if (key == "fc_lo") s.fc_lo = convert<double>(name, raw);
        if (key == "fc_hi") s.fc_hi = convert<double>(name, raw);
        if (key == "ddsa_beta0") s.ddsa_beta0 = convert<double>(name, raw);
      } else if (section == "output") {
        if (key == "dir") cfg.out_dir = boost::trim_copy(raw);
        if (key == "field") cfg.write_field = to_bool(name, raw);
      } else if (section == "study") {
        StudyConfig& st = cfg.study;
        if (key == "solvers") {
          st.solvers.clear();
          for (const std::string& m : split_list(raw)) {
            try {
              st.solvers.push_back(parse_method(m));
            } catch (const std::invalid_argument& e) {
              throw ConfigError(e.what());
            }
          }
          if (st.solvers.empty()) throw ConfigError("empty solver list");
        }
        if (key == "ddsa") {
          const std::string v = boost::to_lower_copy(boost::trim_copy(raw));
          if (v == "both")
            st.ddsa_modes = {false, true};
          else
            st.ddsa_modes = {to_bool(name, raw)};
        }
        if (key == "dt_exponents") st.dt_exponents = int_list(name, raw);
        if (key == "levels") st.levels = int_list(name, raw);
        if (key == "cell_shift") st.cell_shift = convert<int>(name, raw);
        if (key == "dt_shift") st.dt_shift = convert<int>(name, raw);
        if (key == "eps") {
          st.eps_list.clear();
          for (const std::string& e : split_list(raw)) st.eps_list.push_back(convert<double>(name, e));
          if (st.eps_list.empty()) throw ConfigError("empty eps list");
        }
        if (key == "contraction_dt") st.contraction_dt = convert<double>(name, raw);
        if (key == "contraction_tol") st.contraction_tol = convert<double>(name, raw);
      }
    }
  }

  if (cfg.nx < 1 || cfg.nv < 2) throw ConfigError("mesh needs nx >= 1 and nv >= 2");
  if (!(cfg.eps > 0)) throw ConfigError("eps must be positive");
  if (cfg.dt_given && !(cfg.time.dt > 0)) throw ConfigError("dt must be positive");
  if (cfg.dt_exponent && *cfg.dt_exponent < 0) throw ConfigError("dt_exponent must be >= 0");
  if (cfg.final_time && *cfg.final_time < 0) throw ConfigError("final_time must be >= 0");
  if (!(cfg.transition_width > 0)) throw ConfigError("transition_width must be positive");
  try {
    cfg.solver.validate();
    cfg.build_problem();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(HarnessConfig& cfg, const RunOverrides& o) {
  if (o.solver) {
    try {
      cfg.solver.method = parse_method(*o.solver);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.ddsa) cfg.solver.ddsa = true;
  if (o.eps) {
    if (!(*o.eps > 0)) throw ConfigError("eps must be positive");
    cfg.eps = *o.eps;
  }
  if (o.dt) {
    if (!(*o.dt > 0)) throw ConfigError("dt must be positive");
    cfg.time.dt = *o.dt;
    cfg.dt_given = true;
  }
  if (o.out_dir) cfg.out_dir = *o.out_dir;
}

void write_steps_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out = open_out(path);
  out << kStepsHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.step << ',' << format_sci(r.t) << ',' << r.outcome.iterations << ','
        << r.outcome.sweeps << ',' << format_sci(r.outcome.residual) << ','
        << r.outcome.status.label() << (r.outcome.startup ? "+startup" : "") << ','
        << format_sci(r.outcome.wall_ms) << '\n';
  }
}

void write_iters_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out = open_out(path);
  out << kItersHeader << '\n';
  for (const RunRecord& r : records)
    for (std::size_t k = 0; k < r.outcome.history.size(); ++k)
      out << r.step << ',' << k + 1 << ',' << format_sci(r.outcome.history[k]) << '\n';
}

void write_field_csv(const std::string& path, const PhaseField& f) {
  std::ofstream out = open_out(path);
  out << kFieldHeader << '\n';
  for (const SampledPoint& p : sample_oversampled(f))
    out << format_sci(p.x) << ',' << format_sci(p.v) << ',' << format_sci(p.value) << '\n';
}

std::string summary_cell(const RunResult& r) {
  if (r.status.ok()) return std::to_string(r.total_sweeps);
  return r.status.label();
}

std::string summary_row(const HarnessConfig& cfg, const TimeConfig& t, const RunResult& r) {
  std::ostringstream s;
  s << cfg.problem << ',' << to_string(t.solver.method) << ',' << (t.solver.ddsa ? 1 : 0) << ','
    << to_string(t.scheme) << ',' << format_sci(t.dt) << ',' << r.records.size() << ','
    << r.status.label() << ',' << r.total_iterations << ',' << r.total_sweeps << ','
    << format_sci(r.total_ms) << ',' << summary_cell(r);
  return s.str();
}

std::vector<std::pair<std::string, std::string>> manifest_entries(const HarnessConfig& cfg) {
  const ProblemConfig p = cfg.build_problem();
  const TimeConfig t = cfg.resolved_time(p);
  const SolverConfig& s = t.solver;
  std::vector<std::pair<std::string, std::string>> e = {
      {"problem.name", p.name},
      {"problem.eps", format_sci(p.eps)},
      {"problem.omega", p.omega_variant},
      {"problem.omega_min", format_sci(p.omega_min)},
      {"problem.transition_width", format_sci(p.transition_width)},
      {"problem.theta", format_sci(p.theta)},
      {"problem.field_scale", format_sci(p.field_scale)},
      {"problem.poisson_scale", format_sci(p.poisson_scale)},
      {"problem.zeta", format_sci(p.zeta)},
      {"problem.x_lo", format_sci(p.x_lo)},
      {"problem.x_hi", format_sci(p.x_hi)},
      {"problem.v_lo", format_sci(p.v_lo)},
      {"problem.v_hi", format_sci(p.v_hi)},
      {"problem.x_periodic", p.x_periodic ? "true" : "false"},
      {"problem.final_time", format_sci(p.final_time)},
      {"mesh.nx", std::to_string(cfg.nx)},
      {"mesh.nv", std::to_string(cfg.nv)},
      {"scheme.time", to_string(t.scheme)},
      {"scheme.dt", format_sci(t.dt)},
      {"scheme.steps", std::to_string(step_count(t))},
      {"solver.method", to_string(s.method)},
      {"solver.ddsa", s.ddsa ? "true" : "false"},
      {"solver.outer_tol", format_sci(s.outer_tol)},
      {"solver.inner_tol", format_sci(s.inner_tol)},
      {"solver.inner", to_string(s.inner)},
      {"solver.aa_window", std::to_string(s.aa_window)},
      {"solver.aa_relax", format_sci(s.aa_relax)},
      {"solver.max_sweeps", std::to_string(s.max_sweeps)},
      {"solver.fc", s.fc_enabled ? "true" : "false"},
      {"solver.fc_lo", format_sci(s.fc_lo)},
      {"solver.fc_hi", format_sci(s.fc_hi)},
      {"solver.ddsa_beta0", format_sci(s.ddsa_beta0)},
      {"output.dir", cfg.out_dir},
      {"output.field", cfg.write_field ? "true" : "false"},
      {"study.solvers", [&] {
         std::string r;
         for (std::size_t k = 0; k < cfg.study.solvers.size(); ++k)
           r += (k ? "," : "") + to_string(cfg.study.solvers[k]);
         return r;
       }()},
      {"study.dt_exponents", join_ints(cfg.study.dt_exponents)},
      {"study.levels", join_ints(cfg.study.levels)},
      {"study.cell_shift", std::to_string(cfg.study.cell_shift)},
      {"study.dt_shift", std::to_string(cfg.study.dt_shift)},
      {"study.contraction_dt", format_sci(cfg.study.contraction_dt)},
      {"study.contraction_tol", format_sci(cfg.study.contraction_tol)},
  };
  return e;
}

void write_manifest(const std::string& path, const HarnessConfig& cfg) {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : manifest_entries(cfg)) out << k << " = " << v << '\n';
}

int exit_code_for(const Status& s) {
  switch (s.kind) {
    case StatusKind::inf: return 3;
    case StatusKind::residual: return 4;
    default: return 0;
  }
}

int run(const HarnessConfig& cfg, std::ostream& log) {
  ProblemConfig p;
  TimeConfig t;
  Discretization d;
  try {
    p = cfg.build_problem();
    t = cfg.resolved_time(p);
    step_count(t);
    d = discretize(p, cfg.nx, cfg.nv);
    if (t.solver.ddsa && p.x_periodic)
      throw ConfigError("drift-diffusion acceleration needs Dirichlet x-boundaries");
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return 2;
  }

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_manifest((dir / "manifest.ini").string(), cfg);
  const RunResult r = run_simulation(d, t, [&](const RunRecord& rec) {
    log << "step " << rec.step << " t=" << format_sci(rec.t) << " iters=" << rec.outcome.iterations
        << " sweeps=" << rec.outcome.sweeps << " status=" << rec.outcome.status.label() << '\n';
  });
  write_steps_csv((dir / "steps.csv").string(), r.records);
  write_iters_csv((dir / "iters.csv").string(), r.records);
  {
    std::ofstream out = open_out((dir / "summary.csv").string());
    out << kSummaryHeader << '\n' << summary_row(cfg, t, r) << '\n';
  }
  if (cfg.write_field) write_field_csv((dir / "field.csv").string(), r.f);
  if (p.exact_f && p.exact_E && r.status.ok()) {
    const ErrorNorms err = error_norms(r.f, r.e, p, r.records.empty() ? 0.0 : r.records.back().t);
    log << "errors: f=" << format_sci(err.f) << " E=" << format_sci(err.e) << '\n';
  }
  log << "summary: " << summary_cell(r) << '\n';
  return exit_code_for(r.status);
}

int thread_cap() {
  const char* env = std::getenv("KSWEEP_THREADS");
  if (!env) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

std::vector<EfficiencyCell> efficiency_matrix(const HarnessConfig& cfg, std::ostream& log) {
  const ProblemConfig p = cfg.build_problem();
  std::vector<EfficiencyCell> cells;
  for (bool ddsa : cfg.study.ddsa_modes) {
    if (ddsa && p.x_periodic)
      throw ConfigError("drift-diffusion acceleration needs Dirichlet x-boundaries");
    for (int k : cfg.study.dt_exponents)
      for (Method m : cfg.study.solvers)
        cells.push_back({m, ddsa, k, p.final_time / std::pow(2.0, k), {}});
  }
  const Discretization d = discretize(p, cfg.nx, cfg.nv);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      EfficiencyCell& cell = cells[c];
      TimeConfig t = cfg.resolved_time(p);
      t.dt = cell.dt;
      t.solver.method = cell.method;
      t.solver.ddsa = cell.ddsa;
      cell.result = run_simulation(d, t);
      const fs::path sub = dir / "cells" /
                           (method_label(cell.method, cell.ddsa) + "_k" +
                            std::to_string(cell.dt_exponent));
      write_steps_csv((sub / "steps.csv").string(), cell.result.records);
      write_iters_csv((sub / "iters.csv").string(), cell.result.records);
      std::lock_guard<std::mutex> lock(log_mutex);
      log << method_label(cell.method, cell.ddsa) << " dt=T_f/2^" << cell.dt_exponent << ": "
          << summary_cell(cell.result) << '\n';
    }
  };
  const int nthreads = std::min<int>(thread_cap(), static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < nthreads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  {
    std::ofstream out = open_out((dir / "efficiency.csv").string());
    out << kEfficiencyHeader << '\n';
    for (const EfficiencyCell& c : cells)
      out << to_string(c.method) << ',' << (c.ddsa ? 1 : 0) << ',' << c.dt_exponent << ','
          << format_sci(c.dt) << ',' << c.result.status.label() << ','
          << c.result.total_sweeps << ',' << format_sci(c.result.total_ms) << ','
          << summary_cell(c.result) << '\n';
  }
  {
    std::ofstream out = open_out((dir / "efficiency.txt").string());
    char buf[64];
    for (bool ddsa : cfg.study.ddsa_modes) {
      out << (ddsa ? "With DDSA" : "Without DDSA") << '\n';
      std::snprintf(buf, sizeof buf, "%-10s", "dt");
      out << buf;
      for (Method m : cfg.study.solvers) {
        std::snprintf(buf, sizeof buf, " %12s", to_string(m).c_str());
        out << buf;
      }
      out << '\n';
      for (int k : cfg.study.dt_exponents) {
        std::snprintf(buf, sizeof buf, "%-10s", ("T_f/2^" + std::to_string(k)).c_str());
        out << buf;
        for (Method m : cfg.study.solvers)
          for (const EfficiencyCell& c : cells)
            if (c.method == m && c.ddsa == ddsa && c.dt_exponent == k) {
              std::snprintf(buf, sizeof buf, " %12s", summary_cell(c.result).c_str());
              out << buf;
            }
        out << '\n';
      }
      out << '\n';
    }
  }
  return cells;
}

std::vector<ConvergenceRow> convergence_study(const HarnessConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  std::ofstream out = open_out((dir / "convergence.csv").string());
  out << kConvergenceHeader << '\n';
  std::vector<ConvergenceRow> rows;
  ProblemConfig p = manufactured(cfg.eps);
  if (cfg.final_time) p.final_time = *cfg.final_time;
  for (int level : cfg.study.levels) {
    const int n = 1 << (level + cfg.study.cell_shift);
    const Discretization d = discretize(p, n, n);
    TimeConfig t = cfg.resolved_time(p);
    t.dt = p.final_time / std::pow(2.0, level + cfg.study.dt_shift);
    t.solver.ddsa = false;
    const RunResult r = run_simulation(d, t);
    if (!r.status.ok()) {
      log << "level " << level << " failed: " << r.status.label() << '\n';
      break;
    }
    const ErrorNorms err = error_norms(r.f, r.e, p, p.final_time);
    ConvergenceRow row{level, d.mesh.dx, d.mesh.dv, t.dt, err.f, err.e, {}, {}};
    if (!rows.empty()) {
      row.rate_f = std::log2(rows.back().err_f / err.f);
      row.rate_E = std::log2(rows.back().err_E / err.e);
    }
    rows.push_back(row);
    out << level << ',' << format_sci(row.dx) << ',' << format_sci(row.dv) << ','
        << format_sci(row.dt) << ',' << format_sci(row.err_f) << ','
        << (row.rate_f ? format_sci(*row.rate_f) : "") << ',' << format_sci(row.err_E) << ','
        << (row.rate_E ? format_sci(*row.rate_E) : "") << '\n';
    out.flush();
    log << "level " << level << " err_f=" << format_sci(err.f) << " err_E=" << format_sci(err.e)
        << '\n';
  }
  return rows;
}

std::vector<ContractionRow> contraction_study(const HarnessConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  std::vector<ContractionRow> rows;
  const std::vector<std::pair<Method, bool>> methods = {
      {Method::nls_pic, false}, {Method::nls_aa, false}, {Method::nls_pic, true},
      {Method::nls_aa, true}};
  for (double eps : cfg.study.eps_list) {
    const ProblemConfig p = diode(eps, OmegaVariant::single, cfg.transition_width);
    const Discretization d = discretize(p, cfg.nx, cfg.nv);
    const PhaseField f0 = initial_field(d);
    const double dt = cfg.study.contraction_dt;
    const SweepContext ctx = step_context(d, f0, nullptr, dt, dt, TimeScheme::euler);
    const double kappa = kappa_estimates(eps, dt, ctx.omega_max(), 0.0, d.mesh.dv, 1.0).nest;
    long pic_sweeps = 0;
    for (const auto& [m, ddsa] : methods) {
      SolverConfig s = cfg.resolved_solver(p);
      s.method = m;
      s.ddsa = ddsa;
      s.outer_tol = cfg.study.contraction_tol;
      const StepResult r = advance(d, f0, nullptr, dt, dt, TimeScheme::euler, s);
      ContractionRow row;
      row.eps = eps;
      row.method = method_label(m, ddsa);
      row.iterations = r.outcome.iterations;
      row.sweeps = r.outcome.sweeps;
      row.status = r.outcome.status.label();
      row.fitted_rate = fitted_rate(r.outcome.history);
      row.kappa_nest = kappa;
      if (m == Method::nls_pic && !ddsa) pic_sweeps = row.sweeps;
      row.gain = row.sweeps > 0 ? static_cast<double>(pic_sweeps) / row.sweeps : 0.0;
      row.history = r.outcome.history;
      RunRecord rec;
      rec.step = 1;
      rec.t = dt;
      rec.outcome = r.outcome;
      char name[96];
      std::snprintf(name, sizeof name, "iters_eps%g_%s.csv", eps, row.method.c_str());
      write_iters_csv((dir / name).string(), {rec});
      log << "eps=" << eps << ' ' << row.method << ": iterations=" << row.iterations
          << " fitted=" << row.fitted_rate << " kappa=" << kappa << '\n';
      rows.push_back(std::move(row));
    }
  }
  std::ofstream out = open_out((dir / "contraction.csv").string());
  out << kContractionHeader << '\n';
  for (const ContractionRow& r : rows)
    out << format_sci(r.eps) << ',' << r.method << ',' << r.iterations << ',' << r.sweeps << ','
        << r.status << ',' << format_sci(r.fitted_rate) << ',' << format_sci(r.kappa_nest) << ','
        << format_sci(r.gain) << '\n';
  return rows;
}

}  // namespace ksweep
