#include "parasdc/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "parasdc/diag_solvers.hpp"
#include "parasdc/kernels.hpp"
#include "parasdc/parallel.hpp"

namespace parasdc {

namespace {

constexpr double kReferenceTol = 1e-12;

Vector logspace(double lo, double hi, std::size_t count) {
  Vector v(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return v;
}

Vector default_params(const std::string& letter, ExperimentKind kind) {
  if (kind == ExperimentKind::IterationCounts) {
    if (letter == "A" || letter == "B") return logspace(1e-3, 1e3, 10);
    if (letter == "C") return logspace(1e-2, 1e2, 10);
    return logspace(1e-1, 2e1, 10);
  }
  if (letter == "D") return {5.0};
  return {1.0};
}

std::size_t default_n(const std::string& letter, bool full) {
  if (letter == "B") return 64;
  if (letter == "C") return 2;
  if (letter == "D" && full) return 2047;
  return 63;
}

std::string join_doubles(const Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::string(fmt(v[i]));
  return s;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw InvalidArgument("not a count: '" + s + "'");
  return static_cast<std::size_t>(std::stoull(s));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  return f;
}

void write_manifest(const ExperimentSpec& spec, const std::map<std::string, std::string>& results) {
  if (spec.out.empty()) return;
  auto f = open_output(companion_path(spec.out, ".manifest"));
  f << manifest_text(spec);
  for (const auto& [k, v] : results) f << "result." << k << '=' << v << '\n';
}

// Which start produced the cached MIN preconditioner, when one was used.
void add_min_results(const ExperimentSpec& spec, std::map<std::string, std::string>& results) {
  if (std::find(spec.kinds.begin(), spec.kinds.end(), PreconditionerKind::MIN) == spec.kinds.end())
    return;
  const MinimizerResult& m = cached_qdelta_min_details(spec.M);
  results["min.start"] = join_doubles(m.start);
  results["min.q"] = join_doubles(m.q_opt);
  results["min.rho"] = format_double(m.rho_opt);
}

// One step of the chosen solver family.
struct StepSolver {
  std::string method;
  Preconditioner precond;
  std::optional<QDiagonalization> diag;
  double node_tol = 1e-12;

  StepResult operator()(const Problem& problem, const CollocationScheme& scheme,
                        std::span<const double> u0, double tol, std::size_t max_iter,
                        std::size_t min_iter, std::size_t workers, ErrorProbe probe) const {
    if (method == "sdc") {
      SweepConfig c;
      c.tol = tol;
      c.max_iter = max_iter;
      c.min_iter = min_iter;
      c.node_tol = node_tol;
      c.workers = workers;
      c.error_probe = std::move(probe);
      return solve_step(problem, scheme, precond, u0, c);
    }
    NewtonConfig c;
    c.tol = tol;
    c.max_iter = max_iter;
    c.min_iter = min_iter;
    c.workers = workers;
    c.error_probe = std::move(probe);
    if (method == "newton") return newton_full(problem, scheme, u0, c);
    if (method == "simplified") return newton_simplified(problem, scheme, *diag, u0, c);
    return newton_inexact(problem, scheme, precond, u0, c);
  }
};

StepSolver make_solver(const std::string& method, PreconditionerKind kind,
                       const CollocationScheme& unit) {
  StepSolver s{method, make_preconditioner(kind, unit), std::nullopt};
  if (method == "simplified") s.diag = diagonalize(unit);
  return s;
}

std::string method_label(const std::string& method) {
  if (method == "simplified") return "simplified_newton";
  if (method == "inexact") return "inexact_newton";
  return method;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Landscape: return "landscape";
    case ExperimentKind::IterationCounts: return "itercounts";
    case ExperimentKind::ConvergenceRates: return "convrates";
    case ExperimentKind::SingleRun: return "single";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  if (text == "landscape") return ExperimentKind::Landscape;
  if (text == "itercounts") return ExperimentKind::IterationCounts;
  if (text == "convrates") return ExperimentKind::ConvergenceRates;
  if (text == "single") return ExperimentKind::SingleRun;
  throw InvalidArgument("unknown experiment '" + std::string(text) + "'");
}

std::string canonical_problem(std::string_view selector) {
  std::string s(selector);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "a" || s == "heat") return "A";
  if (s == "b" || s == "advection") return "B";
  if (s == "c" || s == "vanderpol") return "C";
  if (s == "d" || s == "kpp") return "D";
  throw InvalidArgument("unknown problem '" + std::string(selector) + "'");
}

ProblemPtr build_problem(std::string_view letter, double param, std::size_t n,
                         AdvectionStencil stencil) {
  const std::string p = canonical_problem(letter);
  if (p == "A") return make_heat(param, n);
  if (p == "B") return make_advection(param, n, stencil);
  if (p == "C") return make_vanderpol(param);
  return make_kpp(param, 1, n);
}

ExperimentSpec resolve_defaults(ExperimentSpec spec) {
  for (auto& p : spec.problems) p = canonical_problem(p);
  if (!(spec.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (spec.workers == 0) spec.workers = 1;
  switch (spec.experiment) {
    case ExperimentKind::Landscape:
      if (spec.M == 0) spec.M = 2;
      if (spec.M != 2) throw InvalidArgument("the landscape needs M = 2");
      if (spec.resolution == 0) spec.resolution = 400;
      if (spec.resolution < 2) throw InvalidArgument("resolution must be >= 2");
      break;
    case ExperimentKind::IterationCounts:
      if (spec.M == 0) spec.M = 3;
      if (spec.dt == 0.0) spec.dt = spec.T > 0.0 ? spec.T : 0.1;
      if (spec.T == 0.0) spec.T = spec.dt;
      if (spec.problems.empty()) spec.problems = {"A", "B", "C", "D"};
      if (spec.kinds.empty())
        spec.kinds = {PreconditionerKind::IE, PreconditionerKind::LU, PreconditionerKind::Qpar,
                      PreconditionerKind::IEpar, PreconditionerKind::MIN};
      if (spec.params.empty() && spec.problems.size() == 1)
        spec.params = default_params(spec.problems[0], spec.experiment);
      if (spec.max_iter == 0) spec.max_iter = 100;
      break;
    case ExperimentKind::ConvergenceRates:
      if (spec.problems.empty()) spec.problems = {"D"};
      if (spec.problems != std::vector<std::string>{"D"})
        throw InvalidArgument("convergence rates are defined for problem D only");
      if (spec.M == 0) spec.M = 5;
      if (spec.T == 0.0) spec.T = 0.1;
      if (spec.steps.empty()) spec.steps = {2, 4, 8, 16};
      if (spec.params.empty()) spec.params = {5.0};
      if (spec.N == 0) spec.N = spec.full ? 2047 : 255;
      if (spec.kinds.empty()) spec.kinds = {PreconditionerKind::LU};
      if (spec.reference.empty()) spec.reference = "collocation";
      if (spec.reference != "collocation" && spec.reference != "exact")
        throw InvalidArgument("reference must be collocation or exact");
      if (spec.max_iter == 0) spec.max_iter = 100;
      break;
    case ExperimentKind::SingleRun:
      if (spec.problems.empty()) spec.problems = {"A"};
      if (spec.problems.size() != 1) throw InvalidArgument("single runs take one problem");
      if (spec.params.empty()) spec.params = default_params(spec.problems[0], spec.experiment);
      if (spec.M == 0) spec.M = 3;
      if (spec.dt == 0.0) spec.dt = 0.1;
      if (spec.steps.empty()) {
        const double n = spec.T > 0.0 ? std::round(spec.T / spec.dt) : 1.0;
        spec.steps = {static_cast<std::size_t>(std::max(1.0, n))};
      }
      spec.T = spec.dt * static_cast<double>(spec.steps[0]);
      if (spec.N == 0) spec.N = default_n(spec.problems[0], spec.full);
      if (spec.method.empty()) spec.method = "sdc";
      if (spec.method != "sdc" && spec.method != "newton" && spec.method != "simplified" &&
          spec.method != "inexact")
        throw InvalidArgument("unknown method '" + spec.method + "'");
      if (spec.kinds.empty()) spec.kinds = {PreconditionerKind::LU};
      if (spec.max_iter == 0) spec.max_iter = spec.method == "sdc" ? 100 : 50;
      break;
  }
  if (spec.experiment != ExperimentKind::Landscape && (spec.M < 2 || spec.M > 9))
    throw UnsupportedNodeCount("M must be in 2..9");
  if (spec.dt < 0.0 || spec.T < 0.0) throw InvalidArgument("dt and T must be positive");
  for (std::size_t s : spec.steps)
    if (s == 0) throw InvalidArgument("steps must be >= 1");
  if (spec.out.empty()) spec.out = std::string(to_string(spec.experiment)) + ".csv";
  return spec;
}

std::string companion_path(const std::string& out, std::string_view suffix) {
  const std::size_t slash = out.find_last_of('/');
  const std::size_t dot = out.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + std::string(suffix);
}

std::string manifest_text(const ExperimentSpec& s) {
  std::ostringstream o;
  o << "version=" << kVersion << '\n';
  o << "experiment=" << to_string(s.experiment) << '\n';
  o << "problems=" << join(s.problems, [](const std::string& p) { return p; }) << '\n';
  o << "params=" << join_doubles(s.params) << '\n';
  o << "M=" << s.M << '\n';
  o << "dt=" << format_double(s.dt) << '\n';
  o << "T=" << format_double(s.T) << '\n';
  o << "steps=" << join(s.steps, [](std::size_t v) { return std::to_string(v); }) << '\n';
  o << "tol=" << format_double(s.tol) << '\n';
  o << "kinds=" << join(s.kinds, [](PreconditionerKind k) { return to_string(k); }) << '\n';
  o << "method=" << s.method << '\n';
  o << "N=" << s.N << '\n';
  o << "full=" << (s.full ? 1 : 0) << '\n';
  o << "out=" << s.out << '\n';
  o << "workers=" << s.workers << '\n';
  o << "stencil=" << to_string(s.stencil) << '\n';
  o << "reference=" << s.reference << '\n';
  o << "resolution=" << s.resolution << '\n';
  o << "max_iter=" << s.max_iter << '\n';
  // Informational: fixed internals that influence results.
  o << "info.eigenvector_seed=0x5DC0FFEE\n";
  o << "info.node_newton_tol=" << format_double(1e-12) << '\n';
  o << "info.kernels=" << kernels::active().isa << '\n';
  if (s.experiment == ExperimentKind::IterationCounts) {
    for (const auto& p : s.problems) {
      const Vector params = s.params.empty() ? default_params(p, s.experiment) : s.params;
      o << "info.problem." << p << ".params=" << join_doubles(params) << '\n';
      o << "info.problem." << p << ".N=" << (s.N ? s.N : default_n(p, s.full)) << '\n';
    }
  }
  return o.str();
}

ExperimentSpec parse_manifest(std::string_view text) {
  ExperimentSpec s;
  bool have_experiment = false;
  for (const std::string& raw : split(text, '\n')) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("manifest line without '=': " + line);
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "experiment") {
      s.experiment = parse_experiment_kind(value);
      have_experiment = true;
    } else if (key == "problems") {
      s.problems = split(value, ',');
    } else if (key == "params") {
      s.params.clear();
      for (const auto& v : split(value, ',')) s.params.push_back(parse_double(v));
    } else if (key == "M") {
      s.M = parse_count(value);
    } else if (key == "dt") {
      s.dt = parse_double(value);
    } else if (key == "T") {
      s.T = parse_double(value);
    } else if (key == "steps") {
      s.steps.clear();
      for (const auto& v : split(value, ',')) s.steps.push_back(parse_count(v));
    } else if (key == "tol") {
      s.tol = parse_double(value);
    } else if (key == "kinds") {
      s.kinds.clear();
      for (const auto& v : split(value, ',')) s.kinds.push_back(parse_preconditioner_kind(v));
    } else if (key == "method") {
      s.method = value;
    } else if (key == "N") {
      s.N = parse_count(value);
    } else if (key == "full") {
      s.full = value == "1" || value == "true";
    } else if (key == "out") {
      s.out = value;
    } else if (key == "workers") {
      s.workers = parse_count(value);
    } else if (key == "stencil") {
      s.stencil = parse_stencil(value);
    } else if (key == "reference") {
      s.reference = value;
    } else if (key == "resolution") {
      s.resolution = parse_count(value);
    } else if (key == "max_iter") {
      s.max_iter = parse_count(value);
    } else if (key == "version" || key.starts_with("info.") || key.starts_with("result.")) {
      continue;
    } else {
      throw InvalidArgument("unknown manifest key '" + key + "'");
    }
  }
  if (!have_experiment) throw InvalidArgument("manifest has no experiment key");
  return s;
}

ExperimentSpec read_manifest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read manifest '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_manifest(buf.str());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw InvalidArgument("log-log slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LandscapeResult run_landscape(const ExperimentSpec& spec) {
  const CollocationScheme scheme = radau_right_scheme(2);
  const double eps = 1e-3;
  LandscapeResult r;
  r.grid = landscape_scan(scheme, eps, 8.0, eps, 13.0, spec.resolution, spec.workers);
  for (const Vector& start : {Vector{1.0, 1.0}, Vector{1.0, 2.0}}) {
    MinimizerResult details;
    NelderMeadOptions opts;
    details = nelder_mead(
        [&](std::span<const double> q) { return spectral_radius_objective(scheme, q); }, start,
        opts);
    r.minima.push_back(details);
  }
  if (spec.out.empty()) return r;

  auto f = open_output(spec.out);
  f << "q1,q2,rho\n";
  const std::size_t n = spec.resolution;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      f << format_double(r.grid.q1[i]) << ',' << format_double(r.grid.q2[j]) << ','
        << format_double(r.grid.at(i, j)) << '\n';
  // The minimizer rows follow the grid rows; the companion file labels them.
  for (const auto& m : r.minima)
    f << format_double(m.q_opt[0]) << ',' << format_double(m.q_opt[1]) << ','
      << format_double(m.rho_opt) << '\n';

  auto g = open_output(companion_path(spec.out, "_minima.csv"));
  g << "start_q1,start_q2,q1,q2,rho,evaluations,iterations,converged\n";
  std::map<std::string, std::string> results;
  for (std::size_t k = 0; k < r.minima.size(); ++k) {
    const auto& m = r.minima[k];
    g << format_double(m.start[0]) << ',' << format_double(m.start[1]) << ','
      << format_double(m.q_opt[0]) << ',' << format_double(m.q_opt[1]) << ','
      << format_double(m.rho_opt) << ',' << m.evaluations << ',' << m.iterations << ','
      << (m.converged ? "true" : "false") << '\n';
    const std::string key = "minimum" + std::to_string(k + 1);
    results[key + ".start"] = join_doubles(m.start);
    results[key + ".q"] = join_doubles(m.q_opt);
    results[key + ".rho"] = format_double(m.rho_opt);
  }
  write_manifest(spec, results);
  return r;
}

std::vector<IterationRow> run_iteration_counts(const ExperimentSpec& spec) {
  struct Task {
    std::string problem;
    double param;
    PreconditionerKind kind;
  };
  std::vector<Task> tasks;
  for (const auto& p : spec.problems) {
    const Vector params = spec.params.empty() ? default_params(p, spec.experiment) : spec.params;
    for (double v : params)
      for (auto k : spec.kinds) tasks.push_back({p, v, k});
  }
  const CollocationScheme scheme = radau_right_scheme(spec.M, 0.0, spec.dt);
  // Warm the MIN cache up front so concurrent tasks only read it.
  for (auto k : spec.kinds)
    if (k == PreconditionerKind::MIN) cached_qdelta_min(spec.M);

  std::vector<IterationRow> rows(tasks.size());
  parallel_for(tasks.size(), spec.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::size_t n = spec.N ? spec.N : default_n(task.problem, spec.full);
    const ProblemPtr problem = build_problem(task.problem, task.param, n, spec.stencil);
    const Preconditioner precond = make_preconditioner(task.kind, scheme);
    SweepConfig cfg;
    cfg.tol = spec.tol;
    cfg.max_iter = spec.max_iter;
    IterationRow row{task.problem, task.param, task.kind, spec.max_iter, false};
    try {
      const Vector u0 = problem->initial();
      const StepResult r = solve_step(*problem, scheme, precond, u0, cfg);
      row.converged = r.report.converged;
      if (row.converged) row.iterations = r.report.iterations;
    } catch (const Error&) {
      // divergent inner solves count as a non-converged run
    }
    rows[t] = row;
  });

  if (!spec.out.empty()) {
    auto f = open_output(spec.out);
    f << "problem,param,kind,iterations,converged\n";
    for (const auto& r : rows)
      f << r.problem << ',' << format_double(r.param) << ',' << to_string(r.kind) << ','
        << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
    std::map<std::string, std::string> results;
    add_min_results(spec, results);
    write_manifest(spec, results);
  }
  return rows;
}

RateResult run_convergence_rates(const ExperimentSpec& spec) {
  const std::vector<std::string> methods = {"sdc", "simplified", "inexact"};
  const CollocationScheme unit = radau_right_scheme(spec.M);
  const PreconditionerKind kind = spec.kinds.at(0);
  std::vector<StepSolver> solvers;
  for (const auto& m : methods) solvers.push_back(make_solver(m, kind, unit));
  const StepSolver reference_solver = make_solver("newton", kind, unit);
  const ProblemPtr problem = build_problem("D", spec.params.at(0), spec.N, spec.stencil);

  struct Task {
    std::size_t method;
    std::size_t steps;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < methods.size(); ++m)
    for (std::size_t s : spec.steps) tasks.push_back({m, s});

  RateResult result;
  result.rows.resize(tasks.size());
  std::vector<char> converged(tasks.size(), 1);
  parallel_for(tasks.size(), spec.workers, [&](std::size_t t) {
    const StepSolver& solve = solvers[tasks[t].method];
    const std::size_t n = tasks[t].steps;
    Vector u = problem->initial();
    RateRow row{method_label(methods[tasks[t].method]), spec.T / static_cast<double>(n), 0, 0, 0};
    for (std::size_t l = 0; l < n; ++l) {
      const double t0 = spec.T * static_cast<double>(l) / static_cast<double>(n);
      const double t1 = l + 1 == n ? spec.T : spec.T * static_cast<double>(l + 1) / static_cast<double>(n);
      const CollocationScheme scheme = unit.on_interval(t0, t1);
      if (l + 1 < n) {
        const StepResult r = solve(*problem, scheme, u, spec.tol, spec.max_iter, 0, 1, {});
        if (!r.report.converged) converged[t] = 0;
        const auto last = r.states.last();
        u.assign(last.begin(), last.end());
        continue;
      }
      NodeStates ref;
      if (spec.reference == "exact") {
        ref = exact_states(*problem, scheme);
      } else {
        const StepResult r = reference_solver(*problem, scheme, u, kReferenceTol, 50, 0, 1, {});
        if (!r.report.converged) converged[t] = 0;
        ref = r.states;
      }
      ErrorProbe probe = [&ref](const NodeStates& s) { return error_on_nodes(s, ref); };
      const StepResult r = solve(*problem, scheme, u, spec.tol, 3, 3, 1, probe);
      row.error_iter2 = r.report.error_history.at(1);
      row.error_iter3 = r.report.error_history.at(2);
      row.ratio = row.error_iter3 / row.error_iter2;
    }
    result.rows[t] = row;
  });
  result.all_converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c; });

  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<double> dts, ratios;
    for (std::size_t t = 0; t < tasks.size(); ++t)
      if (tasks[t].method == m) {
        dts.push_back(result.rows[t].dt);
        ratios.push_back(result.rows[t].ratio);
      }
    double slope = std::nan("");
    if (dts.size() >= 2) {
      try {
        slope = loglog_slope(dts, ratios);
      } catch (const Error&) {
      }
    }
    result.slopes[method_label(methods[m])] = slope;
  }

  if (!spec.out.empty()) {
    auto f = open_output(spec.out);
    f << "method,dt,error_iter2,error_iter3,ratio\n";
    for (const auto& r : result.rows)
      f << r.method << ',' << format_double(r.dt) << ',' << format_double(r.error_iter2) << ','
        << format_double(r.error_iter3) << ',' << format_double(r.ratio) << '\n';
    auto g = open_output(companion_path(spec.out, "_slopes.csv"));
    g << "method,slope\n";
    std::map<std::string, std::string> results;
    for (const auto& m : methods) {
      const std::string label = method_label(m);
      g << label << ',' << format_double(result.slopes[label]) << '\n';
      results["slope." + label] = format_double(result.slopes[label]);
    }
    results["all_converged"] = result.all_converged ? "true" : "false";
    add_min_results(spec, results);
    write_manifest(spec, results);
  }
  return result;
}

SingleResult run_single(const ExperimentSpec& spec) {
  const std::string letter = spec.problems.at(0);
  const ProblemPtr problem = build_problem(letter, spec.params.at(0), spec.N, spec.stencil);
  const CollocationScheme unit = radau_right_scheme(spec.M);
  const StepSolver solve = make_solver(spec.method, spec.kinds.at(0), unit);
  const std::size_t n = spec.steps.at(0);

  SingleResult out;
  Vector u = problem->initial();
  for (std::size_t l = 0; l < n; ++l) {
    const double t0 = spec.dt * static_cast<double>(l);
    const double t1 = l + 1 == n ? spec.T : spec.dt * static_cast<double>(l + 1);
    const CollocationScheme scheme = unit.on_interval(t0, t1);
    ErrorProbe probe;
    NodeStates exact;
    if (problem->has_exact()) {
      exact = exact_states(*problem, scheme);
      probe = [&exact](const NodeStates& s) { return error_on_nodes(s, exact); };
    }
    StepResult r = solve(*problem, scheme, u, spec.tol, spec.max_iter, 0, spec.workers, probe);
    if (!r.report.converged) out.converged = false;
    const auto last = r.states.last();
    u.assign(last.begin(), last.end());
    out.reports.push_back(std::move(r.report));
    if (!out.converged) break;
  }
  out.final_state = u;
  if (const auto g = problem->grid()) {
    out.grid_points = g->points();
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) out.grid_points.push_back(static_cast<double>(i));
  }

  if (!spec.out.empty()) {
    auto f = open_output(spec.out);
    f << "step,iteration,residual,error\n";
    for (std::size_t l = 0; l < out.reports.size(); ++l) {
      const RunReport& rep = out.reports[l];
      for (std::size_t k = 0; k < rep.iterations; ++k) {
        f << l << ',' << k + 1 << ',' << format_double(rep.residual_history[k]) << ',';
        if (k < rep.error_history.size()) f << format_double(rep.error_history[k]);
        f << '\n';
      }
    }
    auto g = open_output(companion_path(spec.out, "_solution.csv"));
    g << "x,u\n";
    for (std::size_t i = 0; i < u.size(); ++i)
      g << format_double(out.grid_points[i]) << ',' << format_double(u[i]) << '\n';
    std::size_t total = 0;
    for (const auto& rep : out.reports) total += rep.iterations;
    std::map<std::string, std::string> results{{"converged", out.converged ? "true" : "false"},
                                               {"total_iterations", std::to_string(total)}};
    if (spec.method == "sdc" || spec.method == "inexact") add_min_results(spec, results);
    write_manifest(spec, results);
  }
  return out;
}

}  // namespace parasdc
