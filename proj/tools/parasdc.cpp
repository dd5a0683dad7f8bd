// parasdc: experiment driver for the collocation / SDC library.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parasdc/errors.hpp"
#include "parasdc/experiments.hpp"

namespace {

struct Options {
  std::vector<std::string> problems;
  std::size_t M = 0;
  double dt = 0.0;
  double T = 0.0;
  std::vector<std::size_t> steps;
  double tol = 1e-8;
  std::vector<std::string> precond;
  std::string method;
  std::vector<double> params;
  std::size_t N = 0;
  bool full = false;
  std::string out;
  std::string from_manifest;
  std::size_t workers = 1;
  std::string stencil = "centered";
  std::string reference;
  std::size_t resolution = 0;
  std::size_t max_iter = 0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--problem", o.problems, "A|B|C|D (heat, advection, vanderpol, kpp)");
  cmd->add_option("--M", o.M, "number of collocation nodes");
  cmd->add_option("--dt", o.dt, "time-step size");
  cmd->add_option("--T", o.T, "final time");
  cmd->add_option("--steps", o.steps, "number of time steps (list for convrates)");
  cmd->add_option("--tol", o.tol, "collocation residual tolerance");
  cmd->add_option("--precond", o.precond, "ie|lu|qpar|iepar|min");
  cmd->add_option("--method", o.method, "sdc|newton|simplified|inexact");
  cmd->add_option("--param", o.params, "problem parameter values");
  cmd->add_option("--N", o.N, "spatial degrees of freedom");
  cmd->add_flag("--full", o.full, "large grid for convrates (N=2047)");
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_option("--from-manifest", o.from_manifest, "rerun the spec stored in a manifest");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--stencil", o.stencil, "advection stencil")
      ->check(CLI::IsMember({"centered", "upwind"}));
  cmd->add_option("--reference", o.reference, "convrates error reference: collocation|exact")
      ->check(CLI::IsMember({"collocation", "exact"}));
  cmd->add_option("--resolution", o.resolution, "landscape grid points per axis");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap");
}

parasdc::ExperimentSpec to_spec(const std::string& name, const Options& o, const CLI::App& cmd) {
  using namespace parasdc;
  ExperimentSpec s;
  if (!o.from_manifest.empty()) {
    s = read_manifest(o.from_manifest);
    if (s.experiment != parse_experiment_kind(name))
      throw InvalidArgument("manifest is for '" + std::string(to_string(s.experiment)) + "'");
    if (!o.out.empty()) s.out = o.out;
    if (cmd.count("--workers")) s.workers = o.workers;
    return s;
  }
  s.experiment = parse_experiment_kind(name);
  s.problems = o.problems;
  s.params = o.params;
  s.M = o.M;
  s.dt = o.dt;
  s.T = o.T;
  s.steps = o.steps;
  s.tol = o.tol;
  for (const auto& p : o.precond) s.kinds.push_back(parse_preconditioner_kind(p));
  s.method = o.method;
  s.N = o.N;
  s.full = o.full;
  s.out = o.out;
  s.workers = o.workers;
  s.stencil = parse_stencil(o.stencil);
  s.reference = o.reference;
  s.resolution = o.resolution;
  s.max_iter = o.max_iter;
  return s;
}

int run(const parasdc::ExperimentSpec& spec) {
  using namespace parasdc;
  switch (spec.experiment) {
    case ExperimentKind::Landscape: {
      const auto r = run_landscape(spec);
      for (const auto& m : r.minima)
        std::printf("start (%g, %g): q = (%.6g, %.6g), rho = %.4g\n", m.start[0], m.start[1],
                    m.q_opt[0], m.q_opt[1], m.rho_opt);
      std::printf("wrote %s\n", spec.out.c_str());
      return 0;
    }
    case ExperimentKind::IterationCounts: {
      const auto rows = run_iteration_counts(spec);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.converged ? 0 : 1;
      std::printf("%zu runs, %zu not converged (recorded); wrote %s\n", rows.size(), failed,
                  spec.out.c_str());
      return 0;
    }
    case ExperimentKind::ConvergenceRates: {
      const auto r = run_convergence_rates(spec);
      for (const auto& [method, slope] : r.slopes)
        std::printf("%-18s slope %.4f\n", method.c_str(), slope);
      std::printf("wrote %s\n", spec.out.c_str());
      if (!r.all_converged) {
        std::fprintf(stderr, "error: some time steps did not converge\n");
        return 3;
      }
      return 0;
    }
    case ExperimentKind::SingleRun: {
      const auto r = run_single(spec);
      std::size_t total = 0;
      for (const auto& rep : r.reports) total += rep.iterations;
      std::printf("%s after %zu iterations over %zu steps; wrote %s\n",
                  r.converged ? "converged" : "NOT converged", total, r.reports.size(),
                  spec.out.c_str());
      return r.converged ? 0 : 3;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral deferred corrections and diagonalization-based collocation solvers"};
  app.require_subcommand(1);
  Options opts;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"landscape", "spectral-radius landscape of the M=2 stiff limit"},
      {"itercounts", "SDC iteration counts per preconditioner"},
      {"convrates", "iteration-2/3 error ratios of SDC and simplified Newton variants"},
      {"single", "one problem, one solver"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const CLI::App* cmd = app.get_subcommands().front();
  try {
    const auto spec = parasdc::resolve_defaults(to_spec(cmd->get_name(), opts, *cmd));
    return run(spec);
  } catch (const parasdc::InvalidArgument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const parasdc::UnsupportedNodeCount& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const parasdc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
