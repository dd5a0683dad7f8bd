#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "parasdc/collocation.hpp"
#include "parasdc/minimizer.hpp"
#include "parasdc/problems.hpp"
#include "parasdc/sdc.hpp"

namespace parasdc {

inline constexpr std::string_view kVersion = "1.0.0";

enum class ExperimentKind { Landscape, IterationCounts, ConvergenceRates, SingleRun };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Every knob of a run. Zero / empty fields mean "use the experiment default"
/// and are filled in by resolve_defaults.
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::SingleRun;
  std::vector<std::string> problems;  // A | B | C | D (or heat, advection, vanderpol, kpp)
  std::vector<double> params;
  std::size_t M = 0;
  double dt = 0.0;
  double T = 0.0;
  std::vector<std::size_t> steps;
  double tol = 1e-8;
  std::vector<PreconditionerKind> kinds;
  std::string method;  // sdc | newton | simplified | inexact
  std::size_t N = 0;
  bool full = false;
  std::string out;
  std::size_t workers = 1;
  AdvectionStencil stencil = AdvectionStencil::Centered;
  std::string reference;  // collocation | exact (convergence rates)
  std::size_t resolution = 0;
  std::size_t max_iter = 0;
};

/// Fills every defaulted field; throws InvalidArgument on inconsistent input.
ExperimentSpec resolve_defaults(ExperimentSpec spec);

/// Canonical problem letter for a selector ("heat" -> "A").
std::string canonical_problem(std::string_view selector);

/// Builds problem `letter` with its single parameter and grid size.
ProblemPtr build_problem(std::string_view letter, double param, std::size_t n,
                         AdvectionStencil stencil);

/// Manifest: `key=value` lines, lists comma-separated, floats with 17 digits.
std::string manifest_text(const ExperimentSpec& resolved);
ExperimentSpec parse_manifest(std::string_view text);
ExperimentSpec read_manifest(const std::string& path);

/// "dir/name.csv" -> "dir/name" + suffix.
std::string companion_path(const std::string& out, std::string_view suffix);

std::string format_double(double v);

struct LandscapeResult {
  Landscape grid;
  std::vector<MinimizerResult> minima;  // starts (1, 1) and (1, 2)
};

struct IterationRow {
  std::string problem;
  double param;
  PreconditionerKind kind;
  std::size_t iterations;
  bool converged;
};

struct RateRow {
  std::string method;
  double dt;
  double error_iter2;
  double error_iter3;
  double ratio;
};

struct RateResult {
  std::vector<RateRow> rows;
  std::map<std::string, double> slopes;
  bool all_converged = true;
};

struct SingleResult {
  std::vector<RunReport> reports;
  Vector final_state;
  Vector grid_points;
  bool converged = true;
};

/// Each run writes its CSV (and companions and the manifest) when spec.out is
/// non-empty; the spec must be resolved.
LandscapeResult run_landscape(const ExperimentSpec& spec);
std::vector<IterationRow> run_iteration_counts(const ExperimentSpec& spec);
RateResult run_convergence_rates(const ExperimentSpec& spec);
SingleResult run_single(const ExperimentSpec& spec);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace parasdc
