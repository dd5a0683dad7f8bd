#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "parasdc/collocation.hpp"
#include "parasdc/problems.hpp"

namespace parasdc {

/// Solution values at the M collocation nodes of one step, stored node-major
/// (row m is the state at node m), together with f evaluated row-wise.
struct NodeStates {
  std::size_t M = 0;
  std::size_t N = 0;
  Vector values;
  Vector rhs_cache;

  NodeStates() = default;
  NodeStates(std::size_t m, std::size_t n) : M(m), N(n), values(m * n, 0.0), rhs_cache(m * n, 0.0) {}

  std::span<double> node(std::size_t m) { return {values.data() + m * N, N}; }
  std::span<const double> node(std::size_t m) const { return {values.data() + m * N, N}; }
  std::span<double> rhs(std::size_t m) { return {rhs_cache.data() + m * N, N}; }
  std::span<const double> rhs(std::size_t m) const { return {rhs_cache.data() + m * N, N}; }
  std::span<const double> last() const { return node(M - 1); }
};

/// Called after every iteration of an iterative solver; the value is stored in
/// RunReport::error_history.
using ErrorProbe = std::function<double(const NodeStates&)>;

struct RunReport {
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> error_history;
  bool converged = false;
  std::map<std::string, double> wall_info;
};

struct SweepConfig {
  double tol = 1e-8;
  std::size_t max_iter = 100;
  /// Keep iterating at least this often even when the residual is below tol.
  std::size_t min_iter = 0;
  /// Tolerance of the spatial Newton solves at each node.
  double node_tol = 1e-12;
  std::size_t workers = 1;
  ErrorProbe error_probe;
};

/// Recomputes f(t_m, u_m) for every node.
void refresh_rhs(const Problem& problem, const CollocationScheme& scheme, NodeStates& states,
                 std::size_t workers = 1);

/// u_m = u0 at every node, with a coherent rhs cache.
NodeStates spread(const Problem& problem, const CollocationScheme& scheme,
                  std::span<const double> u0, std::size_t workers = 1);

/// G(u) = u - u0 - dt Q F(u), node-major, from the rhs cache.
Vector collocation_defect(const CollocationScheme& scheme, const NodeStates& states,
                          std::span<const double> u0);

/// max over nodes of || u0 + dt sum_j q_mj f(u_j) - u_m ||_inf.
double collocation_residual(const CollocationScheme& scheme, const NodeStates& states,
                            std::span<const double> u0);

/// One preconditioned Picard iteration. Lower-triangular Q_Delta sweeps the nodes
/// in order; diagonal Q_Delta solves all nodes independently on `workers` threads.
NodeStates sweep(const Problem& problem, const CollocationScheme& scheme,
                 const Preconditioner& precond, const NodeStates& states,
                 std::span<const double> u0, double node_tol = 1e-12, std::size_t workers = 1);

struct StepResult {
  NodeStates states;
  RunReport report;
};

/// Sweeps from spread(u0) until the collocation residual is <= tol (after at
/// least min_iter sweeps) or max_iter sweeps are done.
StepResult solve_step(const Problem& problem, const CollocationScheme& scheme,
                      const Preconditioner& precond, std::span<const double> u0,
                      const SweepConfig& config = {});

struct TimeSeriesResult {
  Vector final_state;
  std::vector<RunReport> reports;
};

/// num_steps equal steps of size T / num_steps from t = 0 and the problem's
/// initial value. Throws ConvergenceFailure if a step does not converge.
TimeSeriesResult run_timeseries(const Problem& problem, const CollocationScheme& unit_scheme,
                                const Preconditioner& precond, double T, std::size_t num_steps,
                                const SweepConfig& config = {});

}  // namespace parasdc
