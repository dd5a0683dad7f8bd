#include "parasdc/sdc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "parasdc/kernels.hpp"
#include "parasdc/parallel.hpp"

namespace parasdc {

namespace {

void check_states(const Problem& problem, const CollocationScheme& scheme,
                  const NodeStates& states) {
  if (states.M != scheme.num_nodes() || states.N != problem.dim())
    throw DimensionMismatch("node states do not match problem and scheme");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void refresh_rhs(const Problem& problem, const CollocationScheme& scheme, NodeStates& states,
                 std::size_t workers) {
  check_states(problem, scheme, states);
  parallel_for(states.M, workers, [&](std::size_t m) {
    problem.rhs(scheme.node_time(m), states.node(m), states.rhs(m));
  });
}

NodeStates spread(const Problem& problem, const CollocationScheme& scheme,
                  std::span<const double> u0, std::size_t workers) {
  if (u0.size() != problem.dim()) throw DimensionMismatch("u0 has wrong length");
  NodeStates s(scheme.num_nodes(), problem.dim());
  for (std::size_t m = 0; m < s.M; ++m) std::copy(u0.begin(), u0.end(), s.node(m).begin());
  refresh_rhs(problem, scheme, s, workers);
  return s;
}

Vector collocation_defect(const CollocationScheme& scheme, const NodeStates& states,
                          std::span<const double> u0) {
  if (states.M != scheme.num_nodes() || u0.size() != states.N)
    throw DimensionMismatch("collocation defect sizes");
  const double dt = scheme.dt();
  const RealMatrix& q = scheme.Q();
  Vector g(states.M * states.N);
  for (std::size_t m = 0; m < states.M; ++m) {
    std::span<double> gm(g.data() + m * states.N, states.N);
    kernels::subtract(states.node(m), u0, gm);
    for (std::size_t j = 0; j < states.M; ++j) kernels::axpy(-(dt * q(m, j)), states.rhs(j), gm);
  }
  return g;
}

double collocation_residual(const CollocationScheme& scheme, const NodeStates& states,
                            std::span<const double> u0) {
  return kernels::max_abs(collocation_defect(scheme, states, u0));
}

NodeStates sweep(const Problem& problem, const CollocationScheme& scheme,
                 const Preconditioner& precond, const NodeStates& states,
                 std::span<const double> u0, double node_tol, std::size_t workers) {
  check_states(problem, scheme, states);
  const std::size_t M = states.M, N = states.N;
  const RealMatrix& qd = precond.qdelta;
  if (qd.rows() != M || qd.cols() != M) throw DimensionMismatch("preconditioner size");
  const bool diagonal = precond.is_diagonal || qd.is_diagonal();
  if (!diagonal && !qd.is_lower_triangular())
    throw InvalidArgument("sweeps need a lower-triangular or diagonal Q_Delta");
  const RealMatrix& q = scheme.Q();
  const double dt = scheme.dt();

  NodeStates next(M, N);
  // Everything that depends only on the previous iterate:
  // b_m = u0 + dt sum_j q_mj f_j^k - dt sum_{j<=m} qd_mj f_j^k
  auto explicit_part = [&](std::size_t m, std::span<double> b) {
    std::copy(u0.begin(), u0.end(), b.begin());
    for (std::size_t j = 0; j < M; ++j) kernels::axpy(dt * q(m, j), states.rhs(j), b);
    for (std::size_t j = 0; j <= m; ++j)
      if (qd(m, j) != 0.0) kernels::axpy(-(dt * qd(m, j)), states.rhs(j), b);
  };
  auto solve_node = [&](std::size_t m, std::span<const double> b) {
    const double t = scheme.node_time(m);
    const Vector u = node_solve(problem, t, states.node(m), dt * qd(m, m), b, node_tol);
    std::copy(u.begin(), u.end(), next.node(m).begin());
    problem.rhs(t, next.node(m), next.rhs(m));
  };

  if (diagonal) {
    parallel_for(M, workers, [&](std::size_t m) {
      Vector b(N);
      explicit_part(m, b);
      solve_node(m, b);
    });
  } else {
    Vector b(N);
    for (std::size_t m = 0; m < M; ++m) {
      explicit_part(m, b);
      for (std::size_t j = 0; j < m; ++j)
        if (qd(m, j) != 0.0) kernels::axpy(dt * qd(m, j), next.rhs(j), b);
      solve_node(m, b);
    }
  }
  return next;
}

StepResult solve_step(const Problem& problem, const CollocationScheme& scheme,
                      const Preconditioner& precond, std::span<const double> u0,
                      const SweepConfig& config) {
  if (!(config.tol > 0.0)) throw InvalidArgument("sweep tolerance must be positive");
  if (config.max_iter == 0) throw InvalidArgument("max_iter must be positive");
  const auto start = std::chrono::steady_clock::now();
  StepResult out{spread(problem, scheme, u0, config.workers), {}};
  RunReport& rep = out.report;
  for (std::size_t k = 1; k <= config.max_iter; ++k) {
    out.states = sweep(problem, scheme, precond, out.states, u0, config.node_tol, config.workers);
    const double res = collocation_residual(scheme, out.states, u0);
    rep.iterations = k;
    rep.residual_history.push_back(res);
    if (config.error_probe) rep.error_history.push_back(config.error_probe(out.states));
    rep.converged = res <= config.tol;
    if (rep.converged && k >= config.min_iter) break;
    if (!std::isfinite(res)) break;
  }
  rep.wall_info["seconds"] = seconds_since(start);
  return out;
}

TimeSeriesResult run_timeseries(const Problem& problem, const CollocationScheme& unit_scheme,
                                const Preconditioner& precond, double T, std::size_t num_steps,
                                const SweepConfig& config) {
  if (num_steps == 0) throw InvalidArgument("num_steps must be >= 1");
  if (!(T > 0.0)) throw InvalidArgument("T must be positive");
  TimeSeriesResult out;
  out.final_state = problem.initial();
  const double n = static_cast<double>(num_steps);
  for (std::size_t l = 0; l < num_steps; ++l) {
    const double t0 = T * static_cast<double>(l) / n;
    const double t1 = l + 1 == num_steps ? T : T * static_cast<double>(l + 1) / n;
    const CollocationScheme scheme = unit_scheme.on_interval(t0, t1);
    StepResult step = solve_step(problem, scheme, precond, out.final_state, config);
    if (!step.report.converged)
      throw ConvergenceFailure("step " + std::to_string(l) + " did not converge in " +
                               std::to_string(step.report.iterations) + " sweeps");
    const auto last = step.states.last();
    out.final_state.assign(last.begin(), last.end());
    out.reports.push_back(std::move(step.report));
  }
  return out;
}

}  // namespace parasdc
