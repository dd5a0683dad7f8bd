#include "parasdc/diag_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "parasdc/banded.hpp"
#include "parasdc/kernels.hpp"
#include "parasdc/parallel.hpp"

namespace parasdc {

namespace {

constexpr double kImagTolerance = 1e-10;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Y_i = sum_m W(i, m) X_m for node-major real X, complex W.
ComplexVector transform_to_eigen(const ComplexMatrix& w, std::span<const double> x,
                                 std::size_t M, std::size_t N) {
  ComplexVector y(M * N, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t m = 0; m < M; ++m) {
      const Complex c = w(i, m);
      for (std::size_t k = 0; k < N; ++k) y[i * N + k] += c * x[m * N + k];
    }
  return y;
}

// X_m = Re(sum_i V(m, i) Y_i); returns the largest discarded imaginary part.
double transform_back(const ComplexMatrix& v, const ComplexVector& y, std::span<double> x,
                      std::size_t M, std::size_t N) {
  double imag = 0.0;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t k = 0; k < N; ++k) {
      Complex s{0.0, 0.0};
      for (std::size_t i = 0; i < M; ++i) s += v(m, i) * y[i * N + k];
      x[m * N + k] = s.re;
      imag = std::max(imag, std::abs(s.im));
    }
  return imag;
}

void check_imaginary(double imag, std::span<const double> x) {
  const double scale = std::max(1.0, kernels::max_abs(x));
  if (imag > kImagTolerance * scale)
    throw ImaginaryResidue("imaginary residue " + std::to_string(imag) +
                           " after back-transformation");
}

std::vector<BandLU<Complex>> factor_shifted(const BandMatrix<double>& jac, const ComplexVector& lam,
                                            double dt, std::size_t workers) {
  std::vector<std::optional<BandLU<Complex>>> tmp(lam.size());
  parallel_for(lam.size(), workers, [&](std::size_t i) {
    tmp[i].emplace(jac.shifted_identity(Complex(dt * lam[i].re, dt * lam[i].im)));
  });
  std::vector<BandLU<Complex>> out;
  out.reserve(lam.size());
  for (auto& f : tmp) out.push_back(std::move(*f));
  return out;
}

void solve_decoupled(const std::vector<BandLU<Complex>>& lus, ComplexVector& y, std::size_t N,
                     std::size_t workers) {
  parallel_for(lus.size(), workers, [&](std::size_t i) {
    lus[i].solve_in_place(std::span<Complex>(y.data() + i * N, N));
  });
}

void check_config(const NewtonConfig& config) {
  if (!(config.tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  if (config.max_iter == 0) throw InvalidArgument("max_iter must be positive");
}

// Shared iteration driver: `correction` overwrites its argument (which holds
// -G(u^k)) with the update e^k.
template <typename Correction>
StepResult iterate(const Problem& problem, const CollocationScheme& scheme,
                   std::span<const double> u0, const NewtonConfig& config, Correction&& correction) {
  check_config(config);
  if (u0.size() != problem.dim()) throw DimensionMismatch("u0 has wrong length");
  const auto start = std::chrono::steady_clock::now();
  StepResult out{spread(problem, scheme, u0, config.workers), {}};
  RunReport& rep = out.report;
  for (std::size_t k = 1; k <= config.max_iter; ++k) {
    Vector r = collocation_defect(scheme, out.states, u0);
    for (double& v : r) v = -v;
    correction(out.states, r);
    kernels::axpy(1.0, r, out.states.values);
    refresh_rhs(problem, scheme, out.states, config.workers);
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

}  // namespace

QDiagonalization diagonalize(const CollocationScheme& scheme) {
  return {QDiagonalization::Source::FullQ, eigendecompose(scheme.Q())};
}

QDiagonalization diagonalize(const Preconditioner& precond) {
  if (!precond.qdelta.is_diagonal())
    throw InvalidArgument("only diagonal preconditioners have a trivial diagonalization");
  const std::size_t m = precond.qdelta.rows();
  ComplexVector lam(m);
  for (std::size_t i = 0; i < m; ++i) lam[i] = Complex(precond.qdelta(i, i), 0.0);
  return {QDiagonalization::Source::QDelta,
          EigenDecomposition{std::move(lam), ComplexMatrix::identity(m), ComplexMatrix::identity(m)}};
}

std::string_view to_string(NewtonVariant variant) {
  switch (variant) {
    case NewtonVariant::Full: return "newton";
    case NewtonVariant::Simplified: return "simplified_newton";
    case NewtonVariant::Inexact: return "inexact_newton";
  }
  return "unknown";
}

NodeStates linear_direct_solve(const Problem& problem, const CollocationScheme& scheme,
                               const QDiagonalization& diag, std::span<const double> u0,
                               std::size_t workers, double* imag_residue) {
  if (!problem.is_linear()) throw NotLinear(problem.name() + " is not linear");
  const std::size_t M = scheme.num_nodes(), N = problem.dim();
  if (u0.size() != N) throw DimensionMismatch("u0 has wrong length");
  if (diag.eig.eigenvalues.size() != M) throw DimensionMismatch("diagonalization size");
  const double dt = scheme.dt();
  const Vector zero(N, 0.0);

  // b_m = u0 + dt sum_j q_mj f(t_j, 0); the affine part is zero for the
  // built-in problems but kept for generality.
  NodeStates s(M, N);
  std::vector<Vector> g(M);
  for (std::size_t j = 0; j < M; ++j) g[j] = problem.rhs(scheme.node_time(j), zero);
  for (std::size_t m = 0; m < M; ++m) {
    auto b = s.node(m);
    std::copy(u0.begin(), u0.end(), b.begin());
    for (std::size_t j = 0; j < M; ++j) kernels::axpy(dt * scheme.Q()(m, j), g[j], b);
  }

  ComplexVector y = transform_to_eigen(diag.eig.inverse_eigenvectors, s.values, M, N);
  const auto lus =
      factor_shifted(problem.jacobian(scheme.t0(), zero), diag.eig.eigenvalues, dt, workers);
  solve_decoupled(lus, y, N, workers);
  const double imag = transform_back(diag.eig.eigenvectors, y, s.values, M, N);
  if (imag_residue) *imag_residue = imag;
  check_imaginary(imag, s.values);
  refresh_rhs(problem, scheme, s, workers);
  return s;
}

StepResult newton_full(const Problem& problem, const CollocationScheme& scheme,
                       std::span<const double> u0, const NewtonConfig& config) {
  const std::size_t M = scheme.num_nodes(), N = problem.dim();
  const double dt = scheme.dt();
  const RealMatrix& q = scheme.Q();
  // Unknown (i, m) -> i * M + m keeps the node coupling inside the band.
  return iterate(problem, scheme, u0, config, [&](const NodeStates& s, Vector& r) {
    std::vector<BandMatrix<double>> jac;
    std::size_t kl = 0, ku = 0;
    for (std::size_t j = 0; j < M; ++j) {
      jac.push_back(problem.jacobian(scheme.node_time(j), s.node(j)));
      kl = std::max(kl, jac.back().lower());
      ku = std::max(ku, jac.back().upper());
    }
    BandMatrix<double> a(M * N, kl * M + (M - 1), ku * M + (M - 1));
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t m = 0; m < M; ++m) a.add(i * M + m, i * M + m, 1.0);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t j = 0; j < M; ++j) {
        const double w = dt * q(m, j);
        const auto& jj = jac[j];
        for (std::size_t i = 0; i < N; ++i)
          for (std::size_t c = jj.first_col(i); c <= jj.last_col(i); ++c) {
            const double v = jj.get(i, c);
            if (v != 0.0) a.add(i * M + m, c * M + j, -(w * v));
          }
      }
    Vector x(M * N);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t i = 0; i < N; ++i) x[i * M + m] = r[m * N + i];
    BandLU<double>(a).solve_in_place(std::span<double>(x));
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t i = 0; i < N; ++i) r[m * N + i] = x[i * M + m];
  });
}

StepResult newton_simplified(const Problem& problem, const CollocationScheme& scheme,
                             const QDiagonalization& diag, std::span<const double> u0,
                             const NewtonConfig& config) {
  const std::size_t M = scheme.num_nodes(), N = problem.dim();
  if (diag.eig.eigenvalues.size() != M) throw DimensionMismatch("diagonalization size");
  if (u0.size() != N) throw DimensionMismatch("u0 has wrong length");
  const auto lus = factor_shifted(problem.jacobian(scheme.t0(), u0), diag.eig.eigenvalues,
                                  scheme.dt(), config.workers);
  return iterate(problem, scheme, u0, config, [&](const NodeStates&, Vector& r) {
    ComplexVector y = transform_to_eigen(diag.eig.inverse_eigenvectors, r, M, N);
    solve_decoupled(lus, y, N, config.workers);
    const double imag = transform_back(diag.eig.eigenvectors, y, r, M, N);
    check_imaginary(imag, r);
  });
}

StepResult newton_inexact(const Problem& problem, const CollocationScheme& scheme,
                          const Preconditioner& precond, std::span<const double> u0,
                          const NewtonConfig& config) {
  const std::size_t M = scheme.num_nodes(), N = problem.dim();
  const RealMatrix& qd = precond.qdelta;
  if (qd.rows() != M || qd.cols() != M) throw DimensionMismatch("preconditioner size");
  const bool diagonal = qd.is_diagonal();
  if (!diagonal && !qd.is_lower_triangular())
    throw InvalidArgument("inexact Newton needs a lower-triangular or diagonal Q_Delta");
  if (u0.size() != N) throw DimensionMismatch("u0 has wrong length");
  const double dt = scheme.dt();
  const BandMatrix<double> j0 = problem.jacobian(scheme.t0(), u0);

  std::vector<std::optional<BandLU<double>>> lus(M);
  parallel_for(M, config.workers, [&](std::size_t m) {
    lus[m].emplace(j0.shifted_identity(dt * qd(m, m)));
  });

  return iterate(problem, scheme, u0, config, [&](const NodeStates&, Vector& r) {
    auto block = [&](std::size_t m) { return std::span<double>(r.data() + m * N, N); };
    if (diagonal) {
      parallel_for(M, config.workers, [&](std::size_t m) { lus[m]->solve_in_place(block(m)); });
      return;
    }
    Vector je(N);
    for (std::size_t m = 0; m < M; ++m) {
      auto rm = block(m);
      for (std::size_t j = 0; j < m; ++j) {
        if (qd(m, j) == 0.0) continue;
        j0.multiply(std::span<const double>(block(j)), std::span<double>(je));
        kernels::axpy(dt * qd(m, j), je, rm);
      }
      lus[m]->solve_in_place(rm);
    }
  });
}

double error_on_nodes(const NodeStates& states, const NodeStates& reference) {
  if (states.M != reference.M || states.N != reference.N)
    throw DimensionMismatch("error_on_nodes shapes differ");
  return kernels::max_abs_diff(states.values, reference.values);
}

NodeStates exact_states(const Problem& problem, const CollocationScheme& scheme) {
  if (!problem.has_exact()) throw ExactSolutionUnavailable(problem.name() + " has no exact solution");
  NodeStates s(scheme.num_nodes(), problem.dim());
  for (std::size_t m = 0; m < s.M; ++m) {
    const Vector u = problem.exact(scheme.node_time(m));
    std::copy(u.begin(), u.end(), s.node(m).begin());
  }
  refresh_rhs(problem, scheme, s);
  return s;
}

}  // namespace parasdc
