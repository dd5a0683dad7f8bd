#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "parasdc/banded.hpp"
#include "parasdc/dense.hpp"

namespace parasdc {

struct SpatialGrid {
  enum class Boundary { DirichletExact, Periodic };

  double a = 0.0;
  double b = 1.0;
  std::size_t n = 1;
  double h = 1.0;
  Boundary boundary = Boundary::DirichletExact;

  static SpatialGrid dirichlet(double a, double b, std::size_t n);
  static SpatialGrid periodic(double a, double b, std::size_t n);

  /// Coordinate of unknown i (interior points for Dirichlet, left-aligned for periodic).
  double x(std::size_t i) const;
  Vector points() const;
};

/// u' = f(t, u) on R^N. Implementations are immutable and safe to share across threads.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  /// True when f(t, u) = J u + f(t, 0) with J independent of t and u.
  virtual bool is_linear() const = 0;

  virtual void rhs(double t, std::span<const double> u, std::span<double> out) const = 0;
  virtual BandMatrix<double> jacobian(double t, std::span<const double> u) const = 0;
  virtual Vector initial() const = 0;

  virtual bool has_exact() const { return false; }
  /// Throws ExactSolutionUnavailable unless has_exact().
  virtual Vector exact(double t) const;

  virtual std::map<std::string, double> params() const = 0;
  virtual std::optional<SpatialGrid> grid() const { return std::nullopt; }

  Vector rhs(double t, std::span<const double> u) const;
};

using ProblemPtr = std::shared_ptr<const Problem>;

enum class AdvectionStencil { Centered, Upwind };
AdvectionStencil parse_stencil(std::string_view text);
std::string_view to_string(AdvectionStencil stencil);

/// u_t = nu u_xx on [0, 1], zero Dirichlet data, u(x, 0) = sin(2 pi x).
/// The exact solution is that of the semi-discrete system.
ProblemPtr make_heat(double nu, std::size_t n);

/// u_t = c u_x on periodic [0, 1), u(x, 0) = sin(2 pi x). Exact: semi-discrete.
ProblemPtr make_advection(double c, std::size_t n,
                          AdvectionStencil stencil = AdvectionStencil::Centered);

/// u' = v, v' = mu (1 - u^2) v - u with (u, v)(0) = (2, 0).
ProblemPtr make_vanderpol(double mu);

/// u_t = u_xx + lambda0^2 u (1 - u^nu) on [-5, 5] with the traveling wave as
/// initial and boundary data.
ProblemPtr make_kpp(double lambda0, int nu, std::size_t n);

/// u' = lambda u, u(0) = 1.
ProblemPtr make_linear_scalar(double lambda);

/// Traveling-wave parameters of the KPP equation: u = (1 + (2^{nu/2} - 1)
/// exp(-kappa (x - speed t)))^{-2/nu}.
struct KppWave {
  double lambda0;
  int nu;
  double delta;  // kappa = nu * delta / 2
  double speed;

  static KppWave solve(double lambda0, int nu);
  double operator()(double x, double t) const;
};

/// Newton counters of the last node_solve call, for diagnostics.
struct NodeSolveInfo {
  std::size_t newton_iterations = 0;
  double residual = 0.0;
};

/// Solves u - alpha f(t, u) = b. Linear problems take one band solve; others
/// run Newton from `guess` until the residual max-norm is <= tol (floored at
/// a round-off level relative to the data).
Vector node_solve(const Problem& problem, double t, std::span<const double> guess, double alpha,
                  std::span<const double> b, double tol, NodeSolveInfo* info = nullptr);

}  // namespace parasdc
