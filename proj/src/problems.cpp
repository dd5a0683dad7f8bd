#include "parasdc/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "parasdc/kernels.hpp"

namespace parasdc {

SpatialGrid SpatialGrid::dirichlet(double a, double b, std::size_t n) {
  if (n == 0 || !(b > a)) throw InvalidArgument("bad Dirichlet grid");
  return {a, b, n, (b - a) / static_cast<double>(n + 1), Boundary::DirichletExact};
}

SpatialGrid SpatialGrid::periodic(double a, double b, std::size_t n) {
  if (n < 3 || !(b > a)) throw InvalidArgument("bad periodic grid");
  return {a, b, n, (b - a) / static_cast<double>(n), Boundary::Periodic};
}

double SpatialGrid::x(std::size_t i) const {
  const double k = static_cast<double>(boundary == Boundary::Periodic ? i : i + 1);
  return a + k * h;
}

Vector SpatialGrid::points() const {
  Vector xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
  return xs;
}

Vector Problem::exact(double) const {
  throw ExactSolutionUnavailable(name() + " has no exact solution");
}

Vector Problem::rhs(double t, std::span<const double> u) const {
  Vector out(u.size());
  rhs(t, u, out);
  return out;
}

AdvectionStencil parse_stencil(std::string_view text) {
  if (text == "centered") return AdvectionStencil::Centered;
  if (text == "upwind") return AdvectionStencil::Upwind;
  throw InvalidArgument("unknown stencil '" + std::string(text) + "'");
}

std::string_view to_string(AdvectionStencil stencil) {
  return stencil == AdvectionStencil::Centered ? "centered" : "upwind";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_size(const Problem& p, std::span<const double> u, std::span<double> out) {
  if (u.size() != p.dim() || out.size() != p.dim())
    throw DimensionMismatch(p.name() + ": state has wrong length");
}

class Heat final : public Problem {
 public:
  Heat(double nu, std::size_t n) : nu_(nu), grid_(SpatialGrid::dirichlet(0.0, 1.0, n)) {
    if (!(nu > 0.0)) throw InvalidArgument("heat needs nu > 0");
  }
  std::string name() const override { return "heat"; }
  std::size_t dim() const override { return grid_.n; }
  bool is_linear() const override { return true; }

  void rhs(double, std::span<const double> u, std::span<double> out) const override {
    check_size(*this, u, out);
    kernels::laplacian(u, 0.0, 0.0, nu_ / (grid_.h * grid_.h), out);
  }
  BandMatrix<double> jacobian(double, std::span<const double>) const override {
    const std::size_t n = grid_.n;
    const double s = nu_ / (grid_.h * grid_.h);
    BandMatrix<double> j(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      j.set(i, i, -2.0 * s);
      if (i > 0) j.set(i, i - 1, s);
      if (i + 1 < n) j.set(i, i + 1, s);
    }
    return j;
  }
  Vector initial() const override { return exact(0.0); }
  bool has_exact() const override { return true; }
  Vector exact(double t) const override {
    // sin(2 pi x) is an eigenvector of the discrete Dirichlet Laplacian
    const double h = grid_.h;
    const double mu = nu_ * (2.0 * std::cos(kTwoPi * h) - 2.0) / (h * h);
    const double decay = std::exp(mu * t);
    Vector u(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i) u[i] = decay * std::sin(kTwoPi * grid_.x(i));
    return u;
  }
  std::map<std::string, double> params() const override { return {{"nu", nu_}}; }
  std::optional<SpatialGrid> grid() const override { return grid_; }

 private:
  double nu_;
  SpatialGrid grid_;
};

class Advection final : public Problem {
 public:
  Advection(double c, std::size_t n, AdvectionStencil stencil)
      : c_(c), stencil_(stencil), grid_(SpatialGrid::periodic(0.0, 1.0, n)) {
    if (!(c > 0.0)) throw InvalidArgument("advection needs c > 0");
  }
  std::string name() const override { return "advection"; }
  std::size_t dim() const override { return grid_.n; }
  bool is_linear() const override { return true; }

  void rhs(double, std::span<const double> u, std::span<double> out) const override {
    check_size(*this, u, out);
    const std::size_t n = grid_.n;
    const double h = grid_.h;
    for (std::size_t i = 0; i < n; ++i) {
      const double right = u[(i + 1) % n];
      if (stencil_ == AdvectionStencil::Centered) {
        const double left = u[(i + n - 1) % n];
        out[i] = c_ * ((right - left) / (2.0 * h));
      } else {
        out[i] = c_ * ((right - u[i]) / h);
      }
    }
  }
  BandMatrix<double> jacobian(double, std::span<const double>) const override {
    const std::size_t n = grid_.n;
    const double h = grid_.h;
    BandMatrix<double> j(n, n - 1, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (stencil_ == AdvectionStencil::Centered) {
        j.add(i, (i + 1) % n, c_ / (2.0 * h));
        j.add(i, (i + n - 1) % n, -c_ / (2.0 * h));
      } else {
        j.add(i, (i + 1) % n, c_ / h);
        j.add(i, i, -c_ / h);
      }
    }
    return j;
  }
  Vector initial() const override { return exact(0.0); }
  bool has_exact() const override { return true; }
  Vector exact(double t) const override {
    // Fourier mode k = 2 pi of the circulant operator: symbol
    // centered i sin(kh)/h, upwind (e^{ikh} - 1)/h.
    const double kh = kTwoPi * grid_.h;
    double growth = 0.0, phase_speed;
    if (stencil_ == AdvectionStencil::Centered) {
      phase_speed = c_ * std::sin(kh) / grid_.h;
    } else {
      growth = c_ * (std::cos(kh) - 1.0) / grid_.h;
      phase_speed = c_ * std::sin(kh) / grid_.h;
    }
    const double amp = std::exp(growth * t);
    Vector u(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i)
      u[i] = amp * std::sin(kTwoPi * grid_.x(i) + phase_speed * t);
    return u;
  }
  std::map<std::string, double> params() const override { return {{"c", c_}}; }
  std::optional<SpatialGrid> grid() const override { return grid_; }

 private:
  double c_;
  AdvectionStencil stencil_;
  SpatialGrid grid_;
};

class VanDerPol final : public Problem {
 public:
  explicit VanDerPol(double mu) : mu_(mu) {
    if (!(mu > 0.0)) throw InvalidArgument("van der Pol needs mu > 0");
  }
  std::string name() const override { return "vanderpol"; }
  std::size_t dim() const override { return 2; }
  bool is_linear() const override { return false; }

  void rhs(double, std::span<const double> u, std::span<double> out) const override {
    check_size(*this, u, out);
    const double x = u[0], v = u[1];
    out[0] = v;
    out[1] = mu_ * (1.0 - x * x) * v - x;
  }
  BandMatrix<double> jacobian(double, std::span<const double> u) const override {
    BandMatrix<double> j(2, 1, 1);
    const double x = u[0], v = u[1];
    j.set(0, 0, 0.0);
    j.set(0, 1, 1.0);
    j.set(1, 0, -1.0 - 2.0 * mu_ * x * v);
    j.set(1, 1, mu_ * (1.0 - x * x));
    return j;
  }
  Vector initial() const override { return {2.0, 0.0}; }
  std::map<std::string, double> params() const override { return {{"mu", mu_}}; }

 private:
  double mu_;
};

double int_power(double u, int nu) {
  double r = 1.0;
  for (int k = 0; k < nu; ++k) r *= u;
  return r;
}

class Kpp final : public Problem {
 public:
  Kpp(double lambda0, int nu, std::size_t n)
      : wave_(KppWave::solve(lambda0, nu)), grid_(SpatialGrid::dirichlet(-5.0, 5.0, n)) {}
  std::string name() const override { return "kpp"; }
  std::size_t dim() const override { return grid_.n; }
  bool is_linear() const override { return false; }

  void rhs(double t, std::span<const double> u, std::span<double> out) const override {
    check_size(*this, u, out);
    const double left = wave_(grid_.a, t), right = wave_(grid_.b, t);
    kernels::laplacian(u, left, right, 1.0 / (grid_.h * grid_.h), out);
    const double l2 = wave_.lambda0 * wave_.lambda0;
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] += l2 * u[i] * (1.0 - int_power(u[i], wave_.nu));
  }
  BandMatrix<double> jacobian(double, std::span<const double> u) const override {
    const std::size_t n = grid_.n;
    const double s = 1.0 / (grid_.h * grid_.h);
    const double l2 = wave_.lambda0 * wave_.lambda0;
    BandMatrix<double> j(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double react = l2 * (1.0 - (wave_.nu + 1.0) * int_power(u[i], wave_.nu));
      j.set(i, i, -2.0 * s + react);
      if (i > 0) j.set(i, i - 1, s);
      if (i + 1 < n) j.set(i, i + 1, s);
    }
    return j;
  }
  Vector initial() const override { return exact(0.0); }
  bool has_exact() const override { return true; }
  Vector exact(double t) const override {
    Vector u(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i) u[i] = wave_(grid_.x(i), t);
    return u;
  }
  std::map<std::string, double> params() const override {
    return {{"lambda0", wave_.lambda0},
            {"nu", static_cast<double>(wave_.nu)},
            {"delta", wave_.delta},
            {"wave_speed", wave_.speed}};
  }
  std::optional<SpatialGrid> grid() const override { return grid_; }

 private:
  KppWave wave_;
  SpatialGrid grid_;
};

class LinearScalar final : public Problem {
 public:
  explicit LinearScalar(double lambda) : lambda_(lambda) {
    if (!std::isfinite(lambda)) throw InvalidArgument("lambda must be finite");
  }
  std::string name() const override { return "scalar"; }
  std::size_t dim() const override { return 1; }
  bool is_linear() const override { return true; }
  void rhs(double, std::span<const double> u, std::span<double> out) const override {
    check_size(*this, u, out);
    out[0] = lambda_ * u[0];
  }
  BandMatrix<double> jacobian(double, std::span<const double>) const override {
    BandMatrix<double> j(1, 0, 0);
    j.set(0, 0, lambda_);
    return j;
  }
  Vector initial() const override { return {1.0}; }
  bool has_exact() const override { return true; }
  Vector exact(double t) const override { return {std::exp(lambda_ * t)}; }
  std::map<std::string, double> params() const override { return {{"lambda", lambda_}}; }

 private:
  double lambda_;
};

}  // namespace

ProblemPtr make_heat(double nu, std::size_t n) { return std::make_shared<Heat>(nu, n); }

ProblemPtr make_advection(double c, std::size_t n, AdvectionStencil stencil) {
  return std::make_shared<Advection>(c, n, stencil);
}

ProblemPtr make_vanderpol(double mu) { return std::make_shared<VanDerPol>(mu); }

ProblemPtr make_kpp(double lambda0, int nu, std::size_t n) {
  return std::make_shared<Kpp>(lambda0, nu, n);
}

ProblemPtr make_linear_scalar(double lambda) { return std::make_shared<LinearScalar>(lambda); }

KppWave KppWave::solve(double lambda0, int nu) {
  if (!(lambda0 > 0.0)) throw InvalidArgument("KPP needs lambda0 > 0");
  if (nu < 1) throw InvalidArgument("KPP needs integer nu >= 1");
  // Substituting the ansatz with p = 2/nu and matching the e^{-kappa xi} and
  // e^{-2 kappa xi} coefficients gives kappa^2 = lambda0^2 / (p (1 + p)) and
  // speed = -(p^2 kappa^2 + lambda0^2) / (p kappa).
  const double p = 2.0 / nu;
  const double kappa = lambda0 / std::sqrt(p * (1.0 + p));
  const double speed = -(p * p * kappa * kappa + lambda0 * lambda0) / (p * kappa);
  return {lambda0, nu, 2.0 * kappa / nu, speed};
}

double KppWave::operator()(double x, double t) const {
  const double a = std::pow(2.0, nu / 2.0) - 1.0;
  const double kappa = 0.5 * nu * delta;
  return std::pow(1.0 + a * std::exp(-kappa * (x - speed * t)), -2.0 / nu);
}

namespace {
constexpr std::size_t kNewtonCap = 50;
constexpr int kMaxHalvings = 20;
constexpr int kMaxContinuationSteps = 64;
}

namespace {

Vector node_newton(const Problem& problem, double t, std::span<const double> guess, double alpha,
                   std::span<const double> b, double tol, NodeSolveInfo& local) {
  const std::size_t n = problem.dim();
  Vector u(guess.begin(), guess.end());
  Vector f(n), r(n), trial(n);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t it = 0;; ++it) {
    problem.rhs(t, u, f);
    for (std::size_t i = 0; i < n; ++i) r[i] = (u[i] - alpha * f[i]) - b[i];
    const double res = kernels::max_abs(r);
    double merit = 0.0;
    for (double ri : r) merit += ri * ri;
    const double scale =
        std::max({kernels::max_abs(u), kernels::max_abs(b), std::abs(alpha) * kernels::max_abs(f)});
    local.residual = res;
    local.newton_iterations = it;
    if (!std::isfinite(res)) throw NewtonDivergence("node Newton produced a non-finite residual");
    if (res <= std::max(tol, 16.0 * eps * scale)) break;
    if (it == kNewtonCap)
      throw NewtonDivergence("node Newton did not reach " + std::to_string(tol) + " in " +
                             std::to_string(kNewtonCap) + " iterations (residual " +
                             std::to_string(res) + ")");
    const BandLU<double> lu(problem.jacobian(t, u).shifted_identity(alpha));
    lu.solve_in_place(std::span<double>(r));
    // Backtrack when the full step does not reduce the residual; strong
    // reaction terms (alpha * lambda0^2 > 1) otherwise make Newton cycle.
    double step = 1.0;
    for (int halvings = 0;; ++halvings) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - step * r[i];
      problem.rhs(t, trial, f);
      double trial_merit = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ri = (trial[i] - alpha * f[i]) - b[i];
        trial_merit += ri * ri;
      }
      if (trial_merit < merit || halvings == kMaxHalvings) break;
      step *= 0.5;
    }
    u.swap(trial);
  }
  return u;
}

// Fallback when Newton from the caller's guess fails: follow the solution
// branch from alpha = 0 (where u = b) with adaptive steps in alpha.
Vector node_continuation(const Problem& problem, double t, std::span<const double> guess,
                         double alpha, std::span<const double> b, double tol,
                         NodeSolveInfo& local) {
  try {
    return node_newton(problem, t, guess, alpha, b, tol, local);
  } catch (const NewtonDivergence&) {
  }
  Vector u(b.begin(), b.end());
  double reached = 0.0, step = 0.25 * alpha;
  std::size_t spent = 0;
  for (int attempt = 0; attempt < kMaxContinuationSteps; ++attempt) {
    const double next = std::abs(alpha - reached) <= std::abs(step) ? alpha : reached + step;
    try {
      u = node_newton(problem, t, u, next, b, tol, local);
      spent += local.newton_iterations;
      reached = next;
      if (reached == alpha) {
        local.newton_iterations = spent;
        return u;
      }
      step *= 2.0;
    } catch (const NewtonDivergence&) {
      spent += local.newton_iterations;
      step *= 0.25;
    }
  }
  throw NewtonDivergence("node Newton failed, also along an alpha continuation (reached " +
                         std::to_string(reached) + " of " + std::to_string(alpha) + ")");
}

}  // namespace

Vector node_solve(const Problem& problem, double t, std::span<const double> guess, double alpha,
                  std::span<const double> b, double tol, NodeSolveInfo* info) {
  const std::size_t n = problem.dim();
  if (guess.size() != n || b.size() != n) throw DimensionMismatch("node_solve sizes");
  if (!(tol > 0.0)) throw InvalidArgument("node_solve needs tol > 0");
  NodeSolveInfo local;
  if (alpha == 0.0) {
    if (info) *info = local;
    return Vector(b.begin(), b.end());
  }
  if (problem.is_linear()) {
    // (I - alpha J) u = b + alpha f(t, 0)
    const Vector zero(n, 0.0);
    Vector rhs(b.begin(), b.end());
    const Vector g = problem.rhs(t, zero);
    kernels::axpy(alpha, g, rhs);
    const BandLU<double> lu(problem.jacobian(t, zero).shifted_identity(alpha));
    lu.solve_in_place(std::span<double>(rhs));
    local.newton_iterations = 1;
    if (info) *info = local;
    return rhs;
  }

  Vector u = node_continuation(problem, t, guess, alpha, b, tol, local);
  if (info) *info = local;
  return u;
}

}  // namespace parasdc
