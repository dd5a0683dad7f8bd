#include "parasdc/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace parasdc {

namespace {

constexpr std::size_t kNewtonCap = 100;
constexpr double kNodeTol = 1e-14;

// Legendre P_n and its derivative at x in [-1, 1].
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
    p0 = p1;
    p1 = pk;
  }
  // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1), valid off the endpoints
  const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

// Roots of R(x) = P_M(x) - P_{M-1}(x) in (-1, 1]; x = 1 is a root for every M.
Vector right_radau_points(std::size_t m) {
  Vector roots;
  roots.push_back(1.0);
  for (std::size_t k = 1; k < m; ++k) {
    // Chebyshev-type guess for the interior Radau roots
    double x = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / (2.0 * m - 1.0));
    bool converged = false;
    for (std::size_t it = 0; it < kNewtonCap; ++it) {
      const auto [pm, dpm] = legendre(m, x);
      const auto [pm1, dpm1] = legendre(m - 1, x);
      const double r = pm - pm1;
      const double dr = dpm - dpm1;
      // Deflate the roots already found.
      double defl = 0.0;
      for (double z : roots) defl += 1.0 / (x - z);
      const double step = r / (dr - r * defl);
      x -= step;
      if (std::abs(step) <= kNodeTol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceFailure("Radau node Newton iteration did not converge");
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  Vector nodes(m);
  for (std::size_t i = 0; i < m; ++i) nodes[i] = 0.5 * (roots[i] + 1.0);
  nodes.back() = 1.0;
  return nodes;
}

// Q(m, j) = integral over [0, tau_m] of the Lagrange basis l_j. The basis is
// expanded in monomials of the centered variable x = 2s - 1 for conditioning.
RealMatrix quadrature_matrix(const Vector& nodes) {
  const std::size_t m = nodes.size();
  Vector xs(m);
  for (std::size_t i = 0; i < m; ++i) xs[i] = 2.0 * nodes[i] - 1.0;
  RealMatrix q(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    Vector coeff(1, 1.0);  // ascending powers
    double denom = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      Vector next(coeff.size() + 1, 0.0);
      for (std::size_t p = 0; p < coeff.size(); ++p) {
        next[p + 1] += coeff[p];
        next[p] -= xs[k] * coeff[p];
      }
      coeff = std::move(next);
      denom *= xs[j] - xs[k];
    }
    for (std::size_t row = 0; row < m; ++row) {
      // integral_{-1}^{x_row} of the polynomial, Horner on the antiderivative
      const double upper = xs[row];
      double at_upper = 0.0, at_lower = 0.0;
      for (std::size_t p = coeff.size(); p-- > 0;) {
        const double c = coeff[p] / static_cast<double>(p + 1);
        at_upper = at_upper * upper + c;
        at_lower = at_lower * -1.0 + c;
      }
      at_upper *= upper;
      at_lower *= -1.0;
      q(row, j) = 0.5 * (at_upper - at_lower) / denom;
    }
  }
  return q;
}

}  // namespace

CollocationScheme::CollocationScheme(std::size_t num_nodes, double t0, double t1)
    : CollocationScheme(radau_right_scheme(num_nodes, t0, t1)) {}

CollocationScheme::CollocationScheme(Vector nodes, RealMatrix q, double t0, double t1)
    : unit_nodes_(std::move(nodes)), q_(std::move(q)), t0_(t0), t1_(t1) {
  if (!(t1 > t0)) throw InvalidArgument("collocation interval needs t1 > t0");
}

double CollocationScheme::node_time(std::size_t m) const {
  if (m + 1 == unit_nodes_.size()) return t1_;
  return t0_ + dt() * unit_nodes_[m];
}

CollocationScheme CollocationScheme::on_interval(double t0, double t1) const {
  return CollocationScheme(unit_nodes_, q_, t0, t1);
}

CollocationScheme radau_right_scheme(std::size_t num_nodes, double t0, double t1) {
  if (num_nodes < 2 || num_nodes > 9)
    throw UnsupportedNodeCount("right Radau supports 2..9 nodes, got " + std::to_string(num_nodes));
  if (!(t1 > t0)) throw InvalidArgument("collocation interval needs t1 > t0");
  Vector nodes = right_radau_points(num_nodes);
  RealMatrix q = quadrature_matrix(nodes);
  return CollocationScheme(std::move(nodes), std::move(q), t0, t1);
}

std::string_view to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::IE: return "ie";
    case PreconditionerKind::LU: return "lu";
    case PreconditionerKind::Qpar: return "qpar";
    case PreconditionerKind::IEpar: return "iepar";
    case PreconditionerKind::MIN: return "min";
    case PreconditionerKind::Custom: return "custom";
  }
  return "unknown";
}

PreconditionerKind parse_preconditioner_kind(std::string_view text) {
  if (text == "ie") return PreconditionerKind::IE;
  if (text == "lu") return PreconditionerKind::LU;
  if (text == "qpar") return PreconditionerKind::Qpar;
  if (text == "iepar") return PreconditionerKind::IEpar;
  if (text == "min") return PreconditionerKind::MIN;
  throw InvalidArgument("unknown preconditioner '" + std::string(text) + "'");
}

Preconditioner qdelta_implicit_euler(const CollocationScheme& scheme) {
  const auto& tau = scheme.unit_nodes();
  const std::size_t m = tau.size();
  RealMatrix qd(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const double dtau = tau[j] - (j == 0 ? 0.0 : tau[j - 1]);
    for (std::size_t r = j; r < m; ++r) qd(r, j) = dtau;
  }
  return {PreconditionerKind::IE, std::move(qd), false};
}

Preconditioner qdelta_lu(const CollocationScheme& scheme) {
  auto factors = doolittle_lu(scheme.Q().transpose());
  RealMatrix qd = factors.upper.transpose();
  for (std::size_t i = 0; i < qd.rows(); ++i)
    if (!(qd(i, i) > 0.0)) throw NonpositiveDiagonal("LU-trick diagonal entry is not positive");
  return {PreconditionerKind::LU, std::move(qd), false};
}

Preconditioner qdelta_qpar(const CollocationScheme& scheme) {
  const std::size_t m = scheme.num_nodes();
  RealMatrix qd(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = scheme.Q()(i, i);
    if (!(d > 0.0))
      throw NonpositiveDiagonal("q_" + std::to_string(i + 1) + std::to_string(i + 1) + " <= 0");
    qd(i, i) = d;
  }
  return {PreconditionerKind::Qpar, std::move(qd), true};
}

Preconditioner qdelta_iepar(const CollocationScheme& scheme) {
  return {PreconditionerKind::IEpar, RealMatrix::diagonal(scheme.unit_nodes()), true};
}

Preconditioner custom_preconditioner(RealMatrix qdelta) {
  if (!qdelta.square()) throw DimensionMismatch("preconditioner must be square");
  const bool diag = qdelta.is_diagonal();
  return {PreconditionerKind::Custom, std::move(qdelta), diag};
}

ComplexMatrix sdc_iteration_matrix(const CollocationScheme& scheme, const Preconditioner& precond,
                                   Complex lam_dt) {
  const std::size_t m = scheme.num_nodes();
  if (precond.qdelta.rows() != m) throw DimensionMismatch("preconditioner size");
  const ComplexMatrix qd = to_complex(precond.qdelta);
  const ComplexMatrix id = ComplexMatrix::identity(m);
  const ComplexMatrix lhs_inv = inverse(id - lam_dt * qd);
  const ComplexMatrix tail = inverse(qd) * to_complex(scheme.Q()) - id;
  return lam_dt * (qd * lhs_inv * tail);
}

RealMatrix stiff_limit_matrix(const CollocationScheme& scheme, const Preconditioner& precond) {
  const std::size_t m = scheme.num_nodes();
  if (precond.qdelta.rows() != m) throw DimensionMismatch("preconditioner size");
  return RealMatrix::identity(m) - inverse(precond.qdelta) * scheme.Q();
}

}  // namespace parasdc
