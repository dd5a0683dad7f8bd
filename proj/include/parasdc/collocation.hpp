#pragma once

#include <cstddef>
#include <string_view>

#include "parasdc/complex.hpp"
#include "parasdc/dense.hpp"

namespace parasdc {

/// Right Gauss-Radau collocation on [t0, t1]. Q and the unit nodes refer to
/// the unit interval; physical weights are dt * Q.
class CollocationScheme {
 public:
  CollocationScheme(std::size_t num_nodes, double t0, double t1);

  std::size_t num_nodes() const { return unit_nodes_.size(); }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double dt() const { return t1_ - t0_; }

  /// Nodes in (0, 1], ascending, last node exactly 1.
  const Vector& unit_nodes() const { return unit_nodes_; }
  /// Physical node m: t0 + dt * unit_nodes[m]; the last node is t1 exactly.
  double node_time(std::size_t m) const;
  const RealMatrix& Q() const { return q_; }

  /// Same rule on another interval (Q is reused, not recomputed).
  CollocationScheme on_interval(double t0, double t1) const;

 private:
  CollocationScheme(Vector nodes, RealMatrix q, double t0, double t1);
  friend CollocationScheme radau_right_scheme(std::size_t, double, double);

  Vector unit_nodes_;
  RealMatrix q_;
  double t0_;
  double t1_;
};

/// Right Radau scheme with 2 <= M <= 9 nodes on (t0, t1].
CollocationScheme radau_right_scheme(std::size_t num_nodes, double t0 = 0.0, double t1 = 1.0);

enum class PreconditionerKind { IE, LU, Qpar, IEpar, MIN, Custom };

std::string_view to_string(PreconditionerKind kind);
PreconditionerKind parse_preconditioner_kind(std::string_view text);

/// Q_Delta in unit-interval scaling.
struct Preconditioner {
  PreconditionerKind kind;
  RealMatrix qdelta;
  bool is_diagonal;
};

Preconditioner qdelta_implicit_euler(const CollocationScheme& scheme);
Preconditioner qdelta_lu(const CollocationScheme& scheme);
Preconditioner qdelta_qpar(const CollocationScheme& scheme);
Preconditioner qdelta_iepar(const CollocationScheme& scheme);

/// Analysis-only preconditioner from an arbitrary nonsingular matrix.
Preconditioner custom_preconditioner(RealMatrix qdelta);

/// K = z QD (I - z QD)^-1 (QD^-1 Q - I) for u' = lambda u with z = lambda dt.
ComplexMatrix sdc_iteration_matrix(const CollocationScheme& scheme, const Preconditioner& precond,
                                   Complex lam_dt);

/// E = I - QD^-1 Q, the |lambda dt| -> infinity limit of the iteration matrix.
RealMatrix stiff_limit_matrix(const CollocationScheme& scheme, const Preconditioner& precond);

}  // namespace parasdc
