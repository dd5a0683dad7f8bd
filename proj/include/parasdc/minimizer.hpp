#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "parasdc/collocation.hpp"

namespace parasdc {

struct MinimizerResult {
  Vector q_opt;
  double rho_opt = 0.0;
  Vector start;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Nelder-Mead settings. Defaults follow the SciPy implementation: stop when
/// both the simplex extent (max abs coordinate difference to the best vertex)
/// and the value spread are <= tol; max_iter 0 means 200 * dimension.
struct NelderMeadOptions {
  double tol = 1e-4;
  std::size_t max_iter = 0;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double nonzero_delta = 0.05;
  double zero_delta = 0.00025;
};

using Objective = std::function<double(std::span<const double>)>;

/// Returned on eigenvalue failure or for non-positive coordinates.
inline constexpr double kObjectivePenalty = 1e6;

/// rho(I - diag(q) Q); penalized outside the positive orthant.
double spectral_radius_objective(const CollocationScheme& scheme, std::span<const double> q);

/// Never raises on hitting max_iter: the best vertex is returned with converged = false.
MinimizerResult nelder_mead(const Objective& objective, std::span<const double> start,
                            const NelderMeadOptions& options = {});

/// Diagonal preconditioner diag(1 / q_opt) minimizing the stiff-limit spectral radius.
Preconditioner qdelta_min(const CollocationScheme& scheme, std::span<const double> start,
                          MinimizerResult* details = nullptr);

/// All-ones, then all-ones with a 2 in slot k for each k, then (1, 2, ..., M).
std::vector<Vector> default_min_starts(std::size_t num_nodes);

/// Best qdelta_min over default_min_starts (lowest rho; earlier start wins
/// ties), memoized per node count. Starts that fail are skipped.
const Preconditioner& cached_qdelta_min(std::size_t num_nodes);

/// The minimizer run behind cached_qdelta_min(num_nodes).
const MinimizerResult& cached_qdelta_min_details(std::size_t num_nodes);

struct Landscape {
  Vector q1;
  Vector q2;
  std::vector<double> rho;  // row-major: rho[i * q2.size() + j] at (q1[i], q2[j])
  double at(std::size_t i, std::size_t j) const { return rho[i * q2.size() + j]; }
};

/// Any of the five kinds; MIN comes from the per-M cache.
Preconditioner make_preconditioner(PreconditionerKind kind, const CollocationScheme& scheme);

/// Tensor-grid scan of the M = 2 objective, resolution points per axis.
Landscape landscape_scan(const CollocationScheme& scheme, double q1_lo, double q1_hi, double q2_lo,
                         double q2_hi, std::size_t resolution, std::size_t workers = 1);

}  // namespace parasdc
