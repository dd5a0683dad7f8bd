#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "parasdc/collocation.hpp"
#include "parasdc/dense.hpp"
#include "parasdc/problems.hpp"
#include "parasdc/sdc.hpp"

namespace testutil {

using namespace parasdc;

inline Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline RealMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  const Vector v = random_vector(n * n, seed);
  return RealMatrix(n, n, v);
}

inline double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Collocation solution of a linear problem by one dense MN x MN solve of
/// (I - dt Q kron A) u = u0 (node-major ordering), independent of the
/// diagonalization code path.
inline Vector dense_collocation(const Problem& problem, const CollocationScheme& scheme,
                                const Vector& u0) {
  const std::size_t M = scheme.num_nodes(), N = problem.dim();
  const RealMatrix a = problem.jacobian(scheme.t0(), Vector(N, 0.0)).to_dense();
  RealMatrix big(M * N, M * N);
  Vector rhs(M * N);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < N; ++i) {
      rhs[m * N + i] = u0[i];
      big(m * N + i, m * N + i) += 1.0;
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < N; ++k)
          big(m * N + i, j * N + k) -= scheme.dt() * scheme.Q()(m, j) * a(i, k);
    }
  }
  return lu_factor_solve(big, std::span<const double>(rhs));
}

inline bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  return true;
}

}  // namespace testutil
