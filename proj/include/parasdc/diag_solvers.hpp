#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "parasdc/collocation.hpp"
#include "parasdc/dense.hpp"
#include "parasdc/problems.hpp"
#include "parasdc/sdc.hpp"

namespace parasdc {

struct QDiagonalization {
  enum class Source { FullQ, QDelta };

  Source source;
  EigenDecomposition eig;
};

/// Q = V diag(lambda) V^-1 for the scheme's quadrature matrix.
QDiagonalization diagonalize(const CollocationScheme& scheme);

/// Trivial decomposition (V = I) of a diagonal preconditioner.
QDiagonalization diagonalize(const Preconditioner& diagonal_precond);

/// Solves the collocation problem of a linear problem through M decoupled
/// complex-shifted spatial solves. `imag_residue`, when given, receives the
/// largest imaginary part dropped from the back-transformed solution.
NodeStates linear_direct_solve(const Problem& problem, const CollocationScheme& scheme,
                               const QDiagonalization& diag, std::span<const double> u0,
                               std::size_t workers = 1, double* imag_residue = nullptr);

enum class NewtonVariant { Full, Simplified, Inexact };

std::string_view to_string(NewtonVariant variant);

struct NewtonConfig {
  double tol = 1e-8;
  std::size_t max_iter = 50;
  std::size_t min_iter = 0;
  std::size_t workers = 1;
  ErrorProbe error_probe;
};

/// Newton on G(u) = u - dt Q F(u) - u0 with the full MN x MN Jacobian,
/// re-assembled at every iterate. Serial reference method.
StepResult newton_full(const Problem& problem, const CollocationScheme& scheme,
                       std::span<const double> u0, const NewtonConfig& config = {});

/// Jacobian frozen at spread(u0) and decoupled by diagonalizing Q.
StepResult newton_simplified(const Problem& problem, const CollocationScheme& scheme,
                             const QDiagonalization& diag, std::span<const double> u0,
                             const NewtonConfig& config = {});

/// Jacobian frozen at spread(u0) with Q replaced by a triangular or diagonal
/// Q_Delta, solved by block forward substitution in real arithmetic.
StepResult newton_inexact(const Problem& problem, const CollocationScheme& scheme,
                          const Preconditioner& precond, std::span<const double> u0,
                          const NewtonConfig& config = {});

/// Max over nodes of the spatial max-norm of the difference.
double error_on_nodes(const NodeStates& states, const NodeStates& reference);

/// problem.exact at every node time (rhs cache filled as well).
NodeStates exact_states(const Problem& problem, const CollocationScheme& scheme);

}  // namespace parasdc
