#include <cmath>
#include <vector>

#include "doctest.h"
#include "parasdc/minimizer.hpp"

using namespace parasdc;

TEST_CASE("Nelder-Mead finds the minimum of a shifted quadratic") {
  const Objective f = [](std::span<const double> x) {
    return (x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2);
  };
  const Vector start{0.0, 0.0};
  NelderMeadOptions opt;
  opt.tol = 1e-10;
  const MinimizerResult r = nelder_mead(f, start, opt);
  CHECK(r.converged);
  CHECK(std::abs(r.q_opt[0] - 1) < 1e-6);
  CHECK(std::abs(r.q_opt[1] - 2) < 1e-6);
  CHECK(r.rho_opt < 1e-10);
  CHECK(r.start == start);
}

TEST_CASE("Nelder-Mead reports non-convergence at the iteration cap") {
  const Objective f = [](std::span<const double> x) { return x[0] + x[1]; };  // unbounded
  NelderMeadOptions opt;
  opt.max_iter = 20;
  const MinimizerResult r = nelder_mead(f, Vector{1.0, 1.0}, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 20);
  CHECK(r.rho_opt < 2.0);
}

TEST_CASE("objective examples") {
  const CollocationScheme s = radau_right_scheme(2);
  // q = 0: I - 0 = I
  CHECK(spectral_radius_objective(s, Vector{0.0, 0.0}) == doctest::Approx(1.0));
  // q = (3, 1) is IEpar for M = 2
  CHECK(spectral_radius_objective(s, Vector{3.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-13));
  // q = 1/diag(Q) is Qpar
  const Vector qpar{12.0 / 5, 4.0};
  CHECK(spectral_radius_objective(s, qpar) ==
        doctest::Approx(spectral_radius(stiff_limit_matrix(s, qdelta_qpar(s)))).epsilon(1e-13));
  CHECK(spectral_radius_objective(s, Vector{-1.0, 1.0}) >= kObjectivePenalty);
  CHECK(spectral_radius_objective(s, Vector{NAN, 1.0}) == kObjectivePenalty);
}

TEST_CASE("M = 2 minima from the two canonical starts") {
  const CollocationScheme s = radau_right_scheme(2);
  MinimizerResult a, b;
  const Preconditioner pa = qdelta_min(s, Vector{1.0, 1.0}, &a);
  const Preconditioner pb = qdelta_min(s, Vector{1.0, 2.0}, &b);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.rho_opt - 6.5e-5) <= 1e-5);
  CHECK(std::abs(b.rho_opt - 2.6e-5) <= 1e-5);
  CHECK(pa.kind == PreconditionerKind::MIN);
  CHECK(pa.is_diagonal);
  // the returned preconditioner is diag(1 / q)
  CHECK(pa.qdelta(0, 0) == doctest::Approx(1.0 / a.q_opt[0]));
  CHECK(pb.qdelta(1, 1) == doctest::Approx(1.0 / b.q_opt[1]));
  // rho recomputed from the preconditioner agrees with the reported value
  CHECK(std::abs(spectral_radius(stiff_limit_matrix(s, pa)) - a.rho_opt) < 1e-12);
  CHECK(std::abs(spectral_radius(stiff_limit_matrix(s, pb)) - b.rho_opt) < 1e-12);
  // never worse than the start
  CHECK(a.rho_opt <= spectral_radius_objective(s, a.start));
  CHECK(b.rho_opt <= spectral_radius_objective(s, b.start));
}

TEST_CASE("minimization is deterministic") {
  const CollocationScheme s = radau_right_scheme(3);
  MinimizerResult a, b;
  qdelta_min(s, Vector{1.0, 1.0, 1.0}, &a);
  qdelta_min(s, Vector{1.0, 1.0, 1.0}, &b);
  CHECK(a.q_opt == b.q_opt);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("default starts and the cached MIN preconditioner") {
  const auto starts = default_min_starts(3);
  REQUIRE(starts.size() == 5);
  CHECK(starts[0] == Vector{1, 1, 1});
  CHECK(starts[2] == Vector{1, 2, 1});
  CHECK(starts[4] == Vector{1, 2, 3});
  for (std::size_t M : {2, 3, 5}) {
    const Preconditioner& p = cached_qdelta_min(M);
    const MinimizerResult& d = cached_qdelta_min_details(M);
    CHECK(p.is_diagonal);
    CHECK(d.rho_opt < 1.0);
    const CollocationScheme s = radau_right_scheme(M);
    CHECK(std::abs(spectral_radius(stiff_limit_matrix(s, p)) - d.rho_opt) < 1e-12);
    CHECK(&cached_qdelta_min(M) == &p);
  }
  CHECK(make_preconditioner(PreconditionerKind::MIN, radau_right_scheme(3)).qdelta ==
        cached_qdelta_min(3).qdelta);
  CHECK_THROWS_AS(make_preconditioner(PreconditionerKind::Custom, radau_right_scheme(3)),
                  InvalidArgument);
}

TEST_CASE("landscape grid, probes and the two basins") {
  const CollocationScheme s = radau_right_scheme(2);
  const Landscape l = landscape_scan(s, 1.0, 5.0, 1.0, 5.0, 41, 2);
  REQUIRE(l.q1.size() == 41);
  REQUIRE(l.rho.size() == 41 * 41);
  CHECK(l.q1[10] == doctest::Approx(2.0));
  CHECK(l.q2[40] == 5.0);
  // (q1, q2) = (3, 1) sits at i = 20, j = 0
  CHECK(l.at(20, 0) == doctest::Approx(0.5).epsilon(1e-13));
  for (std::size_t i = 0; i < 41; ++i)
    for (std::size_t j = 0; j < 41; ++j)
      CHECK(l.at(i, j) == spectral_radius_objective(s, Vector{l.q1[i], l.q2[j]}));

  // two distinct local minima reached from (1, 1) and (1, 2)
  MinimizerResult a, b;
  qdelta_min(s, Vector{1.0, 1.0}, &a);
  qdelta_min(s, Vector{1.0, 2.0}, &b);
  const double gap = std::hypot(a.q_opt[0] - b.q_opt[0], a.q_opt[1] - b.q_opt[1]);
  CHECK(gap > 0.1);

  const Landscape serial = landscape_scan(s, 1.0, 5.0, 1.0, 5.0, 41, 1);
  CHECK(serial.rho == l.rho);
  CHECK_THROWS_AS(landscape_scan(radau_right_scheme(3), 1, 2, 1, 2, 4), InvalidArgument);
  CHECK_THROWS_AS(landscape_scan(s, 0.0, 2.0, 1.0, 2.0, 4), InvalidArgument);
  CHECK_THROWS_AS(landscape_scan(s, 1.0, 2.0, 1.0, 2.0, 1), InvalidArgument);
}
