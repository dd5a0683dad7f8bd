#include <cmath>

#include "doctest.h"
#include "parasdc/collocation.hpp"
#include "test_util.hpp"

using namespace parasdc;

TEST_CASE("M = 2 right Radau nodes and quadrature matrix") {
  const CollocationScheme s = radau_right_scheme(2);
  CHECK(s.unit_nodes()[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(s.unit_nodes()[1] == 1.0);
  const RealMatrix expected{{5.0 / 12, -1.0 / 12}, {3.0 / 4, 1.0 / 4}};
  CHECK(max_abs_entry(s.Q() - expected) < 1e-15);
}

TEST_CASE("M = 3 nodes and Q match the Radau IIA tableau") {
  const CollocationScheme s = radau_right_scheme(3);
  const double r6 = std::sqrt(6.0);
  CHECK(std::abs(s.unit_nodes()[0] - (4 - r6) / 10) < 1e-15);
  CHECK(std::abs(s.unit_nodes()[1] - (4 + r6) / 10) < 1e-15);
  // Radau IIA coefficients, computed independently with numpy polynomial integration.
  const RealMatrix expected{{0.19681547722366047, -0.06553542585019842, 0.02377097434822016},
                            {0.39442431473908723, 0.29207341166522827, -0.04154875212599791},
                            {0.37640306270046686, 0.5124858261884213, 0.11111111111111105}};
  CHECK(max_abs_entry(s.Q() - expected) < 1e-14);
}

TEST_CASE("quadrature is exact for polynomials of degree < M") {
  for (std::size_t M = 2; M <= 9; ++M) {
    const CollocationScheme s = radau_right_scheme(M);
    const auto& tau = s.unit_nodes();
    for (std::size_t p = 0; p < M; ++p) {
      for (std::size_t m = 0; m < M; ++m) {
        double integral = 0.0;
        for (std::size_t j = 0; j < M; ++j) integral += s.Q()(m, j) * std::pow(tau[j], p);
        CHECK(std::abs(integral - std::pow(tau[m], p + 1) / (p + 1)) < 1e-12);
      }
    }
    // last row: full-interval weights integrate degree 2M-2 exactly
    const std::size_t p = 2 * M - 2;
    double integral = 0.0;
    for (std::size_t j = 0; j < M; ++j) integral += s.Q()(M - 1, j) * std::pow(tau[j], p);
    CHECK(std::abs(integral - 1.0 / (p + 1)) < 1e-12);
    for (std::size_t m = 1; m < M; ++m) CHECK(tau[m] > tau[m - 1]);
    CHECK(tau.back() == 1.0);
  }
}

TEST_CASE("node counts outside 2..9 are rejected") {
  CHECK_THROWS_AS(radau_right_scheme(1), UnsupportedNodeCount);
  CHECK_THROWS_AS(radau_right_scheme(10), UnsupportedNodeCount);
  CHECK_THROWS_AS(radau_right_scheme(3, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("physical interval and node times") {
  const CollocationScheme s = radau_right_scheme(3, 0.2, 0.3);
  CHECK(s.dt() == doctest::Approx(0.1));
  CHECK(s.node_time(2) == 0.3);
  CHECK(s.node_time(0) == doctest::Approx(0.2 + 0.1 * s.unit_nodes()[0]));
  const CollocationScheme t = s.on_interval(1.0, 2.0);
  CHECK(t.Q() == s.Q());
  CHECK(t.node_time(2) == 2.0);
}

TEST_CASE("implicit-Euler preconditioner uses node spacings") {
  const CollocationScheme s = radau_right_scheme(2);
  const Preconditioner ie = qdelta_implicit_euler(s);
  CHECK(ie.qdelta(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(ie.qdelta(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(ie.qdelta(1, 1) == doctest::Approx(2.0 / 3));
  CHECK(ie.qdelta(0, 1) == 0.0);
  CHECK_FALSE(ie.is_diagonal);
}

TEST_CASE("LU trick for M = 2 and its nilpotent stiff limit") {
  const CollocationScheme s = radau_right_scheme(2);
  const Preconditioner lu = qdelta_lu(s);
  const RealMatrix expected{{5.0 / 12, 0.0}, {3.0 / 4, 0.4}};
  CHECK(max_abs_entry(lu.qdelta - expected) < 1e-15);
  CHECK(lu.qdelta.is_lower_triangular());
  for (std::size_t M : {2, 3, 5, 7}) {
    const CollocationScheme sm = radau_right_scheme(M);
    const RealMatrix e = stiff_limit_matrix(sm, qdelta_lu(sm));
    RealMatrix p = e;
    for (std::size_t k = 1; k < M; ++k) p = p * e;
    CHECK(max_abs_entry(p) < 1e-10);
  }
}

TEST_CASE("diagonal preconditioners") {
  const CollocationScheme s = radau_right_scheme(2);
  const Preconditioner qpar = qdelta_qpar(s);
  CHECK(qpar.is_diagonal);
  CHECK(qpar.qdelta(0, 0) == doctest::Approx(5.0 / 12));
  CHECK(qpar.qdelta(1, 1) == doctest::Approx(1.0 / 4));
  const Preconditioner iepar = qdelta_iepar(s);
  CHECK(iepar.qdelta(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(iepar.qdelta(1, 1) == 1.0);
  // E = I - diag(3, 1) Q = [[-1/4, 1/4], [-3/4, 3/4]]: eigenvalues 0 and 1/2
  CHECK(spectral_radius(stiff_limit_matrix(s, iepar)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("preconditioner names round-trip") {
  for (auto k : {PreconditionerKind::IE, PreconditionerKind::LU, PreconditionerKind::Qpar,
                 PreconditionerKind::IEpar, PreconditionerKind::MIN})
    CHECK(parse_preconditioner_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_preconditioner_kind("bogus"), InvalidArgument);
}

TEST_CASE("iteration matrix equals the algebraically equivalent form") {
  const CollocationScheme s = radau_right_scheme(3);
  const Preconditioner lu = qdelta_lu(s);
  for (const Complex z : {Complex(-0.1), Complex(-10.0), Complex(-1.0, 2.0)}) {
    const ComplexMatrix k = sdc_iteration_matrix(s, lu, z);
    // K = z (I - z QD)^-1 (Q - QD)
    const ComplexMatrix qd = to_complex(lu.qdelta);
    const ComplexMatrix alt = z * (inverse(ComplexMatrix::identity(3) - z * qd) *
                                   (to_complex(s.Q()) - qd));
    CHECK(max_abs_entry(k - alt) < 1e-13);
  }
}

TEST_CASE("iteration matrix tends to the stiff limit") {
  const CollocationScheme s = radau_right_scheme(3);
  const Preconditioner iepar = qdelta_iepar(s);
  const ComplexMatrix k = sdc_iteration_matrix(s, iepar, Complex(-1e9));
  CHECK(max_abs_entry(k - to_complex(stiff_limit_matrix(s, iepar))) < 1e-7);
}

TEST_CASE("custom preconditioners") {
  CHECK(custom_preconditioner(RealMatrix::identity(2)).is_diagonal);
  CHECK_THROWS_AS(custom_preconditioner(RealMatrix(2, 3)), DimensionMismatch);
}
