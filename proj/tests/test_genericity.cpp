#include <doctest.h>

#include "tenrank/genericity.hpp"

using namespace tenrank;

TEST_CASE("randomized basis change satisfies nonvanishing requests") {
  Tolerances tol;
  for (Field f : {Field::Real, Field::Complex}) {
    GenericityRequest req;
    Vec v = Vec::Zero(3);
    v(0) = Cx(1, 0);  // e0: P e0 must have all entries nonzero
    Vec u = Vec::Zero(3);
    u(2) = Cx(1, 0);
    Vec w = Vec::Zero(3);
    w(1) = Cx(2, 0);
    req.nonzero_vectors = {v};
    req.nonzero_covectors = {u};
    req.independent_pairs = {{v, w}};

    const Mat p = randomize_nonvanishing(3, req, f, tol, 2024);
    REQUIRE(p.rows() == 3);
    const double scale = p.cwiseAbs().maxCoeff();
    CHECK(numerical_rank(p, tol) == 3);

    const Vec pv = p * v;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(pv(i)) > tol.support_tol * scale);

    const Mat pinv = p.partialPivLu().solve(Mat::Identity(3, 3));
    const Vec upinv = pinv.transpose() * u;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(upinv(i)) > 1e-12);

    Mat pair(3, 2);
    pair.col(0) = p * v;
    pair.col(1) = p * w;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const Cx minor = pair(i, 0) * pair(j, 1) - pair(j, 0) * pair(i, 1);
        CHECK(std::abs(minor) > 1e-12);
      }
    if (f == Field::Real) CHECK(is_real_exact(p));
  }
}

TEST_CASE("randomization is deterministic in the seed") {
  GenericityRequest req;
  Tolerances tol;
  const Mat a = randomize_nonvanishing(4, req, Field::Complex, tol, 7);
  const Mat b = randomize_nonvanishing(4, req, Field::Complex, tol, 7);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("support merge keeps both patterns alive") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  Mat b = Mat::Zero(2, 2);
  b(0, 0) = -1.0;  // t = 1 would cancel the (0,0) cell
  b(1, 1) = 1.0;
  Tolerances tol;
  const auto [t, merged] = generic_support_merge(a, b, tol);
  CHECK(support(a, tol).subset_of(support(merged, tol)));
  CHECK(support(b, tol).subset_of(support(merged, tol)));
  CHECK(t != 1.0);
}

TEST_CASE("unipotent eliminator zeroes a dependent column and nothing else") {
  Mat m(2, 3);
  m.setZero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  // column 0 = col1 * 0 + col2 * 1 scaled: make col2 = col0 + col1
  m(0, 2) = 1.0;
  m(1, 2) = 1.0;
  Tolerances tol;
  const auto [v, j] = unipotent_column_eliminator(m, tol);
  REQUIRE(j >= 0);
  REQUIRE(j < 3);
  // det(V) = 1 exactly: unipotent triangular
  CHECK(std::abs(v.determinant() - Cx(1, 0)) < 1e-12);
  const Mat mv = m * v;
  CHECK(mv.col(j).cwiseAbs().maxCoeff() < 1e-9);
  for (int c = 0; c < 3; ++c) {
    if (c == j) continue;
    CHECK((mv.col(c) - m.col(c)).cwiseAbs().maxCoeff() == 0.0);
  }
}
