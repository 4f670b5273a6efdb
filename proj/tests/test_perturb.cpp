#include <doctest.h>

#include "tenrank/perturb.hpp"

using namespace tenrank;

TEST_CASE("epsilon search returns the largest accepted scale") {
  Tolerances tol;
  const double got = epsilon_search(
      [](double eps) -> std::optional<double> {
        if (eps <= 0.125) return eps;
        return std::nullopt;
      },
      tol);
  CHECK(got == 0.125);
  CHECK_THROWS_AS(
      epsilon_search([](double) -> std::optional<double> { return std::nullopt; }, tol),
      EpsilonExhausted);
}

TEST_CASE("perturbation separates a fully degenerate spectrum") {
  Tolerances tol;
  for (Field f : {Field::Real, Field::Complex}) {
    const Mat a = Mat::Identity(3, 3);
    const Mat b = Mat::Identity(3, 3);  // X^{-1}Y = I: eigenvalue 1 thrice
    const DiagonalPerturbation dp = perturb_to_distinct(a, b, {}, f, tol);
    CHECK(dp.spectrum.distinct_in(f, tol));
    CHECK(dp.spectrum.margin > tol.margin_tol);
    Mat ax = a;
    Mat by = b;
    for (int i = 0; i < 3; ++i) {
      ax(i, i) += dp.x(i);
      by(i, i) += dp.y(i);
    }
    CHECK(numerical_rank(ax, tol) == 3);
    const PencilSpectrum check = pencil_spectrum(ax, by, tol);
    CHECK(check.margin > tol.margin_tol);
  }
}

TEST_CASE("preserved cells stay exactly untouched") {
  Tolerances tol;
  const Tensor3 t = random_tensor(4, 4, 2, Field::Real, 31);
  const Mat a = t.slice(0), b = t.slice(1);
  const std::vector<int> preserved = {3};
  const DiagonalPerturbation dp = perturb_to_distinct(a, b, preserved, Field::Real, tol);
  CHECK(dp.x(3) == Cx(0, 0));
  CHECK(dp.y(3) == Cx(0, 0));
  CHECK(dp.spectrum.distinct_in(Field::Real, tol));
  // The reported spectrum belongs to the actually perturbed pencil.
  Mat ax = a, by = b;
  for (int i = 0; i < 4; ++i) {
    ax(i, i) += dp.x(i);
    by(i, i) += dp.y(i);
  }
  CHECK(pencil_spectrum(ax, by, tol).margin == doctest::Approx(dp.spectrum.margin));
}

TEST_CASE("cross ratio condition is what it says") {
  Mat a = Mat::Zero(3, 3), b = Mat::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 2) = 1.0;  // cell (n-1, n) one-based
  a(2, 1) = 2.0;  // cell (n, n-1)
  b(1, 2) = 3.0;
  b(2, 1) = 4.0;
  Tolerances tol;
  CHECK(cross_ratio_applicable(a, b, tol));  // 3/1 != 4/2
  b(2, 1) = 6.0;                             // 3/1 == 6/2
  CHECK(!cross_ratio_applicable(a, b, tol));
  b(2, 1) = 4.0;
  a(2, 2) = 1.0;  // corner must stay out of both supports
  CHECK(!cross_ratio_applicable(a, b, tol));
  a(2, 2) = 0.0;
  a(1, 2) = 0.0;  // corner cells of A must be present
  CHECK(!cross_ratio_applicable(a, b, tol));
}

TEST_CASE("anchored perturbation keeps the anchor identity exact") {
  Tolerances tol;
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 t = random_tensor(3, 3, 2, f, 47);
    const Mat a = t.slice(0), b = t.slice(1);
    Vec va(3), vb(3);
    va << Cx(1, 0), Cx(2, 0), Cx(-1, 0);
    vb << Cx(3, 0), Cx(1, 0), Cx(2, 0);  // ratios 3, 1/2, -2 distinct
    const AnchoredPerturbation ap = perturb_with_anchor(a, b, va, vb, f, tol);
    Mat ax = a, by = b;
    for (int i = 0; i < 3; ++i) {
      ax(i, i) += ap.x(i);
      by(i, i) += ap.y(i);
    }
    CHECK((ax * ap.p - va).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((by * ap.p - vb).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ap.spectrum.distinct_in(f, tol));
    CHECK(numerical_rank(ax, tol) == 3);
  }
}
