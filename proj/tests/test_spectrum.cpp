#include <doctest.h>

#include <algorithm>
#include <complex>

#include "tenrank/spectrum.hpp"

using namespace tenrank;

TEST_CASE("determinant polynomial on a line matches the closed form") {
  Mat m0 = Mat::Identity(2, 2);
  Mat m1 = Mat::Zero(2, 2);
  m1(0, 0) = 1.0;
  m1(1, 1) = 2.0;
  // det(I + t diag(1,2)) = (1+t)(1+2t) = 1 + 3t + 2t^2
  const PolynomialF p = det_polynomial_on_line(m0, m1, Field::Real);
  REQUIRE(p.degree() == 2);
  CHECK(std::abs(p.coeffs[0] - Cx(1, 0)) < 1e-10);
  CHECK(std::abs(p.coeffs[1] - Cx(3, 0)) < 1e-10);
  CHECK(std::abs(p.coeffs[2] - Cx(2, 0)) < 1e-10);

  auto roots = polynomial_roots(p);
  REQUIRE(roots.size() == 2);
  std::sort(roots.begin(), roots.end(), [](Cx a, Cx b) { return a.real() < b.real(); });
  CHECK(std::abs(roots[0] - Cx(-1, 0)) < 1e-9);
  CHECK(std::abs(roots[1] - Cx(-0.5, 0)) < 1e-9);
}

TEST_CASE("polynomial eval and derivative") {
  PolynomialF p;
  p.coeffs = {Cx(1, 0), Cx(0, 0), Cx(3, 0)};  // 1 + 3t^2
  p.field = Field::Real;
  CHECK(std::abs(p.eval(Cx(2, 0)) - Cx(13, 0)) < 1e-12);
  const PolynomialF d = p.derivative();
  REQUIRE(d.degree() == 1);
  CHECK(std::abs(d.coeffs[1] - Cx(6, 0)) < 1e-12);
}

TEST_CASE("eigen decomposition realifies real spectra and rejects complex ones") {
  Mat s = Mat::Zero(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = 1.0;
  s(1, 1) = 3.0;
  const auto [evs, vecs] = eigen_decomposition(s, Field::Real);
  CHECK(is_real_exact(vecs));
  Vec sorted = evs;
  std::sort(sorted.data(), sorted.data() + 2, [](Cx a, Cx b) { return a.real() < b.real(); });
  CHECK(std::abs(sorted(0) - Cx(1, 0)) < 1e-10);
  CHECK(std::abs(sorted(1) - Cx(3, 0)) < 1e-10);
  // S vecs = vecs diag(evs)
  CHECK((s * vecs - vecs * evs.asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-9);

  Mat rot = Mat::Zero(2, 2);
  rot(0, 1) = 1.0;
  rot(1, 0) = -1.0;  // eigenvalues +-i
  CHECK_THROWS_AS(eigen_decomposition(rot, Field::Real), PreconditionError);
  CHECK_NOTHROW(eigen_decomposition(rot, Field::Complex));
}

TEST_CASE("pencil spectrum reports margins") {
  Mat x = Mat::Identity(3, 3);
  Mat y = Mat::Zero(3, 3);
  y(0, 0) = 1.0;
  y(1, 1) = 2.0;
  y(2, 2) = 3.0;
  const PencilSpectrum ps = pencil_spectrum(x, y);
  CHECK(ps.margin == doctest::Approx(1.0));
  CHECK(ps.max_imag == doctest::Approx(0.0));
  Tolerances tol;
  CHECK(ps.distinct_in(Field::Real, tol));

  y(1, 1) = 1.0 + 1e-9;  // nearly repeated
  CHECK(!pencil_spectrum(x, y).distinct_in(Field::Real, tol));
}

TEST_CASE("det span evaluator agrees with a direct determinant") {
  const Tensor3 t = random_tensor(3, 3, 3, Field::Complex, 17);
  const auto ev = det_span_evaluator(t);
  Vec c(3);
  c << Cx(0.3, 0.1), Cx(-1.0, 0.0), Cx(0.2, -0.4);
  Mat m = Mat::Zero(3, 3);
  for (int k = 0; k < 3; ++k) m += c(k) * t.slice(k);
  CHECK(std::abs(ev(c) - m.determinant()) < 1e-10);
}

TEST_CASE("singular combinations: rotation pencil has complex roots only") {
  // Slices I and J = [[0,1],[-1,0]]: det(xI + yJ) = x^2 + y^2.
  Mat id = Mat::Identity(2, 2);
  Mat j = Mat::Zero(2, 2);
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  Tolerances tol;
  const Tensor3 treal(Field::Real, {id, j});
  CHECK(!find_singular_combination(treal, tol, 64, 1));
  const Tensor3 tcplx(Field::Complex, {id, j});
  const auto c = find_singular_combination(tcplx, tol, 64, 1);
  REQUIRE(c.has_value());
  Mat m = (*c)(0) * id + (*c)(1) * j;
  const SvdResult s = svd_full(m, Field::Complex);
  CHECK(s.sigma(1) < tol.rank_tol * s.sigma(0));
}

TEST_CASE("singular combinations find a singular slice immediately") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;  // singular slice
  Mat b = Mat::Identity(2, 2);
  Tolerances tol;
  const auto c = find_singular_combination(Tensor3(Field::Real, {a, b}), tol, 16, 0);
  REQUIRE(c.has_value());
  Mat m = (*c)(0) * a + (*c)(1) * b;
  CHECK(numerical_rank(m, tol) < 2);
  CHECK(m.cwiseAbs().maxCoeff() > 0.1);  // nonzero member
}
