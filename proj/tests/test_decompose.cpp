#include <doctest.h>

#include "tenrank/certify.hpp"
#include "tenrank/decompose.hpp"

using namespace tenrank;

namespace {
void check_certified(const Tensor3& t, const Decomposition& d, int limit) {
  CHECK(int(d.terms.size()) <= limit);
  CHECK(d.claimed_bound <= limit);
  const CertificateReport rep = verify(t, d);
  CHECK(rep.verdict == Verdict::Certified);
}
}  // namespace

TEST_CASE("trivial expansion is exact with the cheapest fiber count") {
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 t = random_tensor(2, 3, 4, f, 21);
    const Decomposition d = decompose_trivial(t);
    CHECK(int(d.terms.size()) == 6);  // min(2*3, 2*4, 3*4)
    CHECK(relative_residual(t, d) < 1e-12);
  }
}

TEST_CASE("diagonal tensors expand fiber by fiber") {
  std::vector<Mat> slices;
  for (int k = 0; k < 4; ++k) {
    Mat s = Mat::Zero(3, 5);
    s(0, 0) = 1.0 + k;
    s(2, 2) = 2.0 - k;
    slices.push_back(s);
  }
  const Tensor3 t(Field::Real, slices);
  const Decomposition d = decompose_diagonal_tensor(t);
  CHECK(int(d.terms.size()) == 2);  // only two nonzero diagonal fibers
  CHECK(relative_residual(t, d) < 1e-12);

  slices[1](0, 1) = 0.5;  // off-diagonal entry
  CHECK_THROWS_AS(decompose_diagonal_tensor(Tensor3(Field::Real, slices)), PreconditionError);
}

TEST_CASE("pencil with tail splits into n head and s tail terms") {
  Tolerances tol;
  Mat x = Mat::Identity(2, 2);
  Mat y = Mat::Zero(2, 2);
  y(0, 0) = 2.0;
  y(1, 1) = 3.0;
  Mat u(2, 1), v(2, 1);
  u << 1.0, -1.0;
  v << 0.5, 2.0;
  const Decomposition d = decompose_pencil_tail(x, u, y, v, Field::Real, tol);
  CHECK(int(d.terms.size()) <= 3);
  Mat s0(2, 3), s1(2, 3);
  s0 << x, u;
  s1 << y, v;
  CHECK(relative_residual(Tensor3(Field::Real, {s0, s1}), d) < 1e-9);

  // Degenerate spectrum is a precondition violation.
  CHECK_THROWS_AS(decompose_pencil_tail(x, u, x, v, Field::Real, tol), PreconditionError);
}

TEST_CASE("anchored columns are eliminated before the pencil split") {
  Tolerances tol;
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 t = random_tensor(2, 2, 2, f, 77);
    Vec p(2);
    p << Cx(1, 0), Cx(-2, 0);
    Mat a1(2, 3), a2(2, 3);
    a1.leftCols(2) = t.slice(0);
    a2.leftCols(2) = t.slice(1);
    a1.col(2) = t.slice(0) * p;
    a2.col(2) = t.slice(1) * p;
    const Decomposition d = eliminate_anchored_columns(a1, a2, {{2, p}}, f, tol);
    CHECK(int(d.terms.size()) <= 2);  // n - s = 3 - 1
    CHECK(relative_residual(Tensor3(f, {a1, a2}), d) < 1e-8);
  }
}

TEST_CASE("zero corner route stays within m + n - 1 terms") {
  Tolerances tol;
  // 2 x 3 heads with the (m,m) diagonal cell of the third slice exactly zero
  // and the corner cell (m-1, m-1) present in the first head: variant (a).
  const Tensor3 g = random_tensor(2, 3, 2, Field::Real, 13);
  Mat a3 = Mat::Zero(2, 3);
  a3(0, 0) = 1.0;  // (1,1) nonzero, (2,2) zero
  Mat h0 = g.slice(0), h1 = g.slice(1);
  h0(1, 1) = 2.0;  // corner support
  const Tensor3 t(Field::Real, {h0, h1, a3});
  const Decomposition d = decompose_zero_corner(t, tol, 5);
  check_certified(t, d, 2 + 3 - 1);
}

TEST_CASE("square three-slice stays within 2n - 1 for odd real sizes") {
  Tolerances tol;
  for (int n : {3, 5}) {
    const Tensor3 t = random_tensor(n, n, 3, Field::Real, 100 + n);
    const Decomposition d = decompose_square_3(t, tol, 100 + n);
    check_certified(t, d, 2 * n - 1);
  }
}

TEST_CASE("square three-slice handles complex even sizes") {
  Tolerances tol;
  const Tensor3 t = random_tensor(4, 4, 3, Field::Complex, 55);
  const Decomposition d = decompose_square_3(t, tol, 55);
  check_certified(t, d, 7);
}

TEST_CASE("square route needs a square three-slice tensor") {
  Tolerances tol;
  const Tensor3 t = random_tensor(2, 3, 3, Field::Real, 1);
  CHECK_THROWS_AS(decompose_square_3(t, tol, 1), PreconditionError);
}

TEST_CASE("non-square three-slice stays within m + n - 1") {
  Tolerances tol;
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 a = random_tensor(2, 3, 3, f, 8);
    check_certified(a, decompose_nonsquare_3(a, tol, 8), 4);
    const Tensor3 b = random_tensor(4, 3, 3, f, 9);  // oriented internally
    check_certified(b, decompose_nonsquare_3(b, tol, 9), 6);
  }
}

TEST_CASE("general pairing stays within the parity bounds") {
  Tolerances tol;
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 odd = random_tensor(2, 2, 3, f, 33);
    check_certified(odd, decompose_general_p(odd, tol, 33), 4);  // n + m(p-1)/2
    const Tensor3 even = random_tensor(3, 3, 4, f, 34);
    check_certified(even, decompose_general_p(even, tol, 34), 8);  // n(p+2)/2 - 1
    const Tensor3 rect = random_tensor(3, 4, 4, f, 35);
    check_certified(rect, decompose_general_p(rect, tol, 35), 10);  // 2n + m(p-2)/2
  }
}

TEST_CASE("dispatcher picks a certified short answer and maps orientations back") {
  Tolerances tol;
  // depth-3 along mode 0: the square route applies after permutation
  const Tensor3 t = permute_modes(random_tensor(3, 3, 3, Field::Real, 60), {2, 0, 1});
  const Decomposition d = decompose(t, tol, 60);
  CHECK(int(d.terms.size()) <= 5);
  CHECK(verify(t, d).verdict == Verdict::Certified);
}

TEST_CASE("dispatcher handles zero tensors and zero slices") {
  Tolerances tol;
  const Tensor3 z(Field::Real, {Mat::Zero(2, 2), Mat::Zero(2, 2)});
  const Decomposition dz = decompose(z, tol, 0);
  CHECK(dz.terms.empty());
  CHECK(dz.claimed_bound == 0);
  CHECK(verify(z, dz).verdict == Verdict::Certified);

  const Tensor3 g = random_tensor(2, 2, 2, Field::Real, 71);
  const Tensor3 padded(Field::Real, {g.slice(0), Mat::Zero(2, 2), g.slice(1)});
  const Decomposition d = decompose(padded, tol, 71);
  CHECK(verify(padded, d).verdict == Verdict::Certified);
  CHECK(int(d.terms.size()) <= 3);  // rank bound of the 2-slice core
}

TEST_CASE("dispatcher rejects unknown methods and wrong shapes") {
  Tolerances tol;
  const Tensor3 t = random_tensor(2, 2, 2, Field::Real, 5);
  CHECK_THROWS_AS(decompose(t, tol, 5, "made-up"), PreconditionError);
  CHECK_THROWS_AS(decompose(t, tol, 5, "square3"), PreconditionError);  // p != 3
}

TEST_CASE("decomposition is deterministic in the seed") {
  Tolerances tol;
  const Tensor3 t = random_tensor(3, 4, 3, Field::Complex, 90);
  const Decomposition a = decompose(t, tol, 90);
  const Decomposition b = decompose(t, tol, 90);
  REQUIRE(a.terms.size() == b.terms.size());
  CHECK(a.method == b.method);
  for (size_t i = 0; i < a.terms.size(); ++i) {
    CHECK((a.terms[i].a - b.terms[i].a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.terms[i].b - b.terms[i].b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.terms[i].c - b.terms[i].c).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("claimed bounds come from the construction, not the count") {
  Tolerances tol;
  const Tensor3 t = random_tensor(3, 3, 3, Field::Real, 44);
  const Decomposition d = decompose(t, tol, 44);
  CHECK(d.claimed_bound <= 5);
  CHECK(int(d.terms.size()) <= d.claimed_bound);
}
