#include <doctest.h>

#include "tenrank/core.hpp"

using namespace tenrank;

TEST_CASE("tensor checks reject malformed data") {
  Mat a = Mat::Zero(2, 2);
  CHECK_NOTHROW(Tensor3(Field::Real, {a, a}));
  Mat b = a;
  b(0, 1) = Cx(0.0, 0.5);
  CHECK_THROWS_AS(Tensor3(Field::Real, {a, b}), PreconditionError);
  CHECK_NOTHROW(Tensor3(Field::Complex, {a, b}));
  Mat c = Mat::Zero(3, 2);
  CHECK_THROWS_AS(Tensor3(Field::Real, {a, c}), PreconditionError);  // ragged slices
  CHECK_THROWS_AS(Tensor3(Field::Real, {}), PreconditionError);
}

TEST_CASE("snap_real zeroes dust and rejects genuine imaginary parts") {
  Mat a(1, 2);
  a << Cx(1.0, 1e-12), Cx(2.0, 0.0);
  const Mat s = snap_real(a, 1e-9);
  CHECK(s(0, 0).imag() == 0.0);
  CHECK(s(0, 0).real() == 1.0);
  a(0, 1) = Cx(2.0, 0.1);
  CHECK_THROWS_AS(snap_real(a, 1e-9), PreconditionError);
}

TEST_CASE("numerical rank thresholds singular values relatively") {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = 5.0;
  a(1, 1) = 5e-12;  // below rank_tol * 5
  CHECK(numerical_rank(a) == 1);
  a(1, 1) = 1e-3;
  CHECK(numerical_rank(a) == 2);
  CHECK(numerical_rank(Mat::Zero(2, 4)) == 0);
}

TEST_CASE("support pattern uses a relative threshold") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-14;
  const SupportPattern s = support(a);
  CHECK(s.contains(0, 0));
  CHECK(!s.contains(1, 1));
  Mat b = a;
  b(0, 1) = 0.5;
  CHECK(s.subset_of(support(b)));
  CHECK(!support(b).subset_of(s));
}

TEST_CASE("transpose and mode permutations move entries where they say") {
  const Tensor3 t = random_tensor(2, 3, 4, Field::Complex, 7);
  const Tensor3 tt = transpose_tensor(t);
  CHECK(tt.rows() == 3);
  CHECK(tt.at(2, 1, 3) == t.at(1, 2, 3));
  // No conjugation.
  CHECK(tt.at(0, 0, 0) == t.at(0, 0, 0));

  const Tensor3 p = permute_modes(t, {2, 0, 1});
  CHECK(p.rows() == 4);
  CHECK(p.cols() == 2);
  CHECK(p.depth() == 3);
  CHECK(p.at(3, 1, 2) == t.at(1, 2, 3));
  const Tensor3 back = permute_modes(p, {1, 2, 0});
  for (int k = 0; k < 4; ++k) CHECK((back.slice(k) - t.slice(k)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flattening lower bound sees through rank-one structure") {
  Vec a(3), b(4), c(2);
  a << 1, 2, -1;
  b << 1, 0, 1, 2;
  c << 3, -2;
  std::vector<Mat> slices;
  for (int k = 0; k < 2; ++k) slices.push_back(c(k) * a * b.transpose());
  const Tensor3 t(Field::Real, slices);
  CHECK(flattening_rank_lower_bound(t) == 1);

  const Tensor3 g = random_tensor(3, 3, 3, Field::Real, 11);
  CHECK(flattening_rank_lower_bound(g) == 3);
}

TEST_CASE("svd_full reconstructs and keeps real input real") {
  const Tensor3 t = random_tensor(3, 4, 1, Field::Real, 5);
  const SvdResult s = svd_full(t.slice(0), Field::Real);
  CHECK(is_real_exact(s.u));
  CHECK(is_real_exact(s.v));
  const Mat rec = s.u * s.sigma.cast<Cx>().asDiagonal() * s.v.adjoint();
  CHECK((rec - t.slice(0)).cwiseAbs().maxCoeff() < 1e-12);

  const Tensor3 tc = random_tensor(3, 3, 1, Field::Complex, 6);
  const SvdResult sc = svd_full(tc.slice(0), Field::Complex);
  const Mat recc = sc.u * sc.sigma.cast<Cx>().asDiagonal() * sc.v.adjoint();
  CHECK((recc - tc.slice(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normal form pins a slice to an exact pseudo identity") {
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 t = random_tensor(3, 5, 3, f, 42);
    const NormalFormResult nf = normal_form_slice(t, 1);
    CHECK(nf.rank == 3);
    const Mat& s = nf.tensor.slice(1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) CHECK(s(i, j) == (i == j ? Cx(1, 0) : Cx(0, 0)));
    // transform really maps the input to the output
    for (int k = 0; k < 3; ++k) {
      const Mat lhs = nf.transform.left * t.slice(k) * nf.transform.right;
      CHECK((lhs - nf.tensor.slice(k)).cwiseAbs().maxCoeff() < 1e-9);
    }
    // inverses are actual inverses
    CHECK((nf.transform.left * nf.transform.left_inv - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("equivalence application composes slice by slice") {
  const Tensor3 t = random_tensor(2, 2, 2, Field::Real, 3);
  EquivalenceTransform eq = EquivalenceTransform::identity(2, 2);
  eq.left << Cx(2, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0);
  eq.left_inv << Cx(0.5, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0);
  const Tensor3 u = apply_equivalence(t, eq);
  CHECK((u.slice(1) - eq.left * t.slice(1) * eq.right).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random tensors are deterministic in the seed and respect the field") {
  const Tensor3 a = random_tensor(3, 2, 2, Field::Real, 99);
  const Tensor3 b = random_tensor(3, 2, 2, Field::Real, 99);
  for (int k = 0; k < 2; ++k) CHECK((a.slice(k) - b.slice(k)).cwiseAbs().maxCoeff() == 0.0);
  const Tensor3 c = random_tensor(3, 2, 2, Field::Real, 100);
  CHECK((a.slice(0) - c.slice(0)).cwiseAbs().maxCoeff() > 0.0);
  CHECK(is_real_exact(a.slice(0)));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}
