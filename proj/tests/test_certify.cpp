#include <doctest.h>

#include "tenrank/certify.hpp"

using namespace tenrank;

TEST_CASE("reconstruct uses a plain transpose, no conjugation") {
  Decomposition d;
  d.m = 2;
  d.n = 2;
  d.p = 1;
  d.field = Field::Complex;
  d.claimed_bound = 1;
  RankOneTerm t;
  t.a = Vec(2);
  t.b = Vec(2);
  t.c = Vec(1);
  t.a << Cx(1, 0), Cx(0, 1);
  t.b << Cx(0, 1), Cx(2, 0);
  t.c << Cx(1, 0);
  d.terms.push_back(t);
  const Tensor3 r = reconstruct(d);
  CHECK(r.at(0, 0, 0) == Cx(0, 1));   // a0 * b0, not a0 * conj(b0)
  CHECK(r.at(1, 1, 0) == Cx(0, 2));   // i * 2
  CHECK(r.at(1, 0, 0) == Cx(-1, 0));  // i * i
}

TEST_CASE("verify certifies honest work and flags each tamper") {
  const Tensor3 t = random_tensor(2, 3, 2, Field::Real, 12);
  const Decomposition d = decompose_trivial(t);
  CHECK(verify(t, d).verdict == Verdict::Certified);
  CHECK(verify(t, d).lower_bound >= 1);

  Decomposition wrong = d;
  wrong.terms[0].a(0) += Cx(0.1, 0);
  CHECK(verify(t, wrong).verdict == Verdict::ResidualTooLarge);

  Decomposition over = d;
  over.claimed_bound = int(over.terms.size()) - 1;
  CHECK(verify(t, over).verdict == Verdict::BoundExceeded);

  Decomposition shape = d;
  shape.n = 2;
  CHECK(verify(t, shape).verdict == Verdict::Malformed);

  Decomposition dust = d;
  dust.terms[0].b(1) += Cx(0, 1e-3);  // imaginary entry under the real tag
  CHECK(verify(t, dust).verdict == Verdict::Malformed);
}

TEST_CASE("rank conflict fires when the lower bound beats the term count") {
  // diag(1,1) as a single slice has flattening rank 2; a one-term certificate
  // can only be reached with a huge residual allowance.
  Mat s = Mat::Identity(2, 2);
  const Tensor3 t(Field::Real, {s});
  Decomposition d;
  d.m = 2;
  d.n = 2;
  d.p = 1;
  d.field = Field::Real;
  d.claimed_bound = 1;
  RankOneTerm term;
  term.a = Vec::Zero(2);
  term.b = Vec::Zero(2);
  term.c = Vec::Zero(1);
  term.a(0) = Cx(1, 0);
  term.b(0) = Cx(1, 0);
  term.c(0) = Cx(1, 0);
  d.terms.push_back(term);
  Tolerances loose;
  loose.residual_tol = 10.0;
  CHECK(verify(t, d, loose).verdict == Verdict::RankConflict);
}

TEST_CASE("exact zero tensors demand exact zero reconstructions") {
  const Tensor3 z(Field::Real, {Mat::Zero(2, 2)});
  Decomposition empty;
  empty.m = 2;
  empty.n = 2;
  empty.p = 1;
  empty.field = Field::Real;
  empty.claimed_bound = 0;
  CHECK(relative_residual(z, empty) == 0.0);
  CHECK(verify(z, empty).verdict == Verdict::Certified);

  Decomposition junk = empty;
  RankOneTerm term;
  term.a = Vec::Ones(2);
  term.b = Vec::Ones(2);
  term.c = Vec::Ones(1);
  junk.terms.push_back(term);
  junk.claimed_bound = 1;
  CHECK(verify(z, junk).verdict == Verdict::ResidualTooLarge);
}
