#include <doctest.h>

#include "tenrank/decompose.hpp"
#include "tenrank/serialize.hpp"

using namespace tenrank;

TEST_CASE("tensor json round trip is exact in both fields") {
  for (Field f : {Field::Real, Field::Complex}) {
    const Tensor3 t = random_tensor(2, 3, 2, f, 5);
    const Tensor3 back = tensor_from_json(tensor_to_json(t));
    CHECK(back.field == f);
    for (int k = 0; k < 2; ++k) CHECK((back.slice(k) - t.slice(k)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("certificate json round trip is exact") {
  const Tensor3 t = random_tensor(2, 2, 3, Field::Complex, 9);
  const Decomposition d = decompose(t, Tolerances{}, 9);
  const Decomposition back = decomposition_from_json(decomposition_to_json(d));
  CHECK(back.m == d.m);
  CHECK(back.field == d.field);
  CHECK(back.claimed_bound == d.claimed_bound);
  CHECK(back.seed == d.seed);
  CHECK(back.method == d.method);
  CHECK(back.tol.residual_tol == d.tol.residual_tol);
  REQUIRE(back.terms.size() == d.terms.size());
  for (size_t i = 0; i < d.terms.size(); ++i) {
    CHECK((back.terms[i].a - d.terms[i].a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.terms[i].b - d.terms[i].b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.terms[i].c - d.terms[i].c).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("parser rejects broken input with ParseError") {
  CHECK_THROWS_AS(tensor_from_json(njson::parse(R"({"field":"real"})")), ParseError);
  CHECK_THROWS_AS(tensor_from_json(njson::parse(
                      R"({"dims":[1,1,2],"field":"real","slices":[[[1.0]]]})")),
                  ParseError);  // slice count mismatch
  CHECK_THROWS_AS(tensor_from_json(njson::parse(
                      R"({"dims":[1,1,1],"field":"real","slices":[[[[1.0,2.0]]]]})")),
                  ParseError);  // complex pair under the real tag
  CHECK_THROWS_AS(tensor_from_json(njson::parse(
                      R"({"dims":[1,1,1],"field":"quaternion","slices":[[[1.0]]]})")),
                  ParseError);
  CHECK_THROWS_AS(
      decomposition_from_json(njson::parse(R"({"dims":[1,1,1],"field":"real"})")), ParseError);
  CHECK_THROWS_AS(decomposition_from_json(njson::parse(
                      R"({"dims":[2,1,1],"field":"real","terms":[{"a":[1.0],"b":[1.0],"c":[1.0]}]})")),
                  ParseError);  // vector length mismatch
}

TEST_CASE("complex scalars accept the pair spelling and real ones plain numbers") {
  const Tensor3 t =
      tensor_from_json(njson::parse(R"({"dims":[1,2,1],"field":"complex","slices":[[[ [1.0,-2.0], 3.0 ]]]})"));
  CHECK(t.at(0, 0, 0) == Cx(1, -2));
  CHECK(t.at(0, 1, 0) == Cx(3, 0));
}

TEST_CASE("json output is byte-stable for the same input") {
  const Tensor3 t = random_tensor(3, 2, 2, Field::Complex, 123);
  CHECK(tensor_to_json(t).dump(2) == tensor_to_json(t).dump(2));
  const Decomposition d = decompose(t, Tolerances{}, 123);
  CHECK(decomposition_to_json(d).dump(2) == decomposition_to_json(d).dump(2));
}
