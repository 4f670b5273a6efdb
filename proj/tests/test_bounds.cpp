#include <doctest.h>

#include <algorithm>

#include "tenrank/bounds.hpp"

using namespace tenrank;

namespace {
int bnd(int m, int n, int p, Field f) { return upper_bound(m, n, p, f).value; }

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  return std::any_of(lines.begin(), lines.end(), [&](const std::string& s) {
    return s.find(needle) != std::string::npos;
  });
}
}  // namespace

TEST_CASE("pinned bound values, both fields") {
  for (Field f : {Field::Real, Field::Complex}) {
    CHECK(bnd(1, 1, 1, f) == 1);
    CHECK(bnd(2, 2, 2, f) == 3);
    CHECK(bnd(2, 2, 3, f) == 3);
    CHECK(bnd(3, 3, 3, f) == 5);
    CHECK(bnd(5, 5, 3, f) == 9);
    CHECK(bnd(2, 2, 4, f) == 4);
    CHECK(bnd(2, 3, 7, f) == 6);
    CHECK(bnd(3, 3, 4, f) == 6);
    CHECK(bnd(3, 3, 5, f) == 7);
    CHECK(bnd(3, 3, 6, f) == 8);
    CHECK(bnd(3, 3, 7, f) == 8);
    CHECK(bnd(2, 5, 6, f) == 8);
    CHECK(bnd(4, 4, 4, f) == 10);
    CHECK(bnd(4, 4, 5, f) == 11);
    CHECK(bnd(4, 4, 6, f) == 13);
    CHECK(bnd(3, 4, 9, f) == 11);
    CHECK(bnd(4, 4, 13, f) == 15);
  }
}

TEST_CASE("square three-slice values split by field") {
  CHECK(bnd(4, 4, 3, Field::Complex) == 7);
  CHECK(bnd(4, 4, 3, Field::Real) == 8);
  CHECK(bnd(6, 6, 3, Field::Complex) == 11);
  CHECK(bnd(6, 6, 3, Field::Real) == 12);

  // The even square real case carries the conditional improvement as a note.
  const BoundReport r = upper_bound(4, 4, 3, Field::Real);
  CHECK(!r.conditional_notes.empty());
  CHECK(mentions(r.conditional_notes, "singular"));
  CHECK(mentions(r.conditional_notes, "7"));
  // Odd sizes need no condition.
  CHECK(upper_bound(5, 5, 3, Field::Real).conditional_notes.empty());
}

TEST_CASE("monotone repair lowers a raw value from a larger shape") {
  // The direct formulas give 16 at 4x4x12; one more slice gives 15, so the
  // monotone closure inherits 15.
  const BoundReport r = upper_bound(4, 4, 12, Field::Real);
  CHECK(r.value == 15);
  CHECK(mentions(r.provenance, "inherited"));
  CHECK(bnd(4, 4, 13, Field::Real) == 15);
}

TEST_CASE("saturated shapes are exact and flagged as such") {
  const BoundReport r = upper_bound(2, 3, 7, Field::Real);
  CHECK(r.value == 6);
  CHECK(mentions(r.provenance, "exact"));
  CHECK(bnd(3, 3, 9, Field::Complex) == 9);
  CHECK(bnd(3, 3, 11, Field::Complex) == 9);
}

TEST_CASE("degenerate and invalid shapes") {
  CHECK(bnd(0, 3, 3, Field::Real) == 0);
  CHECK(bnd(3, 0, 3, Field::Complex) == 0);
  CHECK_THROWS_AS(upper_bound(-1, 2, 2, Field::Real), PreconditionError);
}

TEST_CASE("permutation symmetry on spot shapes") {
  for (Field f : {Field::Real, Field::Complex}) {
    const int v = bnd(3, 5, 4, f);
    CHECK(bnd(3, 4, 5, f) == v);
    CHECK(bnd(4, 3, 5, f) == v);
    CHECK(bnd(4, 5, 3, f) == v);
    CHECK(bnd(5, 3, 4, f) == v);
    CHECK(bnd(5, 4, 3, f) == v);
  }
}

TEST_CASE("complex bounds never exceed real ones on a spot grid") {
  for (int m = 1; m <= 6; ++m)
    for (int p : {2, 3, 4, 7})
      CHECK(bnd(m, m, p, Field::Complex) <= bnd(m, m, p, Field::Real));
}

TEST_CASE("provenance names the active formula") {
  CHECK(mentions(upper_bound(5, 5, 3, Field::Real).provenance, "square three-slice"));
  CHECK(mentions(upper_bound(3, 4, 3, Field::Real).provenance, "rectangular three-slice"));
  CHECK(mentions(upper_bound(4, 4, 4, Field::Real).provenance, "half-split"));
  CHECK(mentions(upper_bound(3, 4, 9, Field::Real).provenance, "reduction"));
}
