#pragma once

#include <string>
#include <vector>

#include "tenrank/core.hpp"

namespace tenrank {

/// Best proven upper bound for the maximal rank of m x n x p tensors over the
/// field, with the formula chain that produced it. Conditional improvements
/// (bounds that need a structural hypothesis on the tensor) are reported as
/// notes and never enter value.
struct BoundReport {
  int m = 0, n = 0, p = 0;
  Field field = Field::Real;
  int value = 0;
  std::vector<std::string> provenance;
  std::vector<std::string> conditional_notes;
};

/// Permutation-symmetric in the dims, monotone in each dim, and never larger
/// over C than over R.
BoundReport upper_bound(int m, int n, int p, Field field);

}  // namespace tenrank
