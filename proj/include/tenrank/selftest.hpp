#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tenrank/core.hpp"

namespace tenrank {

struct SelfTestResult {
  std::string name;
  bool pass = false;
  std::string details;
};

using SelfTestLog = std::function<void(const SelfTestResult&)>;

/// The ten acceptance ensembles, in order. Every certificate produced along
/// the way is audited (verify, flattening lower bound, serialization round
/// trip); the audit outcome is its own entry. `quick` shrinks the trial
/// counts for a smoke run; the gate uses the full counts. `log`, when set,
/// fires once per finished ensemble.
std::vector<SelfTestResult> run_selftest(std::uint64_t seed, bool quick = false,
                                         const SelfTestLog& log = nullptr);

/// Default seed used by the command line tool and the acceptance gate.
inline constexpr std::uint64_t kDefaultSeed = 1729;

/// 4 x 4 x 3 example whose slice span has determinant form
/// det(x A1 + y A2 + z A3) = (x^2 + y^2 + z^2)^2: positive definite, so no
/// real combination is singular, while complex ones are.
Tensor3 definite_determinant_example(Field field);

}  // namespace tenrank
