#pragma once

#include "tenrank/core.hpp"
#include "tenrank/decompose.hpp"

namespace tenrank {

enum class Verdict {
  Certified,
  Malformed,         // dims/field mismatch, non-finite or non-real data
  ResidualTooLarge,  // reconstruction misses the tensor
  BoundExceeded,     // more terms than the certificate claims
  RankConflict,      // fewer terms than the flattening lower bound
};

const char* verdict_name(Verdict v);

struct CertificateReport {
  Verdict verdict = Verdict::Malformed;
  int term_count = 0;
  int claimed_bound = 0;
  double relative_residual = 0.0;
  int lower_bound = 0;
  std::vector<std::string> method;
};

/// Sum of the rank-one terms as a tensor with the decomposition's dims/field.
Tensor3 reconstruct(const Decomposition& d);

/// Frobenius residual relative to ||t||; exact-zero t demands exact-zero
/// reconstruction (else infinity).
double relative_residual(const Tensor3& t, const Decomposition& d);

/// Full check of a certificate against a tensor. Never throws on bad
/// certificates; the verdict carries the failure.
CertificateReport verify(const Tensor3& t, const Decomposition& d, const Tolerances& tol = {});

}  // namespace tenrank
