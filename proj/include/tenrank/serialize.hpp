#pragma once

#include <string>

#include <json.hpp>

#include "tenrank/certify.hpp"
#include "tenrank/core.hpp"
#include "tenrank/decompose.hpp"

namespace tenrank {

using njson = nlohmann::ordered_json;

/// {"dims":[m,n,p], "field":"real"|"complex", "slices":[ [[...], ...], ... ]}
/// Row-major rows inside each slice. Real tensors use plain numbers, complex
/// ones [re, im] pairs; the parser accepts either spelling but rejects any
/// nonzero imaginary part under the real tag.
njson tensor_to_json(const Tensor3& t);
Tensor3 tensor_from_json(const njson& j);

/// {"dims", "field", "method", "claimed_bound", "seed", "tolerances",
///  "terms":[{"a","b","c"}]} with the same scalar spelling as tensors.
njson decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(const njson& j);

njson report_to_json(const CertificateReport& r);

Tensor3 load_tensor(const std::string& path);
void save_json(const njson& j, const std::string& path);
Decomposition load_decomposition(const std::string& path);

}  // namespace tenrank
