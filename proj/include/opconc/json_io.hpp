#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "opconc/ensembles.hpp"
#include "opconc/psi.hpp"
#include "opconc/sym_matrix.hpp"

namespace opconc {

/// Strict schema helper: every object in a config is checked against an
/// explicit key list; unknown fields are rejected with the offending context.
void require_keys(const nlohmann::json& obj, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& context);

// Matrix literal: {"dim": d, "rows": [[...], ...]}, full double round-trip.
nlohmann::json to_json(const SymMatrix& m);
SymMatrix sym_matrix_from_json(const nlohmann::json& j, const std::string& context = "matrix");

// {"kind": "normal"|"poisson"|"gamma"|"exponential", "c":..., "nu":..., "alpha":..., "sigma_sq":...}
nlohmann::json to_json(const PsiFn& psi);
PsiFn psi_from_json(const nlohmann::json& j, const std::string& context = "psi");

// {"kind": "rademacher"|"gaussian"|"bounded_covariance"|"cond_sym_martingale",
//  "seed_root": ... (mandatory), plus per-kind fields}
nlohmann::json to_json(const EnsembleConfig& config);
EnsembleConfig ensemble_from_json(const nlohmann::json& j, const std::string& context = "ensemble");

}  // namespace opconc
