#pragma once

#include <string>

namespace opconc {

// Global numeric tolerances. All relative unless noted. Mutated only at
// startup (CLI applies OPCONC_NUMERIC_POLICY overrides before any work).
struct NumericPolicy {
  double symmetry_tol = 1e-12;       // allowed asymmetry at SymMatrix construction
  double reconstruction_tol = 1e-9;  // eigh accuracy contract
  double psd_tol = 1e-10;            // eigenvalue slack when requiring PSD
  double invariant_slack = 1e-9;     // generic slack in deterministic inequality suites
};

NumericPolicy& numeric_policy();

// Applies overrides from a JSON file {"symmetry_tol":..., ...}; unknown keys rejected.
void load_numeric_policy_overrides(const std::string& json_path);

}  // namespace opconc
