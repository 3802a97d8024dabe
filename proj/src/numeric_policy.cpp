#include "opconc/numeric_policy.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace opconc {

NumericPolicy& numeric_policy() {
  static NumericPolicy policy;
  return policy;
}

void load_numeric_policy_overrides(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open numeric policy file: " + json_path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_object()) throw std::runtime_error("numeric policy file must hold a JSON object");
  NumericPolicy& p = numeric_policy();
  for (auto& [key, value] : j.items()) {
    if (key == "symmetry_tol")
      p.symmetry_tol = value.get<double>();
    else if (key == "reconstruction_tol")
      p.reconstruction_tol = value.get<double>();
    else if (key == "psd_tol")
      p.psd_tol = value.get<double>();
    else if (key == "invariant_slack")
      p.invariant_slack = value.get<double>();
    else
      throw std::runtime_error("unknown numeric policy key: " + key);
  }
}

}  // namespace opconc
