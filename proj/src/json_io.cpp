#include "opconc/json_io.hpp"

#include <algorithm>
#include <stdexcept>

namespace opconc {

using nlohmann::json;

void require_keys(const json& obj, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& context) {
  if (!obj.is_object()) throw std::invalid_argument(context + ": expected a JSON object");
  for (const std::string& key : required)
    if (!obj.contains(key))
      throw std::invalid_argument(context + ": missing required field '" + key + "'");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw std::invalid_argument(context + ": unknown field '" + key + "'");
  }
}

json to_json(const SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"dim", m.dim()}, {"rows", std::move(rows)}};
}

SymMatrix sym_matrix_from_json(const json& j, const std::string& context) {
  require_keys(j, {"dim", "rows"}, {}, context);
  const int dim = j.at("dim").get<int>();
  const auto& rows = j.at("rows");
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    throw std::invalid_argument(context + ": 'rows' must hold exactly 'dim' rows");
  std::vector<std::vector<double>> entries;
  entries.reserve(dim);
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw std::invalid_argument(context + ": each row must hold exactly 'dim' values");
    entries.push_back(row.get<std::vector<double>>());
  }
  return SymMatrix::from_rows(entries);
}

json to_json(const PsiFn& psi) {
  switch (psi.kind()) {
    case PsiKind::Normal:
      return json{{"kind", "normal"}};
    case PsiKind::Poisson:
      return json{{"kind", "poisson"}, {"c", psi.c()}};
    case PsiKind::Gamma:
      return json{{"kind", "gamma"}, {"c", psi.c()}};
    case PsiKind::Exponential:
      return json{{"kind", "exponential"}, {"nu", psi.nu()}, {"alpha", psi.alpha()},
                  {"sigma_sq", psi.sigma_sq()}};
  }
  throw std::logic_error("unreachable psi kind");
}

PsiFn psi_from_json(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument(context + ": psi needs a 'kind' field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "normal") {
    require_keys(j, {"kind"}, {}, context);
    return PsiFn::normal();
  }
  if (kind == "poisson") {
    require_keys(j, {"kind", "c"}, {}, context);
    return PsiFn::poisson(j.at("c").get<double>());
  }
  if (kind == "gamma") {
    require_keys(j, {"kind", "c"}, {}, context);
    return PsiFn::gamma(j.at("c").get<double>());
  }
  if (kind == "exponential") {
    require_keys(j, {"kind", "nu", "alpha", "sigma_sq"}, {}, context);
    return PsiFn::exponential(j.at("nu").get<double>(), j.at("alpha").get<double>(),
                              j.at("sigma_sq").get<double>());
  }
  throw std::invalid_argument(context + ": unknown psi kind '" + kind + "'");
}

namespace {

std::vector<SymMatrix> coeffs_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(context + ": 'coeffs' must be a non-empty array");
  std::vector<SymMatrix> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(sym_matrix_from_json(j[i], context + ".coeffs[" + std::to_string(i) + "]"));
  return out;
}

json coeffs_to_json(const std::vector<SymMatrix>& coeffs) {
  json out = json::array();
  for (const SymMatrix& a : coeffs) out.push_back(to_json(a));
  return out;
}

}  // namespace

json to_json(const EnsembleConfig& config) {
  json j{{"kind", config.kind_name()}, {"seed_root", config.seed_root()}};
  if (const auto* rad = std::get_if<RademacherSeries>(&config.payload())) {
    j["coeffs"] = coeffs_to_json(rad->coeffs);
  } else if (const auto* gau = std::get_if<GaussianSeries>(&config.payload())) {
    j["coeffs"] = coeffs_to_json(gau->coeffs);
  } else if (const auto* cov = std::get_if<BoundedCovariance>(&config.payload())) {
    j["pop_cov"] = to_json(cov->pop_cov);
    j["clip"] = cov->clip;
    j["n"] = cov->n;
  } else {
    const auto& mart = std::get<CondSymMartingale>(config.payload());
    j["base"] = to_json(mart.base);
    j["drive"] = mart.drive;
    j["n"] = mart.n;
  }
  return j;
}

EnsembleConfig ensemble_from_json(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument(context + ": ensemble needs a 'kind' field");
  const std::string kind = j.at("kind").get<std::string>();
  if (!j.contains("seed_root"))
    throw std::invalid_argument(context +
                                ": 'seed_root' is mandatory (no ambient randomness allowed)");
  const auto seed_root = j.at("seed_root").get<std::uint64_t>();
  if (kind == "rademacher") {
    require_keys(j, {"kind", "seed_root", "coeffs"}, {}, context);
    return EnsembleConfig(RademacherSeries{coeffs_from_json(j.at("coeffs"), context)}, seed_root);
  }
  if (kind == "gaussian") {
    require_keys(j, {"kind", "seed_root", "coeffs"}, {}, context);
    return EnsembleConfig(GaussianSeries{coeffs_from_json(j.at("coeffs"), context)}, seed_root);
  }
  if (kind == "bounded_covariance") {
    require_keys(j, {"kind", "seed_root", "pop_cov", "clip", "n"}, {}, context);
    return EnsembleConfig(
        BoundedCovariance{sym_matrix_from_json(j.at("pop_cov"), context + ".pop_cov"),
                          j.at("clip").get<double>(), j.at("n").get<int>()},
        seed_root);
  }
  if (kind == "cond_sym_martingale") {
    require_keys(j, {"kind", "seed_root", "base", "drive", "n"}, {}, context);
    return EnsembleConfig(CondSymMartingale{sym_matrix_from_json(j.at("base"), context + ".base"),
                                            j.at("drive").get<double>(), j.at("n").get<int>()},
                          seed_root);
  }
  throw std::invalid_argument(context + ": unknown ensemble kind '" + kind + "'");
}

}  // namespace opconc
