#include "opconc/compare.hpp"

#include <stdexcept>

#include "opconc/bounds.hpp"
#include "opconc/martingale.hpp"
#include "opconc/numeric_policy.hpp"

namespace opconc {

std::vector<ConstantsRow> constants_table() {
  const double ours_op = mode_prefactor(Mode::OpNorm);
  const double ours_me = mode_prefactor(Mode::MaxEig);
  std::vector<ConstantsRow> rows;
  rows.push_back({"opnorm", ours_op, 14.0, 8.0, ours_op / 14.0, ours_op / 8.0, ""});
  rows.push_back({"maxeig", ours_me, 7.0, 4.0, ours_me / 7.0, ours_me / 4.0, ""});
  rows.push_back({"martingale", std::nullopt, 25.0, std::nullopt, std::nullopt, std::nullopt,
                  "ours is the prefactor function (e/(e-1))(1 + tr p-term); spectrum-dependent"});
  return rows;
}

std::vector<GapRow> intrinsic_vs_ambient(const SymMatrix& v, int d, double sigma_sq,
                                         std::span<const double> r_grid) {
  if (v.dim() != d) throw std::invalid_argument("V must have dimension d");
  if (lambda_min(v) < -numeric_policy().psd_tol * std::max(1.0, op_norm(v)))
    throw std::invalid_argument("V must be positive semidefinite");
  const VarianceProxy vp(v, sigma_sq);
  const double ratio = intrinsic_dimension(v) / static_cast<double>(d);
  std::vector<GapRow> rows;
  rows.reserve(r_grid.size());
  for (double r : r_grid) {
    rows.push_back({r, hoeffding_bound(vp, r, Mode::OpNorm).raw,
                    ambient_subgaussian_bound(d, sigma_sq, r), ratio});
  }
  return rows;
}

SharpeningReport martingale_sharpening_report(std::span<const double> ev_spectrum, double sigma_sq,
                                              double c, std::span<const double> r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("empty radius grid");
  SharpeningReport report;
  report.threshold = minsker_validity_threshold(sigma_sq, c);
  report.all_sharpened = true;
  bool any_valid = false;
  for (double r : r_grid) {
    const double ours = martingale_bernstein_bound(ev_spectrum, sigma_sq, c, r);
    const MinskerBound prior = minsker_martingale_bound(ev_spectrum, sigma_sq, c, r);
    SharpeningRow row{r, ours, prior.value, ours / prior.value, prior.valid};
    if (row.valid) {
      any_valid = true;
      if (!(row.ratio < 1.0)) report.all_sharpened = false;
    }
    report.rows.push_back(row);
  }
  if (!any_valid)
    throw std::invalid_argument("no grid point lies in the comparator's validity region r >= " +
                                std::to_string(report.threshold));
  return report;
}

}  // namespace opconc
