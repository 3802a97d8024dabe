#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opconc/sym_matrix.hpp"

namespace opconc {

/// Prefactor constants of this library against the prior intrinsic-dimension
/// bounds (Minsker) and ambient-dimension bounds (Tropp), plus the ratios.
/// The martingale row is structural: the prior scalar is 25, while our side
/// is the prefactor function (e/(e-1))(1 + tr p-term), so no scalar ratio.
struct ConstantsRow {
  std::string quantity;  // "opnorm" | "maxeig" | "martingale"
  std::optional<double> ours;
  std::optional<double> minsker;
  std::optional<double> tropp;
  std::optional<double> ratio_vs_minsker;
  std::optional<double> ratio_vs_tropp;
  std::string note;
};

std::vector<ConstantsRow> constants_table();

/// Intrinsic bound vs the ambient form 2 d exp(-r^2/(2 sigma_sq)) over a
/// radius grid; ratio column is r(V)/d, the dimension overcount factor.
struct GapRow {
  double r;
  double intrinsic;
  double ambient;
  double ratio;
};

std::vector<GapRow> intrinsic_vs_ambient(const SymMatrix& v, int d, double sigma_sq,
                                         std::span<const double> r_grid);

/// Ratio of our martingale Bernstein bound against the prior comparator at
/// matching inputs over a radius grid. Rows below the comparator's validity
/// threshold are flagged and excluded from the sharpening assertion.
struct SharpeningRow {
  double r;
  double ours;
  double prior;
  double ratio;
  bool valid;
};

struct SharpeningReport {
  std::vector<SharpeningRow> rows;
  double threshold;
  bool all_sharpened;  // ratio < 1 on every valid row
};

SharpeningReport martingale_sharpening_report(std::span<const double> ev_spectrum, double sigma_sq,
                                              double c, std::span<const double> r_grid);

}  // namespace opconc
