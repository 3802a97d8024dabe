#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opconc/psi.hpp"
#include "opconc/sym_matrix.hpp"

namespace opconc {

/// Variance-process catalog for the trace-exponential supermartingale
/// R_t = tr exp(theta S_t - psi(theta) V_t). Plain accumulators:
///   Bracket              sum X_i^2
///   Predictable          sum E_{i-1} X_i^2
///   PositivePart         sum max(0, X_i)^2
///   NegativePredictable  sum E_{i-1} min(0, X_i)^2
///   HoeffdingSum         sum A_i^2 (declared coefficient dominators)
/// Composites:
///   SelfNormI            (Bracket + 2 Predictable) / 3
///   SelfNormII           (PositivePart + NegativePredictable) / 2
///   Cubic                Bracket + sum E_{i-1} |X_i|^3
///   BennettPredictable   Predictable, paired with psi_poisson(c)
///   BernsteinDeclared    sum of declared Bernstein increments, psi_gamma(c)
enum class VProcessKind {
  Bracket,
  Predictable,
  PositivePart,
  NegativePredictable,
  SelfNormI,
  SelfNormII,
  HoeffdingSum,
  Cubic,
  BennettPredictable,
  BernsteinDeclared,
};

std::string to_string(VProcessKind kind);
VProcessKind v_process_kind_from_string(const std::string& s);

/// Catalog pairings that make R_t a supermartingale: Bracket (conditionally
/// symmetric increments), SelfNormI/II and HoeffdingSum require psi_normal;
/// Cubic requires psi_gamma(1/6); BennettPredictable psi_poisson(c);
/// BernsteinDeclared psi_gamma(c). Plain Predictable/PositivePart/
/// NegativePredictable are building blocks with no pairing of their own.
bool valid_supermartingale_pairing(VProcessKind kind, const PsiFn& psi);

/// sum_j min(scale * lambda_j, 1): the truncation term tr[p(-scale E V_n)]
/// evaluated on the spectrum of E V_n. Requires scale >= 0 and eigenvalues
/// >= -psd_tol.
double trace_p_term(std::span<const double> ev_spectrum, double scale);

struct MartingaleBoundInput {
  std::vector<double> ev_spectrum;  // eigenvalues of E V_n
  double sigma_sq;
  double r;
  PsiFn psi;
};

/// (e/(e-1)) {tr[p(-psi(theta) E V_n)] + 1} exp(psi(theta) sigma_sq - theta r);
/// a bound on the joint event {lambda_max(S_n) >= r, lambda_max(V_n) <= sigma_sq}
/// for any theta in the psi domain.
double freedman_bound(const MartingaleBoundInput& input, double theta);

/// Minimum of freedman_bound over a theta grid that always includes the
/// closed-form plug-in for the psi family. Valid since each theta gives a
/// bound; no claim of anytime validity in theta.
struct FreedmanOptimum {
  double theta;
  double value;
};
FreedmanOptimum freedman_bound_grid_min(const MartingaleBoundInput& input, int grid_points = 129);

/// Operator-norm convenience wrapper: union bound over +-S_n, i.e. twice the
/// max-eigenvalue bound (the construction must hold for -S_n too, which every
/// catalog pairing here does).
double freedman_opnorm_bound(const MartingaleBoundInput& input, double theta);

/// (e/(e-1)) (1 + sum_j min((r/c) lambda_j / sigma_sq, 1)) exp(-r^2/(2(sigma_sq + rc/3))).
double martingale_bernstein_bound(std::span<const double> ev_spectrum, double sigma_sq, double c,
                                  double r);

/// Prior comparator 25 tr[p(-(r/c) E V_n / sigma_sq)] exp(-r^2/(2(sigma_sq + rc/3))),
/// stated for r >= (1/6)(c + sqrt(c^2 + sigma_sq)); below that threshold the
/// formula value is still returned with valid = false.
struct MinskerBound {
  double value;
  double threshold;
  bool valid;
};
MinskerBound minsker_martingale_bound(std::span<const double> ev_spectrum, double sigma_sq,
                                      double c, double r);

double minsker_validity_threshold(double sigma_sq, double c);

/// Exact conditional moments an ensemble supplies per step; each V-process
/// kind consumes only the fields it needs.
struct ConditionalMoments {
  std::optional<SymMatrix> second;       // E_{t-1} X_t^2
  std::optional<SymMatrix> neg_second;   // E_{t-1} min(0, X_t)^2
  std::optional<SymMatrix> abs_third;    // E_{t-1} |X_t|^3
  std::optional<SymMatrix> coeff_sq;     // A_t^2
  std::optional<SymMatrix> declared_dv;  // Bernstein increment Delta V_t
};

/// Single-owner accumulator for one simulated path; not shared across threads.
class VProcess {
 public:
  VProcess(VProcessKind kind, int dim);

  void step(const SymMatrix& x_t, const ConditionalMoments& moments = {});
  SymMatrix value() const;
  VProcessKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int steps() const { return steps_; }

 private:
  VProcessKind kind_;
  int dim_;
  int steps_ = 0;
  SymMatrix primary_;    // main accumulator
  SymMatrix secondary_;  // second component of composite kinds
};

}  // namespace opconc
