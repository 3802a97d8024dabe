#pragma once

#include <optional>
#include <string>

#include "opconc/psi.hpp"
#include "opconc/sym_matrix.hpp"

namespace opconc {

/// Which deviation statistic a tail bound controls. The prefactor constant is
/// part of the contract: e/(e-1) for the maximum eigenvalue, 2 for the
/// operator norm.
enum class Mode { MaxEig, OpNorm };

double mode_prefactor(Mode mode);
std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

/// Variance information (trace of V_n and the dominating sigma^2 >= ||V_n||).
/// Enforces trace_v >= sigma_sq so that d' = trace_v / sigma_sq >= 1, the
/// precondition of every bound below. When constructed from a full matrix,
/// sigma_sq defaults to ||V_n|| (the tightest legal choice).
class VarianceProxy {
 public:
  VarianceProxy(double trace_v, double sigma_sq);
  explicit VarianceProxy(const SymMatrix& v_n);
  VarianceProxy(const SymMatrix& v_n, double sigma_sq);

  double trace_v() const { return trace_v_; }
  double sigma_sq() const { return sigma_sq_; }
  double d_prime() const { return trace_v_ / sigma_sq_; }
  const std::optional<SymMatrix>& v_full() const { return v_full_; }

 private:
  double trace_v_;
  double sigma_sq_;
  std::optional<SymMatrix> v_full_;
};

/// A single evaluated tail bound. `raw` is the unclamped value (kept so that
/// tightness ratios remain meaningful above 1); `clamped` = min(raw, 1).
struct TailBoundResult {
  std::string kind;
  Mode mode;
  double r;
  double theta;
  double raw;
  double clamped;
};

TailBoundResult make_tail_result(std::string kind, Mode mode, double r, double theta, double raw);

/// C(mode) * d' * inf_theta exp(psi(theta) sigma_sq - theta r), the master
/// tail bound with the infimum located numerically. Requires d' >= 1.
TailBoundResult master_bound(double d_prime, const PsiFn& psi, double sigma_sq, double r, Mode mode);

/// Same formula at a caller-supplied theta (a valid bound for any theta in
/// the psi domain; used to cross-check closed-form plug-in choices).
TailBoundResult master_bound_at(double d_prime, const PsiFn& psi, double sigma_sq, double r,
                                double theta, Mode mode);

// Closed-form instances. Hoeffding and sub-Gaussian share one displayed
// formula but are kept distinct because their hypotheses differ.
TailBoundResult hoeffding_bound(const VarianceProxy& vp, double r, Mode mode);
TailBoundResult subgaussian_bound(const VarianceProxy& vp, double r, Mode mode);
TailBoundResult bennett_bound(const VarianceProxy& vp, double c, double r, Mode mode);
TailBoundResult bernstein_bound(const VarianceProxy& vp, double c, double r, Mode mode);
TailBoundResult subexponential_bound(const VarianceProxy& vp, double nu, double alpha, double r,
                                     Mode mode);

/// The ambient-dimension sub-Gaussian form 2 d exp(-r^2 / (2 sigma_sq));
/// comparison baseline only.
double ambient_subgaussian_bound(int d, double sigma_sq, double r);

/// sigma normalization for the confidence radius. The inputs (sigma, trace_v)
/// always describe the n-sample sum V_n; the enum picks the output scale:
///   PerSum  - the display formula evaluated literally,
///             sigma sqrt((2/n) L) + (c/(3n)) L, valid but loose by sqrt(n)
///             for the mean when sigma^2 = ||V_n||;
///   PerMean - the sharp mean-scale inversion sigma sqrt(2 L)/n + (c/(3n)) L.
/// L = log((2/delta) trace_v / sigma^2) in both.
enum class SigmaScaling { PerSum, PerMean };

struct ConfidenceRadius {
  double radius;
  double log_term;  // L, before any clamping
  bool flagged;     // (2/delta) trace_v / sigma^2 < 1, so L was clamped at 0
};

ConfidenceRadius confidence_radius(long n, double sigma, double c, double trace_v, double delta,
                                   SigmaScaling scaling = SigmaScaling::PerSum);

}  // namespace opconc
