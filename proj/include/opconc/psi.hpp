#pragma once

#include <string>

namespace opconc {

/// CGF-like function family driving the Chernoff machinery. Each variant is
/// strictly convex on [0, theta_max) with psi(0) = psi'(0) = 0:
///   Normal       theta^2 / 2                          theta_max = inf
///   Poisson(c)   (e^{theta c} - theta c - 1) / c^2    theta_max = inf
///   Gamma(c)     theta^2 / (2 (1 - c theta))          theta_max = 1/c
///   Exponential  theta^2 nu^2 / (2 sigma_sq)          theta_max = 1/alpha
enum class PsiKind { Normal, Poisson, Gamma, Exponential };

class PsiFn {
 public:
  static PsiFn normal();
  static PsiFn poisson(double c);
  static PsiFn gamma(double c);
  static PsiFn exponential(double nu, double alpha, double sigma_sq);

  PsiKind kind() const { return kind_; }
  double theta_max() const;
  double c() const { return c_; }
  double nu() const { return nu_; }
  double alpha() const { return alpha_; }
  double sigma_sq() const { return sigma_sq_; }
  std::string name() const;

  /// psi(theta); domain [0, theta_max), std::domain_error outside.
  double operator()(double theta) const;

 private:
  PsiFn(PsiKind kind, double c, double nu, double alpha, double sigma_sq)
      : kind_(kind), c_(c), nu_(nu), alpha_(alpha), sigma_sq_(sigma_sq) {}
  PsiKind kind_;
  double c_, nu_, alpha_, sigma_sq_;
};

inline double psi_eval(const PsiFn& psi, double theta) { return psi(theta); }

// Auxiliary scalars; all stable near 0.
double phi(double u);     // e^u - u - 1
double varphi(double u);  // cosh(u) - 1
double p_fn(double u);    // min(-u, 1)
double g_fn(double u);    // e^u + p(u) - 1
double h_fn(double u);    // (1+u) log(1+u) - u, u >= 0

/// Closed-form plug-in theta choices for the individual tail bounds.
enum class BoundKind { SubGaussian, Bennett, Bernstein, SubExponential, MartingaleBernstein };

struct ThetaStarParams {
  double r = 0.0;
  double sigma_sq = 0.0;
  double c = 0.0;      // Bennett / Bernstein / MartingaleBernstein
  double nu = 0.0;     // SubExponential
  double alpha = 0.0;  // SubExponential
};

double theta_star(BoundKind kind, const ThetaStarParams& p);

/// inf over theta in [0, theta_max) of exp(psi(theta) sigma_sq - theta r),
/// located by exponential bracket growth from 0 followed by golden-section
/// refinement to relative tolerance 1e-10.
struct ChernoffResult {
  double theta;
  double exponent;  // psi(theta) sigma_sq - theta r at the minimizer
  double value;     // exp(exponent)
};

ChernoffResult chernoff_infimum(const PsiFn& psi, double sigma_sq, double r);

/// The same exponent at a caller-supplied theta (plug-in evaluation).
double chernoff_exponent_at(const PsiFn& psi, double sigma_sq, double r, double theta);

}  // namespace opconc
