#include "opconc/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "opconc/numeric_policy.hpp"

namespace opconc {

namespace {

void require_r(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("r must be finite and >= 0");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << " must be positive and finite; got " << v;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double mode_prefactor(Mode mode) {
  static const double kMaxEig = std::exp(1.0) / (std::exp(1.0) - 1.0);
  return mode == Mode::MaxEig ? kMaxEig : 2.0;
}

std::string to_string(Mode mode) { return mode == Mode::MaxEig ? "maxeig" : "opnorm"; }

Mode mode_from_string(const std::string& s) {
  if (s == "maxeig") return Mode::MaxEig;
  if (s == "opnorm") return Mode::OpNorm;
  throw std::invalid_argument("unknown mode '" + s + "' (expected maxeig or opnorm)");
}

VarianceProxy::VarianceProxy(double trace_v, double sigma_sq)
    : trace_v_(trace_v), sigma_sq_(sigma_sq) {
  require_positive(sigma_sq_, "sigma_sq");
  if (!(trace_v_ >= 0.0) || !std::isfinite(trace_v_))
    throw std::invalid_argument("trace_v must be finite and >= 0");
  if (trace_v_ < sigma_sq_ * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "variance proxy requires trace_v >= sigma_sq so that d' >= 1; got trace_v = "
        << trace_v_ << ", sigma_sq = " << sigma_sq_;
    throw std::invalid_argument(msg.str());
  }
  trace_v_ = std::max(trace_v_, sigma_sq_);
}

VarianceProxy::VarianceProxy(const SymMatrix& v_n) : VarianceProxy(v_n, op_norm(v_n)) {}

VarianceProxy::VarianceProxy(const SymMatrix& v_n, double sigma_sq)
    : VarianceProxy(trace(v_n), sigma_sq) {
  const double norm = op_norm(v_n);
  if (norm > sigma_sq * (1.0 + 1e-9) + 1e-15) {
    std::ostringstream msg;
    msg << "sigma_sq must dominate ||V_n||; got ||V_n|| = " << norm << ", sigma_sq = " << sigma_sq;
    throw std::invalid_argument(msg.str());
  }
  if (lambda_min(v_n) < -numeric_policy().psd_tol * std::max(norm, 1.0))
    throw std::invalid_argument("variance proxy matrix must be positive semidefinite");
  v_full_ = v_n;
}

TailBoundResult make_tail_result(std::string kind, Mode mode, double r, double theta, double raw) {
  TailBoundResult out;
  out.kind = std::move(kind);
  out.mode = mode;
  out.r = r;
  out.theta = theta;
  out.raw = raw;
  out.clamped = std::min(raw, 1.0);
  return out;
}

TailBoundResult master_bound(double d_prime, const PsiFn& psi, double sigma_sq, double r,
                             Mode mode) {
  if (!(d_prime >= 1.0)) {
    std::ostringstream msg;
    msg << "master bound requires d' >= 1; got d' = " << d_prime;
    throw std::invalid_argument(msg.str());
  }
  require_r(r);
  const ChernoffResult inf = chernoff_infimum(psi, sigma_sq, r);
  return make_tail_result("master_" + psi.name(), mode, r, inf.theta,
                          mode_prefactor(mode) * d_prime * inf.value);
}

TailBoundResult master_bound_at(double d_prime, const PsiFn& psi, double sigma_sq, double r,
                                double theta, Mode mode) {
  if (!(d_prime >= 1.0)) throw std::invalid_argument("master bound requires d' >= 1");
  require_r(r);
  const double exponent = chernoff_exponent_at(psi, sigma_sq, r, theta);
  return make_tail_result("master_" + psi.name() + "_at", mode, r, theta,
                          mode_prefactor(mode) * d_prime * std::exp(exponent));
}

TailBoundResult hoeffding_bound(const VarianceProxy& vp, double r, Mode mode) {
  require_r(r);
  const double theta = r / vp.sigma_sq();
  const double raw =
      mode_prefactor(mode) * vp.d_prime() * std::exp(-r * r / (2.0 * vp.sigma_sq()));
  return make_tail_result("hoeffding", mode, r, theta, raw);
}

TailBoundResult subgaussian_bound(const VarianceProxy& vp, double r, Mode mode) {
  TailBoundResult out = hoeffding_bound(vp, r, mode);
  out.kind = "subgaussian";
  return out;
}

TailBoundResult bennett_bound(const VarianceProxy& vp, double c, double r, Mode mode) {
  require_positive(c, "c");
  require_r(r);
  const double s2 = vp.sigma_sq();
  const double theta = theta_star(BoundKind::Bennett, {.r = r, .sigma_sq = s2, .c = c});
  const double raw =
      mode_prefactor(mode) * vp.d_prime() * std::exp(-(s2 / (c * c)) * h_fn(c * r / s2));
  return make_tail_result("bennett", mode, r, theta, raw);
}

TailBoundResult bernstein_bound(const VarianceProxy& vp, double c, double r, Mode mode) {
  require_positive(c, "c");
  require_r(r);
  const double s2 = vp.sigma_sq();
  const double theta = theta_star(BoundKind::Bernstein, {.r = r, .sigma_sq = s2, .c = c});
  const double raw =
      mode_prefactor(mode) * vp.d_prime() * std::exp(-r * r / (2.0 * (s2 + c * r)));
  return make_tail_result("bernstein", mode, r, theta, raw);
}

TailBoundResult subexponential_bound(const VarianceProxy& vp, double nu, double alpha, double r,
                                     Mode mode) {
  require_positive(nu, "nu");
  require_positive(alpha, "alpha");
  require_r(r);
  const double theta =
      theta_star(BoundKind::SubExponential, {.r = r, .nu = nu, .alpha = alpha});
  const double exponent = -0.5 * std::min(r * r / (nu * nu), r / alpha);
  const double raw = mode_prefactor(mode) * vp.d_prime() * std::exp(exponent);
  return make_tail_result("subexponential", mode, r, theta, raw);
}

double ambient_subgaussian_bound(int d, double sigma_sq, double r) {
  if (d < 1) throw std::invalid_argument("ambient bound requires d >= 1");
  require_positive(sigma_sq, "sigma_sq");
  require_r(r);
  return 2.0 * d * std::exp(-r * r / (2.0 * sigma_sq));
}

ConfidenceRadius confidence_radius(long n, double sigma, double c, double trace_v, double delta,
                                   SigmaScaling scaling) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  require_positive(sigma, "sigma");
  require_positive(c, "c");
  require_positive(trace_v, "trace_v");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");

  const double d_prime = trace_v / (sigma * sigma);
  const double log_arg = (2.0 / delta) * d_prime;
  ConfidenceRadius out;
  out.log_term = std::log(log_arg);
  out.flagged = log_arg < 1.0;
  const double el = std::max(out.log_term, 0.0);
  const double nd = static_cast<double>(n);
  if (scaling == SigmaScaling::PerSum)
    out.radius = sigma * std::sqrt(2.0 * el / nd) + c * el / (3.0 * nd);
  else
    out.radius = sigma * std::sqrt(2.0 * el) / nd + c * el / (3.0 * nd);
  return out;
}

}  // namespace opconc
