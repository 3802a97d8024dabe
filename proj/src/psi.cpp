#include "opconc/psi.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Keeps Gamma/Exponential evaluation off the pole at theta_max.
constexpr double kBoundaryBackoff = 1e-9;

[[noreturn]] void domain_fail(const PsiFn& psi, double theta) {
  std::ostringstream msg;
  msg << psi.name() << " is defined on [0, " << psi.theta_max() << "); got theta = " << theta;
  throw std::domain_error(msg.str());
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << " must be positive and finite; got " << v;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PsiFn PsiFn::normal() { return PsiFn(PsiKind::Normal, 0, 0, 0, 0); }

PsiFn PsiFn::poisson(double c) {
  require_positive(c, "c");
  return PsiFn(PsiKind::Poisson, c, 0, 0, 0);
}

PsiFn PsiFn::gamma(double c) {
  require_positive(c, "c");
  return PsiFn(PsiKind::Gamma, c, 0, 0, 0);
}

PsiFn PsiFn::exponential(double nu, double alpha, double sigma_sq) {
  require_positive(nu, "nu");
  require_positive(alpha, "alpha");
  require_positive(sigma_sq, "sigma_sq");
  return PsiFn(PsiKind::Exponential, 0, nu, alpha, sigma_sq);
}

double PsiFn::theta_max() const {
  switch (kind_) {
    case PsiKind::Normal:
    case PsiKind::Poisson:
      return kInf;
    case PsiKind::Gamma:
      return 1.0 / c_;
    case PsiKind::Exponential:
      return 1.0 / alpha_;
  }
  return kInf;
}

std::string PsiFn::name() const {
  switch (kind_) {
    case PsiKind::Normal:
      return "psi_normal";
    case PsiKind::Poisson:
      return "psi_poisson";
    case PsiKind::Gamma:
      return "psi_gamma";
    case PsiKind::Exponential:
      return "psi_exponential";
  }
  return "psi";
}

double PsiFn::operator()(double theta) const {
  if (!(theta >= 0.0) || theta >= theta_max()) domain_fail(*this, theta);
  switch (kind_) {
    case PsiKind::Normal:
      return 0.5 * theta * theta;
    case PsiKind::Poisson:
      return phi(theta * c_) / (c_ * c_);
    case PsiKind::Gamma: {
      const double t = std::min(theta, (1.0 - kBoundaryBackoff) / c_);
      return t * t / (2.0 * (1.0 - c_ * t));
    }
    case PsiKind::Exponential:
      return theta * theta * nu_ * nu_ / (2.0 * sigma_sq_);
  }
  return 0.0;
}

double phi(double u) {
  // expm1(u) - u cancels its leading term for small |u|; switch to the series.
  if (std::abs(u) < 1e-4)
    return u * u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)));
  return std::expm1(u) - u;
}

double varphi(double u) {
  const double s = std::sinh(0.5 * u);
  return 2.0 * s * s;  // cosh(u) - 1 without cancellation near 0
}

double p_fn(double u) { return std::min(-u, 1.0); }

double g_fn(double u) {
  // e^u + p(u) - 1 equals phi(u) for u >= -1 and e^u below.
  if (u >= -1.0) return phi(u);
  return std::exp(u);
}

double h_fn(double u) {
  if (!(u >= 0.0)) throw std::domain_error("h is used on u >= 0");
  if (u < 1e-4) {
    // sum_{k>=2} (-1)^k u^k / (k (k-1))
    return u * u * (0.5 + u * (-1.0 / 6.0 + u * (1.0 / 12.0 - u / 20.0)));
  }
  return (1.0 + u) * std::log1p(u) - u;
}

double theta_star(BoundKind kind, const ThetaStarParams& p) {
  if (!(p.r >= 0.0)) throw std::invalid_argument("theta_star requires r >= 0");
  switch (kind) {
    case BoundKind::SubGaussian:
      require_positive(p.sigma_sq, "sigma_sq");
      return p.r / p.sigma_sq;
    case BoundKind::Bennett:
    case BoundKind::MartingaleBernstein:
      require_positive(p.sigma_sq, "sigma_sq");
      require_positive(p.c, "c");
      return std::log1p(p.c * p.r / p.sigma_sq) / p.c;
    case BoundKind::Bernstein:
      require_positive(p.sigma_sq, "sigma_sq");
      require_positive(p.c, "c");
      return p.r / (p.sigma_sq + p.c * p.r);
    case BoundKind::SubExponential: {
      require_positive(p.nu, "nu");
      require_positive(p.alpha, "alpha");
      const double quadratic = p.r / (p.nu * p.nu);
      if (quadratic < 1.0 / p.alpha) return quadratic;
      return (1.0 - kBoundaryBackoff) / p.alpha;
    }
  }
  throw std::invalid_argument("unknown bound kind");
}

double chernoff_exponent_at(const PsiFn& psi, double sigma_sq, double r, double theta) {
  require_positive(sigma_sq, "sigma_sq");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  return psi(theta) * sigma_sq - theta * r;
}

ChernoffResult chernoff_infimum(const PsiFn& psi, double sigma_sq, double r) {
  require_positive(sigma_sq, "sigma_sq");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  if (r == 0.0) return {0.0, 0.0, 1.0};

  const auto f = [&](double theta) { return psi(theta) * sigma_sq - theta * r; };
  const double cap = std::isfinite(psi.theta_max())
                         ? (1.0 - kBoundaryBackoff) * psi.theta_max()
                         : kInf;

  // Exponential bracket growth from 0: f decreases initially (f'(0) = -r < 0),
  // so grow b until the function turns upward or the domain cap is reached.
  double b = std::isfinite(cap) ? cap / 2.0 : 1.0;
  while (b < cap && f(b) <= f(b / 2.0)) {
    const double next = std::min(2.0 * b, cap);
    if (next == b) break;
    b = next;
  }

  // Golden-section refinement on [0, b].
  constexpr double kRatio = 0.6180339887498949;
  constexpr double kComp = 1.0 - kRatio;
  constexpr double kRelTol = 1e-10;
  double x0 = 0.0, x3 = b;
  double x1 = x0 + kComp * (x3 - x0);
  double x2 = x0 + kRatio * (x3 - x0);
  double f1 = f(x1), f2 = f(x2);
  while (std::abs(x3 - x0) > kRelTol * (std::abs(x1) + std::abs(x2)) &&
         std::abs(x3 - x0) > 1e-300) {
    if (f2 < f1) {
      x0 = x1;
      x1 = x2;
      f1 = f2;
      x2 = x0 + kRatio * (x3 - x0);
      f2 = f(x2);
    } else {
      x3 = x2;
      x2 = x1;
      f2 = f1;
      x1 = x0 + kComp * (x3 - x0);
      f1 = f(x1);
    }
  }
  double theta = f1 < f2 ? x1 : x2;
  double best = std::min(f1, f2);
  if (0.0 < best) {  // the exponent is 0 at theta = 0; never exceed it
    theta = 0.0;
    best = 0.0;
  }
  if (!std::isfinite(best))
    throw std::logic_error("chernoff exponent became non-finite; psi is not CGF-like");
  return {theta, best, std::exp(best)};
}

}  // namespace opconc
