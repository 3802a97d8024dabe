#include "opconc/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "opconc/bounds.hpp"
#include "opconc/numeric_policy.hpp"

namespace opconc {

namespace {

const SymMatrix& require_moment(const std::optional<SymMatrix>& m, VProcessKind kind,
                                const char* what) {
  if (!m) {
    std::ostringstream msg;
    msg << "v-process '" << to_string(kind) << "' needs the " << what
        << " conditional moment, which the ensemble did not supply";
    throw std::invalid_argument(msg.str());
  }
  return *m;
}

void check_dim(const SymMatrix& m, int dim, VProcessKind kind) {
  if (m.dim() != dim) {
    std::ostringstream msg;
    msg << "dimension mismatch in v-process '" << to_string(kind) << "': expected " << dim
        << ", got " << m.dim();
    throw std::invalid_argument(msg.str());
  }
}

double exp_prefactor() { return mode_prefactor(Mode::MaxEig); }

}  // namespace

std::string to_string(VProcessKind kind) {
  switch (kind) {
    case VProcessKind::Bracket: return "bracket";
    case VProcessKind::Predictable: return "predictable";
    case VProcessKind::PositivePart: return "pospart";
    case VProcessKind::NegativePredictable: return "negpred";
    case VProcessKind::SelfNormI: return "selfnorm1";
    case VProcessKind::SelfNormII: return "selfnorm2";
    case VProcessKind::HoeffdingSum: return "hoeffding";
    case VProcessKind::Cubic: return "cubic";
    case VProcessKind::BennettPredictable: return "bennett";
    case VProcessKind::BernsteinDeclared: return "bernstein";
  }
  return "unknown";
}

VProcessKind v_process_kind_from_string(const std::string& s) {
  for (VProcessKind k :
       {VProcessKind::Bracket, VProcessKind::Predictable, VProcessKind::PositivePart,
        VProcessKind::NegativePredictable, VProcessKind::SelfNormI, VProcessKind::SelfNormII,
        VProcessKind::HoeffdingSum, VProcessKind::Cubic, VProcessKind::BennettPredictable,
        VProcessKind::BernsteinDeclared}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown v-process kind '" + s + "'");
}

bool valid_supermartingale_pairing(VProcessKind kind, const PsiFn& psi) {
  switch (kind) {
    case VProcessKind::Bracket:
    case VProcessKind::SelfNormI:
    case VProcessKind::SelfNormII:
    case VProcessKind::HoeffdingSum:
      return psi.kind() == PsiKind::Normal;
    case VProcessKind::Cubic:
      return psi.kind() == PsiKind::Gamma && std::abs(psi.c() - 1.0 / 6.0) < 1e-12;
    case VProcessKind::BennettPredictable:
      return psi.kind() == PsiKind::Poisson;
    case VProcessKind::BernsteinDeclared:
      return psi.kind() == PsiKind::Gamma;
    case VProcessKind::Predictable:
    case VProcessKind::PositivePart:
    case VProcessKind::NegativePredictable:
      return false;  // building blocks only
  }
  return false;
}

double trace_p_term(std::span<const double> ev_spectrum, double scale) {
  if (!(scale >= 0.0)) throw std::invalid_argument("trace_p_term requires scale >= 0");
  double max_ev = 0.0;
  for (double ev : ev_spectrum) max_ev = std::max(max_ev, std::abs(ev));
  const double floor = -numeric_policy().psd_tol * std::max(max_ev, 1.0);
  double total = 0.0;
  for (double ev : ev_spectrum) {
    if (ev < floor) {
      std::ostringstream msg;
      msg << "E V_n spectrum must be positive semidefinite; got eigenvalue " << ev;
      throw std::invalid_argument(msg.str());
    }
    total += std::min(scale * std::max(ev, 0.0), 1.0);
  }
  return total;
}

double freedman_bound(const MartingaleBoundInput& input, double theta) {
  if (!(input.sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be positive");
  if (!(input.r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  const double psi_val = input.psi(theta);  // domain-checks theta
  const double p_term = trace_p_term(input.ev_spectrum, psi_val);
  return exp_prefactor() * (p_term + 1.0) *
         std::exp(psi_val * input.sigma_sq - theta * input.r);
}

FreedmanOptimum freedman_bound_grid_min(const MartingaleBoundInput& input, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
  // Closed-form plug-in for the family, then a geometric/linear sweep around it.
  double plug = 0.0;
  switch (input.psi.kind()) {
    case PsiKind::Normal:
      plug = theta_star(BoundKind::SubGaussian, {.r = input.r, .sigma_sq = input.sigma_sq});
      break;
    case PsiKind::Poisson:
      plug = theta_star(BoundKind::Bennett,
                        {.r = input.r, .sigma_sq = input.sigma_sq, .c = input.psi.c()});
      break;
    case PsiKind::Gamma:
      plug = theta_star(BoundKind::Bernstein,
                        {.r = input.r, .sigma_sq = input.sigma_sq, .c = input.psi.c()});
      break;
    case PsiKind::Exponential:
      plug = theta_star(BoundKind::SubExponential,
                        {.r = input.r, .nu = input.psi.nu(), .alpha = input.psi.alpha()});
      break;
  }
  const double cap = std::isfinite(input.psi.theta_max())
                         ? (1.0 - 1e-9) * input.psi.theta_max()
                         : std::max(4.0 * plug, 1.0);
  FreedmanOptimum best{plug, freedman_bound(input, std::min(plug, cap))};
  for (int i = 0; i < grid_points; ++i) {
    const double theta = cap * static_cast<double>(i) / (grid_points - 1);
    const double value = freedman_bound(input, theta);
    if (value < best.value) best = {theta, value};
  }
  return best;
}

double freedman_opnorm_bound(const MartingaleBoundInput& input, double theta) {
  return 2.0 * freedman_bound(input, theta);
}

double martingale_bernstein_bound(std::span<const double> ev_spectrum, double sigma_sq, double c,
                                  double r) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be positive");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  const double p_term = trace_p_term(ev_spectrum, r / (c * sigma_sq));
  return exp_prefactor() * (1.0 + p_term) *
         std::exp(-r * r / (2.0 * (sigma_sq + r * c / 3.0)));
}

double minsker_validity_threshold(double sigma_sq, double c) {
  return (c + std::sqrt(c * c + sigma_sq)) / 6.0;
}

MinskerBound minsker_martingale_bound(std::span<const double> ev_spectrum, double sigma_sq,
                                      double c, double r) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be positive");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  MinskerBound out;
  out.threshold = minsker_validity_threshold(sigma_sq, c);
  out.valid = r >= out.threshold;
  const double p_term = trace_p_term(ev_spectrum, r / (c * sigma_sq));
  out.value = 25.0 * p_term * std::exp(-r * r / (2.0 * (sigma_sq + r * c / 3.0)));
  return out;
}

VProcess::VProcess(VProcessKind kind, int dim)
    : kind_(kind), dim_(dim), primary_(SymMatrix::zero(dim)), secondary_(SymMatrix::zero(dim)) {
  if (dim < 1) throw std::invalid_argument("v-process dimension must be >= 1");
}

void VProcess::step(const SymMatrix& x_t, const ConditionalMoments& moments) {
  check_dim(x_t, dim_, kind_);
  switch (kind_) {
    case VProcessKind::Bracket:
      primary_ = primary_ + x_t.square();
      break;
    case VProcessKind::Predictable:
    case VProcessKind::BennettPredictable: {
      const SymMatrix& m = require_moment(moments.second, kind_, "second");
      check_dim(m, dim_, kind_);
      primary_ = primary_ + m;
      break;
    }
    case VProcessKind::PositivePart:
      primary_ = primary_ + apply_spectral_fn(x_t, [](double v) { return std::max(0.0, v); }).square();
      break;
    case VProcessKind::NegativePredictable: {
      const SymMatrix& m = require_moment(moments.neg_second, kind_, "negative-part second");
      check_dim(m, dim_, kind_);
      primary_ = primary_ + m;
      break;
    }
    case VProcessKind::SelfNormI: {
      const SymMatrix& m = require_moment(moments.second, kind_, "second");
      check_dim(m, dim_, kind_);
      primary_ = primary_ + x_t.square();  // [S]_t
      secondary_ = secondary_ + m;         // <S>_t
      break;
    }
    case VProcessKind::SelfNormII: {
      const SymMatrix& m = require_moment(moments.neg_second, kind_, "negative-part second");
      check_dim(m, dim_, kind_);
      primary_ =
          primary_ + apply_spectral_fn(x_t, [](double v) { return std::max(0.0, v); }).square();
      secondary_ = secondary_ + m;
      break;
    }
    case VProcessKind::HoeffdingSum: {
      const SymMatrix& m = require_moment(moments.coeff_sq, kind_, "coefficient-square");
      check_dim(m, dim_, kind_);
      primary_ = primary_ + m;
      break;
    }
    case VProcessKind::Cubic: {
      const SymMatrix& m = require_moment(moments.abs_third, kind_, "absolute third");
      check_dim(m, dim_, kind_);
      primary_ = primary_ + x_t.square();
      secondary_ = secondary_ + m;
      break;
    }
    case VProcessKind::BernsteinDeclared: {
      const SymMatrix& m = require_moment(moments.declared_dv, kind_, "declared increment");
      check_dim(m, dim_, kind_);
      primary_ = primary_ + m;
      break;
    }
  }
  ++steps_;
}

SymMatrix VProcess::value() const {
  switch (kind_) {
    case VProcessKind::SelfNormI:
      return (primary_ + secondary_ * 2.0) * (1.0 / 3.0);
    case VProcessKind::SelfNormII:
      return (primary_ + secondary_) * 0.5;
    case VProcessKind::Cubic:
      return primary_ + secondary_;
    default:
      return primary_;
  }
}

}  // namespace opconc
