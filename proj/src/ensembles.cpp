#include "opconc/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace opconc {

namespace {

// SplitMix64 over a counter derived from (seed_root, path, step): each step
// owns an independent draw stream, so sampling is order-free across paths and
// steps and safe to run from any number of workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t root, std::uint64_t path, std::uint64_t step) {
    state_ = mix(mix(mix(root + 0x9e3779b97f4a7c15ULL) ^ path) ^ step);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  double next_uniform() {  // strictly inside (0, 1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

SymMatrix spectral_tanh(const SymMatrix& a) {
  return apply_spectral_fn(a, [](double v) { return std::tanh(v); });
}

SymMatrix spectral_abs_cubed(const SymMatrix& a) {
  return apply_spectral_fn(a, [](double v) { return std::abs(v) * v * v; });
}

// Predictable coefficient of the conditionally symmetric martingale.
SymMatrix condsym_coefficient(const CondSymMartingale& cfg, std::span<const SymMatrix> history) {
  if (cfg.drive == 0.0 || history.empty()) return cfg.base;
  SymMatrix s = SymMatrix::zero(cfg.base.dim());
  for (const SymMatrix& x : history) s = s + x;
  return cfg.base + spectral_tanh(s) * cfg.drive;
}

const double kGaussianAbsThird = 2.0 * std::sqrt(2.0 / std::numbers::pi);  // E|gamma|^3

}  // namespace

EnsembleConfig::EnsembleConfig(Payload payload, std::uint64_t seed_root)
    : payload_(std::move(payload)), seed_root_(seed_root) {
  std::visit(
      [](const auto& cfg) {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, RademacherSeries> || std::is_same_v<T, GaussianSeries>) {
          if (cfg.coeffs.empty()) throw std::invalid_argument("series needs at least one coefficient");
          const int d = cfg.coeffs.front().dim();
          for (const SymMatrix& a : cfg.coeffs)
            if (a.dim() != d)
              throw std::invalid_argument("series coefficients must share one dimension");
        } else if constexpr (std::is_same_v<T, BoundedCovariance>) {
          if (!(cfg.clip > 0.0)) throw std::invalid_argument("clip must be positive");
          if (cfg.n < 1) throw std::invalid_argument("n must be >= 1");
          if (lambda_min(cfg.pop_cov) < -1e-12 * std::max(1.0, op_norm(cfg.pop_cov)))
            throw std::invalid_argument("pop_cov must be positive semidefinite");
        } else {
          if (!(cfg.drive >= 0.0)) throw std::invalid_argument("drive must be >= 0");
          if (cfg.n < 1) throw std::invalid_argument("n must be >= 1");
        }
      },
      payload_);
}

int EnsembleConfig::dim() const {
  return std::visit(
      [](const auto& cfg) -> int {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, RademacherSeries> || std::is_same_v<T, GaussianSeries>)
          return cfg.coeffs.front().dim();
        else if constexpr (std::is_same_v<T, BoundedCovariance>)
          return cfg.pop_cov.dim();
        else
          return cfg.base.dim();
      },
      payload_);
}

int EnsembleConfig::max_length() const {
  return std::visit(
      [](const auto& cfg) -> int {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, RademacherSeries> || std::is_same_v<T, GaussianSeries>)
          return static_cast<int>(cfg.coeffs.size());
        else
          return cfg.n;
      },
      payload_);
}

std::string EnsembleConfig::kind_name() const {
  return std::visit(
      [](const auto& cfg) -> std::string {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, RademacherSeries>) return "rademacher";
        else if constexpr (std::is_same_v<T, GaussianSeries>) return "gaussian";
        else if constexpr (std::is_same_v<T, BoundedCovariance>) return "bounded_covariance";
        else return "cond_sym_martingale";
      },
      payload_);
}

bool EnsembleConfig::supports_conditioning() const {
  return !std::holds_alternative<BoundedCovariance>(payload_);
}

bool EnsembleConfig::is_independent_series() const {
  return std::holds_alternative<RademacherSeries>(payload_) ||
         std::holds_alternative<GaussianSeries>(payload_);
}

bool EnsembleConfig::is_conditionally_symmetric() const {
  return !std::holds_alternative<BoundedCovariance>(payload_);
}

std::vector<SymMatrix> sample_path(const EnsembleConfig& config, std::uint64_t path_index, int n) {
  if (n < 1) throw std::invalid_argument("path length must be >= 1");
  if (n > config.max_length()) {
    std::ostringstream msg;
    msg << "requested length " << n << " exceeds the configured length " << config.max_length();
    throw std::invalid_argument(msg.str());
  }
  std::vector<SymMatrix> path;
  path.reserve(n);

  if (const auto* rad = std::get_if<RademacherSeries>(&config.payload())) {
    for (int t = 0; t < n; ++t) {
      CounterRng rng(config.seed_root(), path_index, static_cast<std::uint64_t>(t));
      path.push_back(rad->coeffs[t] * rng.next_sign());
    }
    return path;
  }
  if (const auto* gau = std::get_if<GaussianSeries>(&config.payload())) {
    for (int t = 0; t < n; ++t) {
      CounterRng rng(config.seed_root(), path_index, static_cast<std::uint64_t>(t));
      path.push_back(gau->coeffs[t] * rng.next_normal());
    }
    return path;
  }
  if (const auto* cov = std::get_if<BoundedCovariance>(&config.payload())) {
    const int d = cov->pop_cov.dim();
    // Robust square root of a possibly singular covariance.
    const Spectrum spec = eigh(cov->pop_cov);
    Eigen::VectorXd root_ev(d);
    for (int k = 0; k < d; ++k) root_ev[k] = std::sqrt(std::max(spec.eigenvalues[k], 0.0));
    const Eigen::MatrixXd chol = spec.eigenvectors * root_ev.asDiagonal();
    constexpr int kMaxAttempts = 100000;
    for (int t = 0; t < n; ++t) {
      CounterRng rng(config.seed_root(), path_index, static_cast<std::uint64_t>(t));
      int attempt = 0;
      for (;;) {
        if (++attempt > kMaxAttempts) {
          std::ostringstream msg;
          msg << "clip " << cov->clip << " rejected " << kMaxAttempts
              << " consecutive covariance samples; clip level looks infeasible";
          throw std::runtime_error(msg.str());
        }
        Eigen::VectorXd z(d);
        for (int k = 0; k < d; ++k) z[k] = rng.next_normal();
        const Eigen::VectorXd v = chol * z;
        Eigen::MatrixXd m = v * v.transpose() - cov->pop_cov.mat();
        SymMatrix x(((m + m.transpose()) / 2.0).eval());
        if (op_norm(x) <= cov->clip) {
          path.push_back(std::move(x));
          break;
        }
      }
    }
    return path;
  }
  const auto& mart = std::get<CondSymMartingale>(config.payload());
  for (int t = 0; t < n; ++t) {
    CounterRng rng(config.seed_root(), path_index, static_cast<std::uint64_t>(t));
    const SymMatrix coeff = condsym_coefficient(mart, path);
    path.push_back(coeff * rng.next_sign());
  }
  return path;
}

TheoreticalParams theoretical_params(const EnsembleConfig& config, int n) {
  if (n < 1 || n > config.max_length())
    throw std::invalid_argument("n outside the configured ensemble length");

  const auto finish = [](SymMatrix v_n, std::optional<double> c_bound,
                         std::vector<PsiFn> psi_valid) {
    TheoreticalParams p{op_norm(v_n), c_bound, std::move(v_n), 0.0, 0.0, std::move(psi_valid)};
    p.trace_v = trace(p.v_n);
    p.d_prime = p.trace_v / p.sigma_sq;
    return p;
  };

  if (const auto* rad = std::get_if<RademacherSeries>(&config.payload())) {
    SymMatrix v = SymMatrix::zero(config.dim());
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      v = v + rad->coeffs[i].square();  // E X_i^2 = A_i^2
      c = std::max(c, op_norm(rad->coeffs[i]));
    }
    return finish(std::move(v), c, {PsiFn::normal(), PsiFn::poisson(c), PsiFn::gamma(c)});
  }
  if (const auto* gau = std::get_if<GaussianSeries>(&config.payload())) {
    SymMatrix v = SymMatrix::zero(config.dim());
    for (int i = 0; i < n; ++i) v = v + gau->coeffs[i].square();
    // log E exp(theta gamma A) = theta^2 A^2 / 2 exactly; unbounded, so no c.
    return finish(std::move(v), std::nullopt, {PsiFn::normal()});
  }
  if (const auto* cov = std::get_if<BoundedCovariance>(&config.payload())) {
    // Unclipped Gaussian fourth-moment identity: E (v v^T - S)^2 = S^2 + tr(S) S.
    // The clip's rejection bias is acknowledged and checked empirically.
    SymMatrix per_draw = cov->pop_cov.square() + cov->pop_cov * trace(cov->pop_cov);
    SymMatrix v = per_draw * static_cast<double>(n);
    return finish(std::move(v), cov->clip,
                  {PsiFn::poisson(cov->clip), PsiFn::gamma(cov->clip)});
  }
  const auto& mart = std::get<CondSymMartingale>(config.payload());
  const double c = op_norm(mart.base) + mart.drive;
  if (mart.drive == 0.0) {
    SymMatrix v = mart.base.square() * static_cast<double>(n);
    return finish(std::move(v), c, {PsiFn::normal(), PsiFn::poisson(c), PsiFn::gamma(c)});
  }
  // History-dependent variance has no closed form; report the deterministic
  // almost-sure dominator sum_t ||X_t||^2 I <= n (||base|| + drive)^2 I.
  SymMatrix v = SymMatrix::identity(config.dim()) * (static_cast<double>(n) * c * c);
  return finish(std::move(v), c, {PsiFn::normal(), PsiFn::poisson(c)});
}

namespace {

[[noreturn]] void conditioning_unsupported(const EnsembleConfig& config) {
  throw std::invalid_argument("ensemble kind '" + config.kind_name() +
                              "' does not supply exact conditional moments");
}

// For sign-symmetric increments X = eps C with predictable C:
// E min(0, X)^2 = (min(0,C)^2 + max(0,C)^2)/2 = C^2/2, and E|X|^3 = |C|^3.
SymMatrix step_coefficient(const EnsembleConfig& config, std::span<const SymMatrix> history) {
  const std::size_t t = history.size();
  if (const auto* rad = std::get_if<RademacherSeries>(&config.payload())) {
    if (t >= rad->coeffs.size()) throw std::invalid_argument("history longer than the series");
    return rad->coeffs[t];
  }
  if (const auto* gau = std::get_if<GaussianSeries>(&config.payload())) {
    if (t >= gau->coeffs.size()) throw std::invalid_argument("history longer than the series");
    return gau->coeffs[t];
  }
  if (const auto* mart = std::get_if<CondSymMartingale>(&config.payload()))
    return condsym_coefficient(*mart, history);
  conditioning_unsupported(config);
}

}  // namespace

SymMatrix conditional_second_moment(const EnsembleConfig& config,
                                    std::span<const SymMatrix> history) {
  if (!config.supports_conditioning()) conditioning_unsupported(config);
  return step_coefficient(config, history).square();  // E eps^2 = E gamma^2 = 1
}

SymMatrix conditional_negpart_second_moment(const EnsembleConfig& config,
                                            std::span<const SymMatrix> history) {
  if (!config.supports_conditioning()) conditioning_unsupported(config);
  return step_coefficient(config, history).square() * 0.5;
}

SymMatrix conditional_abs_third_moment(const EnsembleConfig& config,
                                       std::span<const SymMatrix> history) {
  if (!config.supports_conditioning()) conditioning_unsupported(config);
  SymMatrix abs_cubed = spectral_abs_cubed(step_coefficient(config, history));
  if (std::holds_alternative<GaussianSeries>(config.payload()))
    return abs_cubed * kGaussianAbsThird;
  return abs_cubed;
}

ConditionalMoments conditional_moments_for(const EnsembleConfig& config,
                                           std::span<const SymMatrix> history, VProcessKind kind) {
  ConditionalMoments m;
  switch (kind) {
    case VProcessKind::Bracket:
    case VProcessKind::PositivePart:
      break;
    case VProcessKind::Predictable:
    case VProcessKind::SelfNormI:
    case VProcessKind::BennettPredictable:
      m.second = conditional_second_moment(config, history);
      break;
    case VProcessKind::NegativePredictable:
    case VProcessKind::SelfNormII:
      m.neg_second = conditional_negpart_second_moment(config, history);
      break;
    case VProcessKind::HoeffdingSum:
      // A_t^2: the declared coefficient dominator. For the sign-symmetric
      // kinds the step coefficient itself is that dominator (with equality).
      m.coeff_sq = step_coefficient(config, history).square();
      break;
    case VProcessKind::Cubic:
      m.abs_third = conditional_abs_third_moment(config, history);
      break;
    case VProcessKind::BernsteinDeclared:
      // Bounded increments: Delta V_t = E_{t-1} X_t^2 satisfies the declared
      // moment condition.
      m.declared_dv = conditional_second_moment(config, history);
      break;
  }
  return m;
}

}  // namespace opconc
