#include "opconc/mc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "opconc/bounds.hpp"

namespace opconc {

namespace {

// ---- small-matrix spectral helpers (exact closed forms for dim <= 2) ----

void extreme_eigenvalues(const Eigen::MatrixXd& m, double& lo, double& hi) {
  if (m.rows() == 1) {
    lo = hi = m(0, 0);
    return;
  }
  if (m.rows() == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double disc = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));
    lo = mean - disc;
    hi = mean + disc;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  lo = solver.eigenvalues().minCoeff();
  hi = solver.eigenvalues().maxCoeff();
}

double stat_of(const Eigen::MatrixXd& m, bool opnorm) {
  double lo, hi;
  extreme_eigenvalues(m, lo, hi);
  return opnorm ? std::max(-lo, hi) : hi;
}

double trace_spectral_sum(const Eigen::MatrixXd& m, double (*f)(double)) {
  if (m.rows() == 1) return f(m(0, 0));
  if (m.rows() == 2) {
    double lo, hi;
    extreme_eigenvalues(m, lo, hi);
    return f(lo) + f(hi);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    total += f(solver.eigenvalues()[i]);
  return total;
}

double tr_exp(const Eigen::MatrixXd& m) {
  return trace_spectral_sum(m, +[](double v) { return std::exp(v); });
}

// ---- deterministic chunked parallel runner ----

constexpr std::uint64_t kChunk = 4096;

// Runs per_chunk(begin, end) over fixed chunks of [0, total) and returns the
// chunk results in index order, so any floating-point combination done by the
// caller is independent of the worker count.
template <typename ChunkResult, typename PerChunk>
std::vector<ChunkResult> run_chunked(std::uint64_t total, int threads, PerChunk per_chunk) {
  const std::uint64_t n_chunks = (total + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(n_chunks);
  const int n_threads =
      std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(n_chunks, 256))));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        const std::uint64_t begin = c * kChunk;
        results[c] = per_chunk(begin, std::min(total, begin + kChunk));
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

struct CountChunk {
  std::vector<std::uint64_t> counts;
};

struct MomentChunk {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::uint64_t n = 0;
};

std::vector<StepStat> finalize_moments(const std::vector<MomentChunk>& chunks, int steps) {
  std::vector<double> sum(steps, 0.0), sum_sq(steps, 0.0);
  std::uint64_t n = 0;
  for (const MomentChunk& c : chunks) {
    for (int i = 0; i < steps; ++i) {
      sum[i] += c.sum[i];
      sum_sq[i] += c.sum_sq[i];
    }
    n += c.n;
  }
  std::vector<StepStat> out(steps);
  for (int i = 0; i < steps; ++i) {
    const double mean = sum[i] / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_sq[i] / static_cast<double>(n) - mean * mean);
    out[i] = {mean, std::sqrt(var / static_cast<double>(n))};
  }
  return out;
}

}  // namespace

std::string to_string(TailStatisticKind kind) {
  switch (kind) {
    case TailStatisticKind::SupMaxEig: return "sup_maxeig";
    case TailStatisticKind::SupOpNorm: return "sup_opnorm";
    case TailStatisticKind::JointFreedman: return "joint_freedman";
  }
  return "unknown";
}

TailStatisticKind tail_statistic_kind_from_string(const std::string& s) {
  if (s == "sup_maxeig") return TailStatisticKind::SupMaxEig;
  if (s == "sup_opnorm") return TailStatisticKind::SupOpNorm;
  if (s == "joint_freedman") return TailStatisticKind::JointFreedman;
  throw std::invalid_argument("unknown tail statistic '" + s + "'");
}

double binomial_upper_conf(std::uint64_t successes, std::uint64_t trials, double alpha) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (successes > trials) throw std::invalid_argument("successes cannot exceed trials");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (successes == trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes) + 1.0,
                                static_cast<double>(trials - successes), 1.0 - alpha);
}

std::vector<double> enumerate_exact(const EnsembleConfig& config, int n,
                                    std::span<const double> r_grid, TailStatisticKind stat) {
  const auto* series = std::get_if<RademacherSeries>(&config.payload());
  if (!series)
    throw std::invalid_argument("exact enumeration is defined for Rademacher series only");
  if (stat == TailStatisticKind::JointFreedman)
    throw std::invalid_argument("exact enumeration supports the prefix-supremum statistics only");
  if (n < 1 || n > static_cast<int>(series->coeffs.size()))
    throw std::invalid_argument("n outside the configured series length");
  const int dim = config.dim();
  const int cap = dim == 1 ? 22 : 14;
  if (n > cap) {
    std::ostringstream msg;
    msg << "enumeration refused: n = " << n << " exceeds the cap " << cap << " for dim " << dim
        << " (2^" << n << " = " << std::pow(2.0, n) << " sign patterns, roughly "
        << std::pow(2.0, n + 1) << " prefix updates)";
    throw std::invalid_argument(msg.str());
  }

  const bool opnorm = stat == TailStatisticKind::SupOpNorm;
  std::vector<double> grid(r_grid.begin(), r_grid.end());
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("r_grid must be sorted ascending");

  std::vector<Eigen::MatrixXd> coeff(n);
  for (int i = 0; i < n; ++i) coeff[i] = series->coeffs[i].mat();

  // All-plus starting pattern.
  std::vector<double> sign(n, 1.0);
  std::vector<Eigen::MatrixXd> prefix(n);
  std::vector<double> stat_at(n), run_max(n);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    acc += coeff[i];
    prefix[i] = acc;
    stat_at[i] = stat_of(prefix[i], opnorm);
    run_max[i] = i == 0 ? stat_at[0] : std::max(run_max[i - 1], stat_at[i]);
  }

  const std::size_t m = grid.size();
  std::vector<std::uint64_t> hist(m + 1, 0);
  const auto tally = [&](double value) {
    const std::size_t idx =
        std::upper_bound(grid.begin(), grid.end(), value) - grid.begin();
    ++hist[idx];  // pattern exceeds grid[i] exactly for i < idx
  };
  tally(run_max[n - 1]);

  // Reflected Gray code; bit j flips 2^{n-1-j} times, so map it to series
  // index n-1-j and pay only for the prefixes at and after the flip.
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int j = std::countr_zero(k);
    const int idx = n - 1 - j;
    const Eigen::MatrixXd delta = (-2.0 * sign[idx]) * coeff[idx];
    sign[idx] = -sign[idx];
    for (int i = idx; i < n; ++i) {
      prefix[i] += delta;
      stat_at[i] = stat_of(prefix[i], opnorm);
      run_max[i] = i == 0 ? stat_at[0] : std::max(run_max[i - 1], stat_at[i]);
    }
    tally(run_max[n - 1]);
  }

  // Suffix sums: exceed count for grid[i] is the mass at indices > i.
  std::vector<double> out(m);
  std::uint64_t running = 0;
  for (std::size_t i = m; i-- > 0;) {
    running += hist[i + 1];
    out[i] = static_cast<double>(running) / static_cast<double>(total);
  }
  return out;
}

std::vector<TailEstimate> run_trials(const EnsembleConfig& config, int n, std::uint64_t trials,
                                     std::span<const double> r_grid, const TailStatistic& statistic,
                                     int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (n < 1 || n > config.max_length())
    throw std::invalid_argument("n outside the configured ensemble length");
  std::vector<double> grid(r_grid.begin(), r_grid.end());
  const std::size_t m = grid.size();
  const bool joint = statistic.kind == TailStatisticKind::JointFreedman;
  const bool opnorm = statistic.kind == TailStatisticKind::SupOpNorm;
  if (joint && !(statistic.sigma_sq > 0.0))
    throw std::invalid_argument("joint statistic needs a positive sigma_sq");

  auto chunks = run_chunked<CountChunk>(trials, threads, [&](std::uint64_t begin,
                                                             std::uint64_t end) {
    CountChunk chunk;
    chunk.counts.assign(m, 0);
    for (std::uint64_t p = begin; p < end; ++p) {
      const std::vector<SymMatrix> path = sample_path(config, p, n);
      if (!joint) {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(config.dim(), config.dim());
        double sup = -std::numeric_limits<double>::infinity();
        for (const SymMatrix& x : path) {
          s += x.mat();
          sup = std::max(sup, stat_of(s, opnorm));
        }
        for (std::size_t i = 0; i < m; ++i)
          if (sup >= grid[i]) ++chunk.counts[i];
      } else {
        SymMatrix s = SymMatrix::zero(config.dim());
        VProcess vp(statistic.v_kind, config.dim());
        for (std::size_t t = 0; t < path.size(); ++t) {
          vp.step(path[t], conditional_moments_for(
                               config, std::span<const SymMatrix>(path.data(), t),
                               statistic.v_kind));
          s = s + path[t];
        }
        const double s_max = lambda_max(s);
        const bool conditioned = lambda_max(vp.value()) <= statistic.sigma_sq;
        for (std::size_t i = 0; i < m; ++i)
          if (conditioned && s_max >= grid[i]) ++chunk.counts[i];
      }
    }
    return chunk;
  });

  std::vector<std::uint64_t> counts(m, 0);
  for (const CountChunk& c : chunks)
    for (std::size_t i = 0; i < m; ++i) counts[i] += c.counts[i];

  std::vector<TailEstimate> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    TailEstimate e;
    e.r = grid[i];
    e.p_hat = static_cast<double>(counts[i]) / static_cast<double>(trials);
    e.upper_conf = binomial_upper_conf(counts[i], trials);
    e.trials = trials;
    e.statistic = statistic;
    out.push_back(e);
  }
  return out;
}

SubmartingaleReport submartingale_check(const EnsembleConfig& config, int n, double theta,
                                        SubmartingaleFn f, std::uint64_t trials, int threads) {
  if (!config.is_independent_series())
    throw std::invalid_argument(
        "submartingale check requires an independent mean-zero series ensemble; ensemble kind '" +
        config.kind_name() + "' was rejected");
  if (n < 1 || n > config.max_length())
    throw std::invalid_argument("n outside the configured ensemble length");
  if (trials < 2) throw std::invalid_argument("need at least 2 trials");
  double (*scalar)(double) = f == SubmartingaleFn::Phi ? &phi : &varphi;

  auto chunks = run_chunked<MomentChunk>(trials, threads, [&](std::uint64_t begin,
                                                              std::uint64_t end) {
    MomentChunk chunk;
    chunk.sum.assign(static_cast<std::size_t>(2) * n, 0.0);
    chunk.sum_sq.assign(static_cast<std::size_t>(2) * n, 0.0);
    for (std::uint64_t p = begin; p < end; ++p) {
      const std::vector<SymMatrix> path = sample_path(config, p, n);
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(config.dim(), config.dim());
      double prev = 0.0;  // tr f(0) = 0
      for (int i = 0; i < n; ++i) {
        s += path[i].mat();
        const double val = trace_spectral_sum(theta * s, scalar);
        const double diff = val - prev;
        chunk.sum[i] += val;
        chunk.sum_sq[i] += val * val;
        chunk.sum[n + i] += diff;
        chunk.sum_sq[n + i] += diff * diff;
        prev = val;
      }
      ++chunk.n;
    }
    return chunk;
  });

  const std::vector<StepStat> all = finalize_moments(chunks, 2 * n);
  SubmartingaleReport report;
  report.level.assign(all.begin(), all.begin() + n);
  report.diff.assign(all.begin() + n, all.end());
  report.pass = true;
  for (const StepStat& d : report.diff)
    if (d.mean < -4.0 * d.std_err) report.pass = false;
  return report;
}

DriftReport supermartingale_check(const EnsembleConfig& config, VProcessKind v_kind,
                                  const PsiFn& psi, double theta, std::uint64_t trials, int n,
                                  int threads) {
  if (!valid_supermartingale_pairing(v_kind, psi)) {
    throw std::invalid_argument(
        "no supermartingale construction pairs v-process '" + to_string(v_kind) +
        "' with " + psi.name() +
        "; catalog: bracket/selfnorm1/selfnorm2/hoeffding with psi_normal, cubic with "
        "psi_gamma(c=1/6), bennett with psi_poisson, bernstein with psi_gamma");
  }
  if (v_kind == VProcessKind::Bracket && !config.is_conditionally_symmetric())
    throw std::invalid_argument(
        "bracket variance needs conditionally symmetric increments; ensemble kind '" +
        config.kind_name() + "' is not");
  const bool needs_bounded = v_kind == VProcessKind::HoeffdingSum ||
                             v_kind == VProcessKind::BennettPredictable ||
                             v_kind == VProcessKind::BernsteinDeclared;
  if (needs_bounded && std::holds_alternative<GaussianSeries>(config.payload()))
    throw std::invalid_argument("v-process '" + to_string(v_kind) +
                                "' needs almost-surely dominated increments; the Gaussian series "
                                "is unbounded");
  if (n < 1 || n > config.max_length())
    throw std::invalid_argument("n outside the configured ensemble length");
  if (trials < 2) throw std::invalid_argument("need at least 2 trials");
  const double psi_theta = psi(theta);  // domain check up front

  auto chunks = run_chunked<MomentChunk>(trials, threads, [&](std::uint64_t begin,
                                                              std::uint64_t end) {
    MomentChunk chunk;
    chunk.sum.assign(n, 0.0);
    chunk.sum_sq.assign(n, 0.0);
    for (std::uint64_t p = begin; p < end; ++p) {
      const std::vector<SymMatrix> path = sample_path(config, p, n);
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(config.dim(), config.dim());
      VProcess vp(v_kind, config.dim());
      double prev = static_cast<double>(config.dim());  // R_0 = tr exp(0) = d
      for (int t = 0; t < n; ++t) {
        vp.step(path[t],
                conditional_moments_for(
                    config, std::span<const SymMatrix>(path.data(), static_cast<std::size_t>(t)),
                    v_kind));
        s += path[t].mat();
        const double r_t = tr_exp(theta * s - psi_theta * vp.value().mat());
        const double drift = r_t - prev;
        chunk.sum[t] += drift;
        chunk.sum_sq[t] += drift * drift;
        prev = r_t;
      }
      ++chunk.n;
    }
    return chunk;
  });

  DriftReport report;
  report.drift = finalize_moments(chunks, n);
  report.pass = true;
  for (const StepStat& d : report.drift)
    if (d.mean > 4.0 * d.std_err) report.pass = false;
  return report;
}

CoverageReport coverage_check(const EnsembleConfig& config, int n, double delta,
                              std::uint64_t trials, int threads) {
  const TheoreticalParams params = theoretical_params(config, n);
  if (!params.c_bound)
    throw std::invalid_argument("coverage check needs a bounded ensemble (known c); kind '" +
                                config.kind_name() + "' has none");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const double radius = confidence_radius(n, std::sqrt(params.sigma_sq), *params.c_bound,
                                          params.trace_v, delta, SigmaScaling::PerMean)
                            .radius;

  auto chunks = run_chunked<CountChunk>(trials, threads, [&](std::uint64_t begin,
                                                             std::uint64_t end) {
    CountChunk chunk;
    chunk.counts.assign(1, 0);
    for (std::uint64_t p = begin; p < end; ++p) {
      const std::vector<SymMatrix> path = sample_path(config, p, n);
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(config.dim(), config.dim());
      for (const SymMatrix& x : path) s += x.mat();
      if (stat_of(s / static_cast<double>(n), /*opnorm=*/true) <= radius) ++chunk.counts[0];
    }
    return chunk;
  });

  std::uint64_t covered = 0;
  for (const CountChunk& c : chunks) covered += c.counts[0];

  CoverageReport report;
  report.radius = radius;
  report.trials = trials;
  report.coverage = static_cast<double>(covered) / static_cast<double>(trials);
  report.required =
      1.0 - delta - 4.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
  report.pass = report.coverage >= report.required;
  return report;
}

}  // namespace opconc
