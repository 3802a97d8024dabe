#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "opconc/ensembles.hpp"
#include "opconc/martingale.hpp"
#include "opconc/psi.hpp"

namespace opconc {

/// Tail statistics the verification engine estimates:
///   SupMaxEig     sup_{i<=n} lambda_max(S_i)  >= r
///   SupOpNorm     sup_{i<=n} ||S_i||          >= r
///   JointFreedman lambda_max(S_n) >= r and lambda_max(V_n) <= sigma_sq,
///                 with V_n accumulated by the configured v-process.
enum class TailStatisticKind { SupMaxEig, SupOpNorm, JointFreedman };

struct TailStatistic {
  TailStatisticKind kind = TailStatisticKind::SupOpNorm;
  double sigma_sq = 0.0;                        // JointFreedman conditioning level
  VProcessKind v_kind = VProcessKind::Bracket;  // JointFreedman variance process
};

std::string to_string(TailStatisticKind kind);
TailStatisticKind tail_statistic_kind_from_string(const std::string& s);

struct TailEstimate {
  double r;
  double p_hat;
  double upper_conf;  // one-sided exact binomial upper bound, level 1e-3
  std::uint64_t trials;
  TailStatistic statistic;
};

/// Exact one-sided (Clopper-Pearson) binomial upper confidence bound:
/// the smallest p with P(Bin(trials, p) <= successes) <= alpha.
double binomial_upper_conf(std::uint64_t successes, std::uint64_t trials, double alpha = 1e-3);

/// Exact tail probabilities over all 2^n sign patterns of a Rademacher
/// series, one per grid radius. Gray-code sweep with incremental prefix
/// maxima. Caps: n <= 22 for scalar coefficients, n <= 14 for dim >= 2;
/// above the cap the call refuses with a cost estimate.
std::vector<double> enumerate_exact(const EnsembleConfig& config, int n,
                                    std::span<const double> r_grid, TailStatisticKind stat);

/// Monte Carlo tail estimates over independent paths. Trials run in fixed
/// chunks of path indices with orderless integer aggregation, so results are
/// identical for any worker count.
std::vector<TailEstimate> run_trials(const EnsembleConfig& config, int n, std::uint64_t trials,
                                     std::span<const double> r_grid, const TailStatistic& statistic,
                                     int threads = 1);

struct StepStat {
  double mean;
  double std_err;
};

/// Empirical check that E tr f(theta S_i) is nondecreasing in i for an
/// independent mean-zero series. Uses paired per-path increments; PASS when
/// no step's increment estimate falls below -4 standard errors.
enum class SubmartingaleFn { Phi, Varphi };

struct SubmartingaleReport {
  std::vector<StepStat> level;  // E tr f(theta S_i), i = 1..n
  std::vector<StepStat> diff;   // paired increments between consecutive steps
  bool pass;
};

SubmartingaleReport submartingale_check(const EnsembleConfig& config, int n, double theta,
                                        SubmartingaleFn f, std::uint64_t trials, int threads = 1);

/// Empirical drift of R_t = tr exp(theta S_t - psi(theta) V_t) for a catalog
/// (v-process, psi) pairing. PASS when every per-step drift estimate is at
/// most +4 standard errors.
struct DriftReport {
  std::vector<StepStat> drift;  // E[R_t - R_{t-1}], t = 1..n
  bool pass;
};

DriftReport supermartingale_check(const EnsembleConfig& config, VProcessKind v_kind,
                                  const PsiFn& psi, double theta, std::uint64_t trials, int n,
                                  int threads = 1);

/// Fraction of trials with ||S_n/n|| inside the confidence radius (sharp
/// per-mean scaling); PASS when coverage >= 1 - delta - 4 binomial sd.
struct CoverageReport {
  double radius;
  double coverage;
  double required;
  std::uint64_t trials;
  bool pass;
};

CoverageReport coverage_check(const EnsembleConfig& config, int n, double delta,
                              std::uint64_t trials, int threads = 1);

}  // namespace opconc
