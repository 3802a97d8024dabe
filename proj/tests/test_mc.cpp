#include "opconc/mc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "opconc/bounds.hpp"

using namespace opconc;

namespace {

EnsembleConfig constant_rademacher(const SymMatrix& a, int n, std::uint64_t seed) {
  return EnsembleConfig(RademacherSeries{std::vector<SymMatrix>(n, a)}, seed);
}

EnsembleConfig scalar_rademacher(int n, std::uint64_t seed) {
  return constant_rademacher(SymMatrix::identity(1), n, seed);
}

// Exact prefix-sup tails of the scalar +-1 walk, frozen from an independent
// full enumeration in Python.
constexpr double kScalarN10Tail[4] = {0.96875, 0.453125, 0.130859375, 0.0234375};  // r = 2,4,6,8

}  // namespace

TEST_CASE("binomial upper confidence bound") {
  // k = 0: upper solves (1-p)^n = alpha
  CHECK(binomial_upper_conf(0, 10) == doctest::Approx(1.0 - std::pow(1e-3, 0.1)).epsilon(1e-12));
  CHECK(binomial_upper_conf(10, 10) == 1.0);
  for (std::uint64_t k : {0ULL, 3ULL, 500ULL, 999ULL}) {
    const double upper = binomial_upper_conf(k, 1000);
    CHECK(upper >= static_cast<double>(k) / 1000.0);
    CHECK(upper <= 1.0);
  }
  CHECK_THROWS_AS(binomial_upper_conf(5, 4), std::invalid_argument);
  CHECK_THROWS_AS(binomial_upper_conf(0, 0), std::invalid_argument);
}

TEST_CASE("exact enumeration anchors") {
  // n = 1, A = I_2: ||+-I|| = 1 >= 0.5 always
  const std::vector<double> single =
      enumerate_exact(constant_rademacher(SymMatrix::identity(2), 1, 0), 1,
                      std::vector<double>{0.5}, TailStatisticKind::SupOpNorm);
  CHECK(single[0] == 1.0);

  // n = 2 scalar: sup(|e1|, |e1+e2|) >= 1.5 exactly when the signs agree
  const std::vector<double> two = enumerate_exact(
      scalar_rademacher(2, 0), 2, std::vector<double>{1.5}, TailStatisticKind::SupOpNorm);
  CHECK(two[0] == 0.5);

  // n = 10 scalar, full grid, frozen from the independent enumeration
  const std::vector<double> grid{2.0, 4.0, 6.0, 8.0};
  const std::vector<double> tails =
      enumerate_exact(scalar_rademacher(10, 0), 10, grid, TailStatisticKind::SupOpNorm);
  for (int i = 0; i < 4; ++i) CHECK(tails[i] == kScalarN10Tail[i]);
}

TEST_CASE("exact tails dominate nothing above the bounds: n = 10, A = I_2") {
  const EnsembleConfig config = constant_rademacher(SymMatrix::identity(2), 10, 0);
  const TheoreticalParams params = theoretical_params(config, 10);
  const VarianceProxy vp(params.trace_v, params.sigma_sq);
  const std::vector<double> grid{2.0, 4.0, 6.0, 8.0};
  const std::vector<double> tails =
      enumerate_exact(config, 10, grid, TailStatisticKind::SupOpNorm);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(tails[i] <= hoeffding_bound(vp, grid[i], Mode::OpNorm).raw);
}

TEST_CASE("enumeration caps refuse with a cost estimate") {
  CHECK_THROWS_WITH_AS(enumerate_exact(scalar_rademacher(23, 0), 23, std::vector<double>{1.0},
                                       TailStatisticKind::SupOpNorm),
                       doctest::Contains("sign patterns"), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_exact(constant_rademacher(SymMatrix::identity(2), 15, 0), 15,
                                  std::vector<double>{1.0}, TailStatisticKind::SupOpNorm),
                  std::invalid_argument);
  const EnsembleConfig gaussian(GaussianSeries{{SymMatrix::identity(2)}}, 0);
  CHECK_THROWS_AS(enumerate_exact(gaussian, 1, std::vector<double>{1.0},
                                  TailStatisticKind::SupOpNorm),
                  std::invalid_argument);
}

TEST_CASE("prefix supremum statistic is nondecreasing in n") {
  const EnsembleConfig config = scalar_rademacher(12, 0);
  const std::vector<double> grid{1.0, 2.0, 3.0, 5.0};
  const std::vector<double> shallow =
      enumerate_exact(config, 6, grid, TailStatisticKind::SupOpNorm);
  const std::vector<double> deep =
      enumerate_exact(config, 12, grid, TailStatisticKind::SupOpNorm);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(shallow[i] <= deep[i]);
}

TEST_CASE("max-eig enumeration differs from op-norm where signs matter") {
  const EnsembleConfig config = scalar_rademacher(4, 0);
  const std::vector<double> grid{2.0};
  const auto me = enumerate_exact(config, 4, grid, TailStatisticKind::SupMaxEig);
  const auto on = enumerate_exact(config, 4, grid, TailStatisticKind::SupOpNorm);
  CHECK(me[0] <= on[0]);
  CHECK(me[0] > 0.0);

  // exact one-sided tails of the scalar walk at n = 10, frozen from an
  // independent enumeration: 193/256, 281/512, 11/32, 29/128 at r = 1..4
  const std::vector<double> grid10{1.0, 2.0, 3.0, 4.0};
  const auto one_sided =
      enumerate_exact(scalar_rademacher(10, 0), 10, grid10, TailStatisticKind::SupMaxEig);
  CHECK(one_sided[0] == 193.0 / 256.0);
  CHECK(one_sided[1] == 281.0 / 512.0);
  CHECK(one_sided[2] == 11.0 / 32.0);
  CHECK(one_sided[3] == 29.0 / 128.0);
}

TEST_CASE("run_trials matches exact enumeration within 4 binomial sd") {
  const EnsembleConfig config = constant_rademacher(SymMatrix::identity(2), 10, 314);
  const std::vector<double> grid{2.0, 4.0, 6.0, 8.0};
  const std::vector<double> exact =
      enumerate_exact(config, 10, grid, TailStatisticKind::SupOpNorm);
  const std::uint64_t trials = 20000;
  const auto estimates = run_trials(config, 10, trials, grid,
                                    TailStatistic{TailStatisticKind::SupOpNorm}, 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double sd = std::sqrt(exact[i] * (1.0 - exact[i]) / static_cast<double>(trials));
    CHECK(std::abs(estimates[i].p_hat - exact[i]) <= 4.0 * sd);
    CHECK(estimates[i].p_hat <= estimates[i].upper_conf);
    CHECK(estimates[i].upper_conf <= 1.0);
  }
}

TEST_CASE("run_trials edge cases") {
  const EnsembleConfig config = scalar_rademacher(3, 0);
  const auto single = run_trials(config, 3, 1, std::vector<double>{0.5},
                                 TailStatistic{TailStatisticKind::SupOpNorm});
  CHECK((single[0].p_hat == 0.0 || single[0].p_hat == 1.0));

  const auto negative = run_trials(config, 3, 50, std::vector<double>{-1.0},
                                   TailStatistic{TailStatisticKind::SupOpNorm});
  CHECK(negative[0].p_hat == 1.0);  // the norm is nonnegative
}

TEST_CASE("run_trials is deterministic and thread-count invariant") {
  const SymMatrix a = SymMatrix::from_rows({{1.0, 0.3}, {0.3, 0.7}});
  const EnsembleConfig config(GaussianSeries{std::vector<SymMatrix>(8, a)}, 271828);
  const std::vector<double> grid{1.0, 3.0, 5.0};
  const auto one = run_trials(config, 8, 9001, grid, TailStatistic{TailStatisticKind::SupMaxEig}, 1);
  const auto four = run_trials(config, 8, 9001, grid, TailStatistic{TailStatisticKind::SupMaxEig}, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(one[i].p_hat == four[i].p_hat);
    CHECK(one[i].upper_conf == four[i].upper_conf);
  }
}

TEST_CASE("joint freedman statistic conditions on the v-process level") {
  const SymMatrix a = SymMatrix::from_rows({{0.6, 0.2}, {0.2, 0.5}});
  const EnsembleConfig config(CondSymMartingale{a, 0.4, 8}, 5);
  TailStatistic loose{TailStatisticKind::JointFreedman, 1e6, VProcessKind::Bracket};
  TailStatistic tight{TailStatisticKind::JointFreedman, 1e-6, VProcessKind::Bracket};
  const std::vector<double> grid{0.5};
  const auto all = run_trials(config, 8, 2000, grid, loose);
  const auto none = run_trials(config, 8, 2000, grid, tight);
  CHECK(none[0].p_hat == 0.0);  // conditioning event empty at a tiny sigma^2
  CHECK(all[0].p_hat > 0.0);
  // with an always-true conditioning level the joint statistic matches the
  // marginal lambda_max(S_n) >= r count
  std::uint64_t manual = 0;
  for (std::uint64_t p = 0; p < 2000; ++p) {
    SymMatrix s = SymMatrix::zero(2);
    for (const SymMatrix& x : sample_path(config, p, 8)) s = s + x;
    if (lambda_max(s) >= 0.5) ++manual;
  }
  CHECK(all[0].p_hat == doctest::Approx(manual / 2000.0));
}

TEST_CASE("joint-event estimates stay under the freedman bound") {
  // For a Rademacher series the bracket process is deterministic
  // (X_t^2 = A_t^2), so E V_n is exact and the conditioning event is always
  // satisfied at sigma_sq = ||sum A_i^2||.
  const SymMatrix a1 = SymMatrix::from_rows({{0.8, 0.2}, {0.2, 0.4}});
  const SymMatrix a2 = SymMatrix::from_rows({{0.3, -0.3}, {-0.3, 0.9}});
  std::vector<SymMatrix> coeffs;
  for (int i = 0; i < 10; ++i) coeffs.push_back(i % 2 ? a2 : a1);
  const EnsembleConfig config(RademacherSeries{coeffs}, 31415);

  SymMatrix v_n = SymMatrix::zero(2);
  for (const SymMatrix& a : coeffs) v_n = v_n + a.square();
  const Spectrum spec = eigh(v_n);
  const double sigma_sq = spec.eigenvalues[0];
  const std::vector<double> ev(spec.eigenvalues.data(),
                               spec.eigenvalues.data() + spec.eigenvalues.size());

  const std::vector<double> grid{3.0, 5.0, 7.0};
  const auto estimates =
      run_trials(config, 10, 20000, grid,
                 TailStatistic{TailStatisticKind::JointFreedman, sigma_sq,
                               VProcessKind::Bracket},
                 2);
  for (const TailEstimate& e : estimates) {
    const MartingaleBoundInput input{ev, sigma_sq, e.r, PsiFn::normal()};
    CHECK(e.upper_conf <= freedman_bound_grid_min(input).value);
  }
}

TEST_CASE("submartingale check: zero theta is exactly flat") {
  const EnsembleConfig config = scalar_rademacher(5, 0);
  const auto report = submartingale_check(config, 5, 0.0, SubmartingaleFn::Phi, 100);
  for (const StepStat& s : report.level) CHECK(s.mean == 0.0);
  CHECK(report.pass);
}

TEST_CASE("submartingale check matches the scalar cosh closed form") {
  const EnsembleConfig config = scalar_rademacher(8, 161803);
  const double theta = 1.0;
  const auto report =
      submartingale_check(config, 8, theta, SubmartingaleFn::Phi, 20000, 2);
  REQUIRE(report.pass);
  for (int i = 0; i < 8; ++i) {
    const double closed = std::pow(std::cosh(theta), i + 1) - 1.0;  // E tr phi(theta S_i)
    CHECK(std::abs(report.level[i].mean - closed) <= 4.0 * report.level[i].std_err);
  }
}

TEST_CASE("submartingale check passes for a gaussian series and rejects dependence") {
  const SymMatrix a = SymMatrix::from_rows({{0.7, 0.2}, {0.2, 0.4}});
  const EnsembleConfig gau(GaussianSeries{std::vector<SymMatrix>(6, a)}, 42);
  CHECK(submartingale_check(gau, 6, 0.5, SubmartingaleFn::Varphi, 20000, 2).pass);

  const EnsembleConfig mart(CondSymMartingale{a, 0.5, 6}, 42);
  CHECK_THROWS_AS(submartingale_check(mart, 6, 0.5, SubmartingaleFn::Phi, 100),
                  std::invalid_argument);
}

TEST_CASE("supermartingale check: zero theta gives identically zero drift") {
  const EnsembleConfig config = scalar_rademacher(4, 0);
  const auto report =
      supermartingale_check(config, VProcessKind::Bracket, PsiFn::normal(), 0.0, 100, 4);
  for (const StepStat& s : report.drift) CHECK(s.mean == 0.0);
  CHECK(report.pass);
}

TEST_CASE("supermartingale drift stays nonpositive for catalog pairings") {
  const SymMatrix a = SymMatrix::from_rows({{0.6, 0.15}, {0.15, 0.45}});
  const EnsembleConfig mart(CondSymMartingale{a, 0.4, 10}, 2718);
  CHECK(supermartingale_check(mart, VProcessKind::Bracket, PsiFn::normal(), 0.8, 20000, 10, 2)
            .pass);

  const EnsembleConfig rad(RademacherSeries{std::vector<SymMatrix>(10, a)}, 999);
  CHECK(supermartingale_check(rad, VProcessKind::HoeffdingSum, PsiFn::normal(), 0.8, 20000, 10, 2)
            .pass);
}

TEST_CASE("supermartingale check rejects bad pairings and ensembles") {
  const EnsembleConfig config = scalar_rademacher(4, 0);
  CHECK_THROWS_WITH_AS(
      supermartingale_check(config, VProcessKind::Bracket, PsiFn::poisson(1.0), 0.5, 100, 4),
      doctest::Contains("catalog"), std::invalid_argument);
  CHECK_THROWS_AS(
      supermartingale_check(config, VProcessKind::Predictable, PsiFn::normal(), 0.5, 100, 4),
      std::invalid_argument);

  const EnsembleConfig cov(BoundedCovariance{SymMatrix::identity(2), 20.0, 4}, 1);
  CHECK_THROWS_AS(
      supermartingale_check(cov, VProcessKind::Bracket, PsiFn::normal(), 0.5, 100, 4),
      std::invalid_argument);

  const EnsembleConfig gau(GaussianSeries{{SymMatrix::identity(2)}}, 1);
  CHECK_THROWS_AS(
      supermartingale_check(gau, VProcessKind::HoeffdingSum, PsiFn::normal(), 0.5, 100, 1),
      std::invalid_argument);
}

TEST_CASE("coverage check passes generously and rejects unbounded ensembles") {
  const EnsembleConfig config = constant_rademacher(SymMatrix::identity(2), 100, 777);
  const CoverageReport report = coverage_check(config, 100, 0.2, 2000, 2);
  CHECK(report.pass);
  CHECK(report.coverage >= report.required);
  CHECK(report.radius > 0.0);

  const EnsembleConfig gau(GaussianSeries{{SymMatrix::identity(2)}}, 1);
  CHECK_THROWS_AS(coverage_check(gau, 1, 0.2, 100), std::invalid_argument);
}

TEST_CASE("coverage edge regimes") {
  // tiny n, delta = 0.5: the radius exceeds the largest attainable deviation
  const EnsembleConfig tiny = constant_rademacher(SymMatrix::identity(2), 5, 3);
  const CoverageReport mid = coverage_check(tiny, 5, 0.5, 500);
  CHECK(mid.pass);
  CHECK(mid.coverage == 1.0);

  // delta near 1: the radius shrinks but the requirement turns vacuous
  const CoverageReport vacuous = coverage_check(tiny, 5, 0.999, 500);
  CHECK(vacuous.required <= 0.0);
  CHECK(vacuous.pass);
  CHECK(vacuous.radius < mid.radius);
}
