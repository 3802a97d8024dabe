#include "opconc/ensembles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <numbers>

#include <doctest.h>

using namespace opconc;

namespace {

EnsembleConfig constant_rademacher(const SymMatrix& a, int n, std::uint64_t seed) {
  return EnsembleConfig(RademacherSeries{std::vector<SymMatrix>(n, a)}, seed);
}

}  // namespace

TEST_CASE("rademacher paths stay on the +-A support") {
  const EnsembleConfig config = constant_rademacher(SymMatrix::identity(2), 3, 7);
  bool saw_plus = false, saw_minus = false;
  for (std::uint64_t p = 0; p < 32; ++p) {
    for (const SymMatrix& x : sample_path(config, p, 3)) {
      const double sign = x(0, 0);
      CHECK(std::abs(std::abs(sign) - 1.0) < 1e-15);
      CHECK((x.mat() - sign * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
      (sign > 0 ? saw_plus : saw_minus) = true;
    }
  }
  CHECK(saw_plus);
  CHECK(saw_minus);
}

TEST_CASE("paths are bit-identical for identical (seed_root, path_index)") {
  const SymMatrix a = SymMatrix::from_rows({{1.0, 0.3}, {0.3, 0.5}});
  for (std::uint64_t seed : {1ULL, 999ULL}) {
    const EnsembleConfig gau(GaussianSeries{std::vector<SymMatrix>(6, a)}, seed);
    const auto p1 = sample_path(gau, 42, 6);
    const auto p2 = sample_path(gau, 42, 6);
    for (int t = 0; t < 6; ++t)
      CHECK((p1[t].mat() - p2[t].mat()).cwiseAbs().maxCoeff() == 0.0);
  }
  // distinct paths differ
  const EnsembleConfig gau(GaussianSeries{std::vector<SymMatrix>(6, a)}, 5);
  CHECK((sample_path(gau, 0, 1)[0].mat() - sample_path(gau, 1, 1)[0].mat())
            .cwiseAbs()
            .maxCoeff() > 0.0);
}

TEST_CASE("gaussian sample mean vanishes at the CLT rate") {
  const SymMatrix a = SymMatrix::from_rows({{1.0, 0.5}, {0.5, 2.0}});
  const EnsembleConfig config(GaussianSeries{{a}}, 2024);
  const int trials = 100000;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
  for (int p = 0; p < trials; ++p) sum += sample_path(config, p, 1)[0].mat();
  const Eigen::MatrixXd mean = sum / trials;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double sd = std::abs(a(i, j));  // entry of gamma*A has sd |A_ij|
      CHECK(std::abs(mean(i, j)) <= 4.0 * sd / std::sqrt(trials) + 1e-12);
    }
}

TEST_CASE("gaussian normals have unit variance (counter rng sanity)") {
  const EnsembleConfig config(GaussianSeries{{SymMatrix::identity(1)}}, 31337);
  const int trials = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int p = 0; p < trials; ++p) {
    const double g = sample_path(config, p, 1)[0](0, 0);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / trials;
  const double var = sum_sq / trials - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(trials));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cond-sym martingale with zero drive reduces exactly to the constant series") {
  const SymMatrix a = SymMatrix::from_rows({{0.8, 0.2}, {0.2, 0.6}});
  const EnsembleConfig mart(CondSymMartingale{a, 0.0, 5}, 77);
  const EnsembleConfig rad = constant_rademacher(a, 5, 77);
  for (std::uint64_t p = 0; p < 16; ++p) {
    const auto pm = sample_path(mart, p, 5);
    const auto pr = sample_path(rad, p, 5);
    for (int t = 0; t < 5; ++t)
      CHECK((pm[t].mat() - pr[t].mat()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("cond-sym increments are bounded by ||base|| + drive") {
  const SymMatrix a = SymMatrix::from_rows({{0.8, 0.2}, {0.2, 0.6}});
  const double drive = 0.7;
  const EnsembleConfig mart(CondSymMartingale{a, drive, 12}, 5150);
  const double cap = op_norm(a) + drive;
  for (std::uint64_t p = 0; p < 64; ++p)
    for (const SymMatrix& x : sample_path(mart, p, 12)) CHECK(op_norm(x) <= cap + 1e-12);
}

TEST_CASE("rademacher theoretical params") {
  const EnsembleConfig config = constant_rademacher(SymMatrix::identity(2), 10, 1);
  const TheoreticalParams params = theoretical_params(config, 10);
  CHECK(params.sigma_sq == doctest::Approx(10.0));
  CHECK(params.trace_v == doctest::Approx(20.0));
  CHECK(params.d_prime == doctest::Approx(2.0));
  REQUIRE(params.c_bound.has_value());
  CHECK(*params.c_bound == doctest::Approx(1.0));
  CHECK((params.v_n.mat() - 10.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("gaussian theoretical params share the series variance and claim psi_normal") {
  const SymMatrix a = SymMatrix::from_rows({{1.0, 0.25}, {0.25, 0.75}});
  const EnsembleConfig rad(RademacherSeries{std::vector<SymMatrix>(4, a)}, 3);
  const EnsembleConfig gau(GaussianSeries{std::vector<SymMatrix>(4, a)}, 3);
  const TheoreticalParams pr = theoretical_params(rad, 4);
  const TheoreticalParams pg = theoretical_params(gau, 4);
  CHECK((pr.v_n.mat() - pg.v_n.mat()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_FALSE(pg.c_bound.has_value());
  bool has_normal = false;
  for (const PsiFn& psi : pg.psi_valid) has_normal |= psi.kind() == PsiKind::Normal;
  CHECK(has_normal);
}

TEST_CASE("rademacher samplewise hoeffding domination holds with equality") {
  const SymMatrix a = SymMatrix::from_rows({{1.0, -0.4}, {-0.4, 0.3}});
  const EnsembleConfig config = constant_rademacher(a, 4, 11);
  for (std::uint64_t p = 0; p < 16; ++p)
    for (const SymMatrix& x : sample_path(config, p, 4)) {
      CHECK(loewner_leq(x.square(), a.square(), 1e-12));
      CHECK((x.square().mat() - a.square().mat()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("bounded covariance: clip honored samplewise, moments near the analytic law") {
  const SymMatrix pop = SymMatrix::diagonal({1.0, 0.1, 0.1});
  const double clip = 30.0;  // generous: rejection is rare, bias negligible
  const EnsembleConfig config(BoundedCovariance{pop, clip, 1}, 99);

  const int trials = 100000;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd mean_sq = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd mean_sq_var = Eigen::MatrixXd::Zero(3, 3);
  for (int p = 0; p < trials; ++p) {
    const SymMatrix x = sample_path(config, p, 1)[0];
    CHECK(op_norm(x) <= clip + 1e-12);
    mean += x.mat();
    const Eigen::MatrixXd sq = x.square().mat();
    mean_sq += sq;
    mean_sq_var += sq.cwiseProduct(sq);
  }
  mean /= trials;
  mean_sq /= trials;
  mean_sq_var = (mean_sq_var / trials - mean_sq.cwiseProduct(mean_sq)).cwiseMax(0.0);

  // E X ~ 0 (up to clip bias), E X^2 ~ pop^2 + tr(pop) pop
  const TheoreticalParams params = theoretical_params(config, 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(mean(i, j)) < 0.05);
      const double se = std::sqrt(mean_sq_var(i, j) / trials);
      CHECK(std::abs(mean_sq(i, j) - params.v_n(i, j)) <= 5.0 * se + 0.01);
    }
  CHECK(params.c_bound == clip);
}

TEST_CASE("conditional second moment") {
  const SymMatrix a = SymMatrix::from_rows({{1.0, 0.5}, {0.5, 2.0}});
  const EnsembleConfig rad = constant_rademacher(a, 3, 1);
  const std::vector<SymMatrix> empty;
  CHECK((conditional_second_moment(rad, empty).mat() - a.square().mat()).cwiseAbs().maxCoeff() <
        1e-14);

  // zero drive: the coefficient is the base itself
  const EnsembleConfig frozen(CondSymMartingale{a, 0.0, 4}, 1);
  CHECK((conditional_second_moment(frozen, empty).mat() - a.square().mat()).cwiseAbs().maxCoeff() <
        1e-14);

  // kappa > 0: E_{t-1} X_t^2 = C_t^2 exactly; the sample second moment over
  // sign draws equals it identically since (eps C)^2 = C^2.
  const EnsembleConfig mart(CondSymMartingale{a, 0.5, 4}, 1);
  const std::vector<SymMatrix> history = sample_path(mart, 9, 3);
  const SymMatrix expected = conditional_second_moment(mart, history);
  // replay one more step by hand
  SymMatrix s = SymMatrix::zero(2);
  for (const SymMatrix& x : history) s = s + x;
  const SymMatrix coeff =
      a + apply_spectral_fn(s, [](double v) { return std::tanh(v); }) * 0.5;
  CHECK((expected.mat() - coeff.square().mat()).cwiseAbs().maxCoeff() < 1e-12);

  const EnsembleConfig cov(BoundedCovariance{SymMatrix::identity(2), 10.0, 2}, 1);
  CHECK_THROWS_AS(conditional_second_moment(cov, empty), std::invalid_argument);
  CHECK_FALSE(cov.supports_conditioning());
}

TEST_CASE("negative-part and third conditional moments") {
  const SymMatrix a = SymMatrix::diagonal({2.0, -1.0});
  const EnsembleConfig rad = constant_rademacher(a, 2, 1);
  const std::vector<SymMatrix> empty;
  // sign symmetry: E min(0, X)^2 = A^2 / 2
  CHECK((conditional_negpart_second_moment(rad, empty).mat() - a.square().mat() * 0.5)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  // |eps A|^3 = |A|^3 spectrally: diag(8, 1)
  const SymMatrix third = conditional_abs_third_moment(rad, empty);
  CHECK(third(0, 0) == doctest::Approx(8.0));
  CHECK(third(1, 1) == doctest::Approx(1.0));

  // gaussian scaling: E|gamma|^3 = 2 sqrt(2/pi)
  const EnsembleConfig gau(GaussianSeries{{a}}, 1);
  const double scale = 2.0 * std::sqrt(2.0 / std::numbers::pi);
  CHECK(conditional_abs_third_moment(gau, empty)(0, 0) == doctest::Approx(8.0 * scale));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(EnsembleConfig(RademacherSeries{{}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(
      EnsembleConfig(RademacherSeries{{SymMatrix::identity(2), SymMatrix::identity(3)}}, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(EnsembleConfig(BoundedCovariance{SymMatrix::identity(2), -1.0, 3}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnsembleConfig(CondSymMartingale{SymMatrix::identity(2), -0.5, 3}, 1),
                  std::invalid_argument);

  const EnsembleConfig config = constant_rademacher(SymMatrix::identity(2), 3, 1);
  CHECK_THROWS_AS(sample_path(config, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_params(config, 0), std::invalid_argument);
}
