#include "opconc/compare.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <random>

#include <doctest.h>

#include "opconc/bounds.hpp"
#include "opconc/martingale.hpp"

using namespace opconc;

// Frozen reference values: independent 50-digit evaluation (mpmath).
namespace {
constexpr double kRatioOp14 = 0.14285714285714285714;   // 2/14
constexpr double kRatioMe7 = 0.22599667240990377491;    // (e/(e-1))/7
constexpr double kRatioMe4 = 0.3954941767173316061;     // (e/(e-1))/4
constexpr double kSharpAnchor = 0.12655813654954611395; // (e/(e-1))*2/25
}  // namespace

TEST_CASE("constants table") {
  const auto rows = constants_table();
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].quantity == "opnorm");
  CHECK(*rows[0].ours == 2.0);
  CHECK(*rows[0].minsker == 14.0);
  CHECK(*rows[0].tropp == 8.0);
  CHECK(*rows[0].ratio_vs_minsker == doctest::Approx(kRatioOp14).epsilon(1e-15));
  CHECK(*rows[0].ratio_vs_tropp == doctest::Approx(0.25).epsilon(1e-15));

  CHECK(rows[1].quantity == "maxeig");
  CHECK(*rows[1].ours == doctest::Approx(1.5819767068693264244).epsilon(1e-15));
  CHECK(*rows[1].ratio_vs_minsker == doctest::Approx(kRatioMe7).epsilon(1e-15));
  CHECK(*rows[1].ratio_vs_tropp == doctest::Approx(kRatioMe4).epsilon(1e-15));

  CHECK(rows[2].quantity == "martingale");
  CHECK_FALSE(rows[2].ours.has_value());  // prefactor function, not a scalar
  CHECK(*rows[2].minsker == 25.0);
}

TEST_CASE("intrinsic vs ambient gap curve") {
  SUBCASE("isotropic V gives ratio 1") {
    const int d = 6;
    const SymMatrix v = SymMatrix::identity(d) * 1.7;
    const std::vector<double> grid{0.0, 1.0, 2.0};
    const auto rows = intrinsic_vs_ambient(v, d, 1.7, grid);
    for (const GapRow& row : rows) {
      CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row.intrinsic == doctest::Approx(row.ambient).epsilon(1e-12));
    }
  }
  SUBCASE("spiked spectrum gives the tr/norm arithmetic") {
    const int d = 100;
    std::vector<double> evs(d, 1e-3);
    evs[0] = 1.0;
    const SymMatrix v = SymMatrix::diagonal(evs);
    const auto rows = intrinsic_vs_ambient(v, d, 1.0, std::vector<double>{2.0});
    CHECK(rows[0].ratio == doctest::Approx((1.0 + 0.099) / 100.0).epsilon(1e-12));
    CHECK(rows[0].intrinsic <= rows[0].ambient);
  }
  SUBCASE("ratio never exceeds 1") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ev(0.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
      const int d = 2 + static_cast<int>(rng() % 10);
      std::vector<double> evs(d);
      double top = 0.0;
      for (double& e : evs) top = std::max(top, e = ev(rng));
      if (top == 0.0) evs[0] = top = 1.0;
      const auto rows =
          intrinsic_vs_ambient(SymMatrix::diagonal(evs), d, top, std::vector<double>{1.0});
      CHECK(rows[0].ratio <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("emitted gap ratio equals the scalar constant ratio exactly") {
  // intrinsic and ambient share the exponential factor, so their quotient is
  // (tr V / sigma^2) / d at every radius
  const SymMatrix v = SymMatrix::diagonal({2.0, 1.0, 0.5});
  const auto rows = intrinsic_vs_ambient(v, 3, 2.0, std::vector<double>{0.5, 1.5, 4.0});
  const double expected = (3.5 / 2.0) / 3.0;
  for (const GapRow& row : rows)
    CHECK(row.intrinsic / row.ambient == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("martingale sharpening report anchor") {
  const std::vector<double> spec{1.0};
  const auto report =
      martingale_sharpening_report(spec, 1.0, 1.0, std::vector<double>{2.0});
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].valid);
  CHECK(report.rows[0].ratio == doctest::Approx(kSharpAnchor).epsilon(1e-12));
  CHECK(report.all_sharpened);
}

TEST_CASE("martingale sharpening flags sub-threshold rows without asserting them") {
  const std::vector<double> spec{1.0};
  const double threshold = minsker_validity_threshold(1.0, 1.0);
  const auto report = martingale_sharpening_report(
      spec, 1.0, 1.0, std::vector<double>{threshold / 2.0, threshold * 1.5});
  CHECK_FALSE(report.rows[0].valid);
  CHECK(report.rows[1].valid);
  CHECK(report.all_sharpened);

  CHECK_THROWS_AS(martingale_sharpening_report(spec, 1.0, 1.0,
                                               std::vector<double>{threshold / 4.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(martingale_sharpening_report(spec, 1.0, 1.0, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("sharpening property over random spectra at the tight conditioning level") {
  std::mt19937_64 rng(314159);
  std::uniform_real_distribution<double> ev_dist(0.0, 2.0);
  std::uniform_real_distribution<double> c_dist(0.1, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 20);
    std::vector<double> spec(d);
    double top = 0.0;
    for (double& ev : spec) top = std::max(top, ev = ev_dist(rng));
    if (top == 0.0) spec[0] = top = 1.0;
    const double c = c_dist(rng);
    const double lo = minsker_validity_threshold(top, c);
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k) grid.push_back(lo * (1.0 + 0.5 * k));
    const auto report = martingale_sharpening_report(spec, top, c, grid);
    CHECK(report.all_sharpened);
  }
}
