#include "opconc/verify.hpp"

#include <cmath>
#include <random>

#include "opconc/numeric_policy.hpp"
#include "opconc/psi.hpp"
#include "opconc/sym_matrix.hpp"

namespace opconc {

namespace {

const double kLeftConst = (std::exp(1.0) - 1.0) / std::exp(1.0);  // (e-1)/e

// lhs <= rhs up to a few ulps. Several suite inequalities attain equality at
// isolated points (u = 1 for the (e-1)/e bounds) or carry margins below
// double resolution (e^{-u}/2 for the cosh bound at large u), so the
// comparison needs ulp-level slack to be meaningful in floating point.
bool leq_ulp(double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return lhs <= rhs + 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

struct Checker {
  SuiteResult result;
  explicit Checker(std::string name) {
    result.name = std::move(name);
    result.pass = true;
    result.points_checked = 0;
  }
  void expect(bool ok, double where, double lhs, double rhs, const char* what) {
    ++result.points_checked;
    if (!ok && result.pass) {
      result.pass = false;
      result.first_violation = SuiteViolation{where, lhs, rhs, what};
    }
  }
};

}  // namespace

SuiteResult suite_phi_bounds(long points, double phi_bias) {
  Checker check("phi_bounds");
  const auto at = [&](double u) {
    const double phi_u = phi(u) + phi_bias;
    const double eu = std::exp(u);
    check.expect(leq_ulp(kLeftConst * eu, phi_u + 1.0), u, kLeftConst * eu, phi_u + 1.0,
                 "((e-1)/e) e^u <= phi(u)+1");
    check.expect(leq_ulp(eu / 2.0, varphi(u) + 1.0), u, eu / 2.0, varphi(u) + 1.0,
                 "e^u/2 <= varphi(u)+1");
    if (u >= 0.0) {
      const bool strict_ok = u == 0.0 ? phi_u + 1.0 == eu : phi_u + 1.0 < eu;
      check.expect(strict_ok, u, phi_u + 1.0, eu, "phi(u)+1 <= e^u (strict for u > 0)");
    }
  };
  at(0.0);  // the equality point of the right bound; anchored exactly
  for (long i = 0; i < points; ++i)
    at(-30.0 + 60.0 * static_cast<double>(i) / static_cast<double>(points - 1));
  return check.result;
}

SuiteResult suite_g_bounds(long points) {
  Checker check("g_bounds");
  for (long i = 0; i < points; ++i) {
    const double u = -30.0 + 60.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    const double g = g_fn(u);
    const double eu = std::exp(u);
    check.expect(leq_ulp(kLeftConst * eu, g + 1.0), u, kLeftConst * eu, g + 1.0,
                 "((e-1)/e) e^u <= g(u)+1");
    check.expect(leq_ulp(g + 1.0, eu + 1.0), u, g + 1.0, eu + 1.0, "g(u)+1 <= e^u+1");
    check.expect(0.0 <= g, u, 0.0, g, "0 <= g(u)");
    check.expect(leq_ulp(g, phi(u)), u, g, phi(u), "g(u) <= phi(u)");
  }
  return check.result;
}

SuiteResult suite_h_lower_bound(long points) {
  Checker check("h_lower_bound");
  for (long i = 0; i < points; ++i) {
    const double u = 100.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    const double lower = u * u / (2.0 * (1.0 + u / 3.0));
    check.expect(leq_ulp(lower, h_fn(u)), u, h_fn(u), lower, "h(u) >= u^2/(2(1+u/3))");
  }
  return check.result;
}

SuiteResult suite_trace_exp_inequality(int matrices, int max_dim, int scales, std::uint64_t seed) {
  Checker check("trace_exp_inequality");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(1, max_dim);
  std::uniform_real_distribution<double> ev_dist(0.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double slack = numeric_policy().invariant_slack;

  for (int k = 0; k < matrices; ++k) {
    const int d = dim_dist(rng);
    // Random PSD via a random orthogonal basis and nonnegative eigenvalues.
    Eigen::MatrixXd raw(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) raw(i, j) = gauss(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
    Eigen::VectorXd evs(d);
    for (int i = 0; i < d; ++i) evs[i] = ev_dist(rng);
    const Eigen::MatrixXd vm = q * evs.asDiagonal() * q.transpose();
    SymMatrix v(((vm + vm.transpose()) / 2.0).eval());
    const double norm = op_norm(v);
    if (norm == 0.0) continue;
    const double tr_ratio = trace(v) / norm;

    for (int si = 0; si < scales; ++si) {
      const double s = 3.0 / norm * static_cast<double>(si) / (scales - 1);
      const SymMatrix exp_sv = apply_spectral_fn(v * s, [](double x) { return std::exp(x); });
      const double lhs = trace(exp_sv) - d;
      const double rhs = std::expm1(s * norm) * tr_ratio;
      check.expect(lhs <= rhs * (1.0 + slack) + slack, static_cast<double>(k), lhs, rhs,
                   "tr[exp(sV) - I] <= (e^{s||V||} - 1) tr(V)/||V||");
    }
  }
  return check.result;
}

std::vector<SuiteResult> run_all_suites(double phi_bias) {
  return {suite_phi_bounds(10000, phi_bias), suite_g_bounds(), suite_h_lower_bound(),
          suite_trace_exp_inequality()};
}

}  // namespace opconc
