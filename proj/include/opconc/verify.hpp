#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace opconc {

/// Deterministic inequality suites: grid sweeps of the scalar bounds the tail
/// machinery rests on, plus the trace-exponential operator inequality on
/// random PSD matrices. These are theorems, so a failure means a broken
/// implementation (or an injected perturbation; see phi_bias below).
struct SuiteViolation {
  double where;  // grid point u, or matrix index for the operator suite
  double lhs;
  double rhs;
  std::string what;
};

struct SuiteResult {
  std::string name;
  bool pass;
  long points_checked;
  std::optional<SuiteViolation> first_violation;
};

/// exp-domination bounds for phi and cosh:
///   ((e-1)/e) e^u <= phi(u) + 1 on [-30, 30]
///   phi(u) + 1 <= e^u on [0, 30], strict except u = 0
///   e^u / 2 <= varphi(u) + 1 on [-30, 30]
/// phi_bias is a falsifiability hook: it is added to phi before checking, so
/// a nonzero value must produce a located failure.
SuiteResult suite_phi_bounds(long points = 10000, double phi_bias = 0.0);

/// ((e-1)/e) e^u <= g(u) + 1 <= e^u + 1 and 0 <= g(u) <= phi(u) on [-30, 30].
SuiteResult suite_g_bounds(long points = 10000);

/// h(u) >= u^2 / (2 (1 + u/3)) on [0, 100].
SuiteResult suite_h_lower_bound(long points = 10000);

/// tr[exp(sV) - I] <= (e^{s||V||} - 1) tr(V)/||V|| for random PSD V and
/// s >= 0, with relative slack from the numeric policy. The left side runs
/// through the matrix path (spectral exp), the right side is scalar.
SuiteResult suite_trace_exp_inequality(int matrices = 200, int max_dim = 50, int scales = 20,
                                       std::uint64_t seed = 20250810);

std::vector<SuiteResult> run_all_suites(double phi_bias = 0.0);

}  // namespace opconc
