#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "opconc/martingale.hpp"
#include "opconc/psi.hpp"
#include "opconc/sym_matrix.hpp"

namespace opconc {

/// X_i = eps_i A_i with independent signs.
struct RademacherSeries {
  std::vector<SymMatrix> coeffs;
};

/// X_i = gamma_i A_i with independent standard normals.
struct GaussianSeries {
  std::vector<SymMatrix> coeffs;
};

/// X_i = v v^T - pop_cov for v ~ N(0, pop_cov), resampled until
/// ||v v^T - pop_cov|| <= clip. The rejection keeps ||X_i|| <= clip at the
/// cost of a small bias on E X_i, checked empirically rather than corrected.
struct BoundedCovariance {
  SymMatrix pop_cov;
  double clip;
  int n;
};

/// Conditionally symmetric martingale differences
/// X_t = eps_t (base + drive * tanh(S_{t-1})) with tanh applied spectrally,
/// so ||X_t|| <= ||base|| + drive almost surely. The sign is drawn after the
/// predictable coefficient. drive = 0 degenerates to a constant-coefficient
/// Rademacher series.
struct CondSymMartingale {
  SymMatrix base;
  double drive;
  int n;
};

/// Declarative random-matrix sequence with counter-based seeding: the draw
/// stream for step t of path p is a pure function of (seed_root, p, t), so
/// paths are reproducible, order-free, and parallel-safe.
class EnsembleConfig {
 public:
  using Payload = std::variant<RademacherSeries, GaussianSeries, BoundedCovariance, CondSymMartingale>;

  EnsembleConfig(Payload payload, std::uint64_t seed_root);

  const Payload& payload() const { return payload_; }
  std::uint64_t seed_root() const { return seed_root_; }
  int dim() const;
  int max_length() const;
  std::string kind_name() const;

  bool supports_conditioning() const;      // exact conditional moments available
  bool is_independent_series() const;      // Rademacher / Gaussian series
  bool is_conditionally_symmetric() const; // X_t ~ -X_t given the past

 private:
  Payload payload_;
  std::uint64_t seed_root_;
};

/// Analytic parameters of the sequence: V_n assembled exactly where a closed
/// form exists (see the per-kind notes in ensembles.cpp), sigma_sq = ||V_n||,
/// c_bound the almost-sure bound where one holds, and the psi families whose
/// log-MGF condition the ensemble provably satisfies.
struct TheoreticalParams {
  double sigma_sq;
  std::optional<double> c_bound;
  SymMatrix v_n;
  double trace_v;
  double d_prime;
  std::vector<PsiFn> psi_valid;
};

std::vector<SymMatrix> sample_path(const EnsembleConfig& config, std::uint64_t path_index, int n);

TheoreticalParams theoretical_params(const EnsembleConfig& config, int n);

/// E_{t-1} X_t^2 given X_1..X_{t-1}; exact, not estimated. Supported by the
/// series kinds and CondSymMartingale.
SymMatrix conditional_second_moment(const EnsembleConfig& config, std::span<const SymMatrix> history);

/// E_{t-1} min(0, X_t)^2 and E_{t-1} |X_t|^3, needed by the composite
/// V-processes; available in closed form for the sign-symmetric kinds.
SymMatrix conditional_negpart_second_moment(const EnsembleConfig& config,
                                            std::span<const SymMatrix> history);
SymMatrix conditional_abs_third_moment(const EnsembleConfig& config,
                                       std::span<const SymMatrix> history);

/// The moments a given V-process kind needs at step history.size()+1.
ConditionalMoments conditional_moments_for(const EnsembleConfig& config,
                                           std::span<const SymMatrix> history, VProcessKind kind);

}  // namespace opconc
