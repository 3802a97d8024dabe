#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace opconc {

/// Dense real symmetric matrix, the carrier of every operator in the library
/// (summands X_i, partial sums S_i, variance proxies V_n, ...). Values are
/// immutable after construction; every operation below is pure, so instances
/// can be shared across threads freely.
///
/// Construction symmetrizes (A + A^T)/2 when the asymmetry is within
/// numeric_policy().symmetry_tol * max(1, max|entry|) and rejects otherwise.
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::MatrixXd entries);

  static SymMatrix zero(int dim);
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const std::vector<double>& entries);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  SymMatrix operator-() const { return *this * -1.0; }

  /// A*A; symmetric for symmetric A.
  SymMatrix square() const;

  double max_abs_entry() const { return m_.cwiseAbs().maxCoeff(); }

 private:
  struct AlreadySymmetric {};
  SymMatrix(Eigen::MatrixXd entries, AlreadySymmetric);
  Eigen::MatrixXd m_;

  friend SymMatrix apply_spectral_fn(const SymMatrix&, const std::function<double(double)>&);
  friend SymMatrix sym_from_eigen_unchecked(Eigen::MatrixXd m);
};

inline SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

/// Eigendecomposition of a SymMatrix: eigenvalues sorted descending,
/// eigenvector column k paired with eigenvalue k. Contract:
///   ||Q L Q^T - A||_max <= reconstruction_tol * max(1, ||A||)
///   ||Q^T Q - I||_max  <= reconstruction_tol
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

Spectrum eigh(const SymMatrix& a);

/// Q f(L) Q^T via the eigendecomposition. Throws std::domain_error naming the
/// eigenvalue if f is non-finite there.
SymMatrix apply_spectral_fn(const SymMatrix& a, const std::function<double(double)>& f);

double trace(const SymMatrix& a);
double lambda_max(const SymMatrix& a);
double lambda_min(const SymMatrix& a);

/// max(|lambda_max|, |lambda_min|), the deviation metric everywhere below.
double op_norm(const SymMatrix& a);

/// tr(A)/||A|| for PSD nonzero A; always in [1, dim]. Throws on the zero
/// matrix (undefined ratio) and on indefinite input (psd_tol slack).
double intrinsic_dimension(const SymMatrix& a);

/// A <= B in the Loewner order: lambda_min(B - A) >= -tol.
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol);

}  // namespace opconc
