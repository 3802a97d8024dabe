#include "opconc/sym_matrix.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "opconc/numeric_policy.hpp"

namespace opconc {

namespace {

void check_finite(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw std::invalid_argument("matrix entries must be finite");
}

// Exact closed-form extreme eigenvalues for dim <= 2; keeps hot loops off the
// iterative solver without weakening the accuracy contract.
bool small_dim_extremes(const Eigen::MatrixXd& m, double& lo, double& hi) {
  if (m.rows() == 1) {
    lo = hi = m(0, 0);
    return true;
  }
  if (m.rows() == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double disc = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));
    lo = mean - disc;
    hi = mean + disc;
    return true;
  }
  return false;
}

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols())
    throw std::invalid_argument("SymMatrix requires a square matrix of dim >= 1");
  check_finite(m_);
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double tol = numeric_policy().symmetry_tol * scale;
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream msg;
    msg << "matrix is not symmetric: max |a_ij - a_ji| = " << asym << " exceeds tolerance " << tol;
    throw std::invalid_argument(msg.str());
  }
  m_ = ((m_ + m_.transpose()) / 2.0).eval();
}

SymMatrix::SymMatrix(Eigen::MatrixXd entries, AlreadySymmetric) : m_(std::move(entries)) {}

SymMatrix sym_from_eigen_unchecked(Eigen::MatrixXd m) {
  return SymMatrix(std::move(m), SymMatrix::AlreadySymmetric{});
}

SymMatrix SymMatrix::zero(int dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim), AlreadySymmetric{});
}

SymMatrix SymMatrix::identity(int dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim), AlreadySymmetric{});
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& entries) {
  const int d = static_cast<int>(entries.size());
  if (d < 1) throw std::invalid_argument("diagonal requires at least one entry");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = entries[i];
  check_finite(m);
  return SymMatrix(std::move(m), AlreadySymmetric{});
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int d = static_cast<int>(rows.size());
  if (d < 1) throw std::invalid_argument("from_rows requires at least one row");
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d)
      throw std::invalid_argument("from_rows requires a square row-major layout");
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("dimension mismatch in matrix sum");
  return SymMatrix(m_ + o.m_, AlreadySymmetric{});
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("dimension mismatch in matrix difference");
  return SymMatrix(m_ - o.m_, AlreadySymmetric{});
}

SymMatrix SymMatrix::operator*(double s) const {
  if (!std::isfinite(s)) throw std::invalid_argument("scale must be finite");
  return SymMatrix(m_ * s, AlreadySymmetric{});
}

SymMatrix SymMatrix::square() const {
  Eigen::MatrixXd sq = m_ * m_;
  // enforce exact symmetry against rounding in the product
  return SymMatrix(((sq + sq.transpose()) / 2.0).eval(), AlreadySymmetric{});
}

Spectrum eigh(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver failed to converge (dim " << a.dim()
        << ", max |entry| " << a.max_abs_entry() << ")";
    throw std::runtime_error(msg.str());
  }
  // Eigen returns ascending order; the library contract is descending.
  Spectrum s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return s;
}

SymMatrix apply_spectral_fn(const SymMatrix& a, const std::function<double(double)>& f) {
  const Spectrum s = eigh(a);
  Eigen::VectorXd mapped(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double v = f(s.eigenvalues[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "spectral function returned non-finite value at eigenvalue " << s.eigenvalues[i];
      throw std::domain_error(msg.str());
    }
    mapped[i] = v;
  }
  Eigen::MatrixXd out = s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.transpose();
  return sym_from_eigen_unchecked(((out + out.transpose()) / 2.0).eval());
}

double trace(const SymMatrix& a) { return a.mat().trace(); }

double lambda_max(const SymMatrix& a) {
  double lo, hi;
  if (small_dim_extremes(a.mat(), lo, hi)) return hi;
  return eigh(a).eigenvalues[0];
}

double lambda_min(const SymMatrix& a) {
  double lo, hi;
  if (small_dim_extremes(a.mat(), lo, hi)) return lo;
  return eigh(a).eigenvalues[a.dim() - 1];
}

double op_norm(const SymMatrix& a) {
  double lo, hi;
  if (small_dim_extremes(a.mat(), lo, hi)) return std::max(-lo, hi);
  const Spectrum s = eigh(a);
  return std::max(-s.eigenvalues[a.dim() - 1], s.eigenvalues[0]);
}

double intrinsic_dimension(const SymMatrix& a) {
  const Spectrum s = eigh(a);
  const double norm = std::max(-s.eigenvalues[a.dim() - 1], s.eigenvalues[0]);
  if (norm == 0.0) throw std::domain_error("intrinsic dimension of the zero matrix is undefined");
  if (s.eigenvalues[a.dim() - 1] < -numeric_policy().psd_tol * norm) {
    std::ostringstream msg;
    msg << "intrinsic dimension requires a positive semidefinite matrix; lambda_min = "
        << s.eigenvalues[a.dim() - 1];
    throw std::invalid_argument(msg.str());
  }
  return s.eigenvalues.sum() / norm;
}

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch in Loewner comparison");
  return lambda_min(b - a) >= -tol;
}

}  // namespace opconc
