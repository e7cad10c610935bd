#include "qloop/numkit.hpp"

#include <cmath>
#include <string>

#include "qloop/errors.hpp"

namespace qloop {

void check_capacity(std::ptrdiff_t rows, std::ptrdiff_t cols) {
  if (rows < 0 || cols < 0) throw ShapeMismatch("negative dimension");
  const auto entries = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (entries > kMaxEntries) {
    throw CapacityExceeded("matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                           " exceeds the dense cap");
  }
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  check_capacity(a.rows() * b.rows(), a.cols() * b.cols());
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix kron_all(const std::vector<CMatrix>& ms) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& m : ms) out = kron(out, m);
  return out;
}

CMatrix permutation(int d) {
  CMatrix p = CMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) p(b * d + a, a * d + b) = 1.0;
  return p;
}

NullspaceResult nullspace_detail(const CMatrix& m, double tol) {
  if (!(tol > 0)) throw DegenerateInput("tolerance must be positive");
  if (m.size() == 0 || max_abs(m) == 0.0) throw DegenerateInput("zero matrix has a full nullspace");
  // Pad to at least as many rows as columns so the full V is available.
  CMatrix a = m;
  if (a.rows() < a.cols()) {
    a.conservativeResize(m.cols(), Eigen::NoChange);
    a.bottomRows(m.cols() - m.rows()).setZero();
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  NullspaceResult out;
  out.singular = svd.singularValues();
  const double smax = out.singular(0);
  const CMatrix& v = svd.matrixV();
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double s = k < out.singular.size() ? out.singular(k) : 0.0;
    if (s <= tol * smax) out.basis.push_back(v.col(k));
  }
  return out;
}

std::vector<CVector> nullspace(const CMatrix& m, double tol) { return nullspace_detail(m, tol).basis; }

cplx best_scale(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("best_scale");
  const double bb = b.squaredNorm();
  if (bb == 0.0) return 0.0;
  // <b, a> / <b, b>
  return (b.conjugate().cwiseProduct(a)).sum() / bb;
}

double residual(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("residual");
  return max_abs(a - best_scale(a, b) * b);
}

double residual_unscaled(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("residual_unscaled");
  return max_abs(a - b);
}

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool all_finite(const CMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag())) return false;
  return true;
}

CMatrix sylvester_rows(const CMatrix& a, const CMatrix& b) {
  // X is (b.rows x a.rows); X a - b X = 0.
  const CMatrix ia = CMatrix::Identity(b.rows(), b.rows());
  const CMatrix ib = CMatrix::Identity(a.rows(), a.rows());
  return kron(a.transpose(), ia) - kron(ib, b);
}

CMatrix unvec(const CVector& v, int rows, int cols) {
  if (v.size() != rows * cols) throw ShapeMismatch("unvec");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

cplx cpow(cplx z, double p) {
  if (z == cplx(0.0)) throw DegenerateInput("power of zero");
  return std::exp(p * std::log(z));
}

}  // namespace qloop
