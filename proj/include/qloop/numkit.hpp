#pragma once
#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace qloop {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Largest dense operator we are willing to build (entries). 3^12 squared would
// be far beyond memory; the cap is on total entries.
inline constexpr std::size_t kMaxEntries = std::size_t{1} << 26;

void check_capacity(std::ptrdiff_t rows, std::ptrdiff_t cols);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron_all(const std::vector<CMatrix>& ms);

// Swap operator on C^d (x) C^d.
CMatrix permutation(int d);

struct NullspaceResult {
  std::vector<CVector> basis;  // orthonormal
  Eigen::VectorXd singular;    // descending
};

// Right nullspace by SVD; singular values below tol * s_max count as zero.
NullspaceResult nullspace_detail(const CMatrix& m, double tol = 1e-10);
std::vector<CVector> nullspace(const CMatrix& m, double tol = 1e-10);

// Least-squares c minimising ||a - c b||_F.
cplx best_scale(const CMatrix& a, const CMatrix& b);
// max|a - c b| with c = best_scale(a, b).
double residual(const CMatrix& a, const CMatrix& b);
double residual_unscaled(const CMatrix& a, const CMatrix& b);
double max_abs(const CMatrix& a);
bool all_finite(const CMatrix& a);

// Solve the homogeneous system X*A_k - B_k*X = 0 for all k (X is rows x cols).
// Column-major vectorisation: vec(X A) = (A^T (x) I) vec(X).
CMatrix sylvester_rows(const CMatrix& a, const CMatrix& b);
CMatrix unvec(const CVector& v, int rows, int cols);

// Principal-branch complex power z^p for real p.
cplx cpow(cplx z, double p);

}  // namespace qloop
