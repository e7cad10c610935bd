#pragma once
#include <gtest/gtest.h>

#include "qloop/numkit.hpp"

namespace qloop::testing {

inline double diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

inline CMatrix diag(std::initializer_list<cplx> v) {
  CMatrix m = CMatrix::Zero(v.size(), v.size());
  int i = 0;
  for (cplx x : v) m(i, i) = x, ++i;
  return m;
}

}  // namespace qloop::testing

#define EXPECT_MAT_NEAR(a, b, tol) EXPECT_LT(::qloop::testing::diff((a), (b)), (tol))
