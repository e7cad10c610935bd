#pragma once
#include <vector>

#include "qloop/numkit.hpp"

namespace qloop {

// Dense tensor with labelled legs; data is row-major over `legs`.
struct Tensor {
  std::vector<int> legs;
  std::vector<int> dims;
  std::vector<cplx> data;

  std::size_t size() const { return data.size(); }
  static Tensor scalar(cplx v);
  // Matrix m(out, in) as a tensor with legs {out_leg, in_leg}.
  static Tensor from_matrix(const CMatrix& m, int out_leg, int in_leg);
  static Tensor from_vector(const CVector& v, int leg);
};

// Reorder legs; `order` lists the current leg labels in the desired order.
Tensor permute(const Tensor& t, const std::vector<int>& order);
// Contract every leg shared by a and b.
Tensor contract_pair(const Tensor& a, const Tensor& b);

// Contract a closed network (each leg label appears exactly twice) to a scalar.
// Greedy order: repeatedly merge the pair with the smallest result.
cplx contract_network(std::vector<Tensor> ts, std::size_t max_entries = kMaxEntries);

}  // namespace qloop
