#include "qloop/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "qloop/errors.hpp"

namespace qloop {

Tensor Tensor::scalar(cplx v) { return Tensor{{}, {}, {v}}; }

Tensor Tensor::from_matrix(const CMatrix& m, int out_leg, int in_leg) {
  Tensor t{{out_leg, in_leg}, {static_cast<int>(m.rows()), static_cast<int>(m.cols())}, {}};
  t.data.resize(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.data[i * m.cols() + j] = m(i, j);
  return t;
}

Tensor Tensor::from_vector(const CVector& v, int leg) {
  return Tensor{{leg}, {static_cast<int>(v.size())}, std::vector<cplx>(v.data(), v.data() + v.size())};
}

Tensor permute(const Tensor& t, const std::vector<int>& order) {
  const std::size_t r = t.legs.size();
  if (order.size() != r) throw ShapeMismatch("permute: rank mismatch");
  std::vector<int> src(r);
  for (std::size_t k = 0; k < r; ++k) {
    auto it = std::find(t.legs.begin(), t.legs.end(), order[k]);
    if (it == t.legs.end()) throw ShapeMismatch("permute: unknown leg");
    src[k] = static_cast<int>(it - t.legs.begin());
  }
  std::vector<std::size_t> stride(r, 1);
  for (std::size_t k = r; k-- > 1;) stride[k - 1] = stride[k] * t.dims[k];
  Tensor out;
  out.legs = order;
  out.dims.resize(r);
  for (std::size_t k = 0; k < r; ++k) out.dims[k] = t.dims[src[k]];
  out.data.resize(t.data.size());
  std::vector<int> idx(r, 0);
  for (std::size_t n = 0; n < out.data.size(); ++n) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < r; ++k) off += idx[k] * stride[src[k]];
    out.data[n] = t.data[off];
    for (std::size_t k = r; k-- > 0;) {
      if (++idx[k] < out.dims[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

namespace {

struct Split {
  std::vector<int> free_a, free_b, shared;
  std::size_t rows = 1, cols = 1, inner = 1;
};

Split split(const Tensor& a, const Tensor& b) {
  Split s;
  for (std::size_t i = 0; i < a.legs.size(); ++i) {
    auto it = std::find(b.legs.begin(), b.legs.end(), a.legs[i]);
    if (it == b.legs.end()) {
      s.free_a.push_back(a.legs[i]);
      s.rows *= a.dims[i];
    } else {
      if (b.dims[it - b.legs.begin()] != a.dims[i]) throw ShapeMismatch("leg dimension mismatch");
      s.shared.push_back(a.legs[i]);
      s.inner *= a.dims[i];
    }
  }
  for (std::size_t j = 0; j < b.legs.size(); ++j)
    if (std::find(a.legs.begin(), a.legs.end(), b.legs[j]) == a.legs.end()) {
      s.free_b.push_back(b.legs[j]);
      s.cols *= b.dims[j];
    }
  return s;
}

int dim_of(const Tensor& t, int leg) {
  return t.dims[std::find(t.legs.begin(), t.legs.end(), leg) - t.legs.begin()];
}

}  // namespace

Tensor contract_pair(const Tensor& a, const Tensor& b) {
  const Split s = split(a, b);
  std::vector<int> oa = s.free_a, ob = s.shared;
  oa.insert(oa.end(), s.shared.begin(), s.shared.end());
  ob.insert(ob.end(), s.free_b.begin(), s.free_b.end());
  const Tensor pa = permute(a, oa), pb = permute(b, ob);
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> ma(pa.data.data(), s.rows, s.inner);
  Eigen::Map<const RowMat> mb(pb.data.data(), s.inner, s.cols);
  Tensor out;
  out.legs = s.free_a;
  out.legs.insert(out.legs.end(), s.free_b.begin(), s.free_b.end());
  for (int l : s.free_a) out.dims.push_back(dim_of(a, l));
  for (int l : s.free_b) out.dims.push_back(dim_of(b, l));
  out.data.resize(s.rows * s.cols);
  Eigen::Map<RowMat> mo(out.data.data(), s.rows, s.cols);
  mo.noalias() = ma * mb;
  return out;
}

cplx contract_network(std::vector<Tensor> ts, std::size_t max_entries) {
  if (ts.empty()) return 1.0;
  std::map<int, int> count;
  for (const auto& t : ts)
    for (int l : t.legs) ++count[l];
  for (const auto& [leg, c] : count)
    if (c != 2) throw ShapeMismatch("open or over-used leg " + std::to_string(leg));

  while (ts.size() > 1) {
    std::size_t bi = 0, bj = 1, best = SIZE_MAX;
    bool best_shares = false;
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        const Split s = split(ts[i], ts[j]);
        const bool shares = !s.shared.empty();
        const std::size_t cost = s.rows * s.cols;
        // Prefer pairs that share a leg; outer products only when forced.
        if ((shares && !best_shares) || (shares == best_shares && cost < best)) {
          best = cost;
          bi = i;
          bj = j;
          best_shares = shares;
        }
      }
    if (best > max_entries) throw CapacityExceeded("intermediate tensor of " + std::to_string(best) + " entries");
    Tensor merged = contract_pair(ts[bi], ts[bj]);
    ts.erase(ts.begin() + bj);
    ts[bi] = std::move(merged);
  }
  return ts[0].data.at(0);
}

}  // namespace qloop
