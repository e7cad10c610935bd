#pragma once
#include <cstdint>
#include <random>

#include "qloop/qalgebra.hpp"

namespace qloop {

// Seeded source of generic parameter points: moduli with |log| <= 0.3 and
// uniform phases, rejecting points where q^{2n} is within 1e-3 of 1 (n <= 8).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  cplx generic_unit();  // e^{u + i phi}, |u| <= 0.3
  cplx generic_q();
  cplx generic_log();   // log of a generic_unit point
  double uniform(double lo, double hi);
  // nu in the model's critical range (dense (0, 1/2), dilute (-1/2, 0)),
  // kept away from the endpoints and from half-integer multiples of 1/8.
  double nu(Model m);
  double alpha();  // (0.2, pi - 0.2)

 private:
  std::mt19937_64 rng_;
};

bool near_root_of_unity(cplx q, int nmax = 8, double tol = 1e-3);

}  // namespace qloop
