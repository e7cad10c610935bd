#include "qloop/sampling.hpp"

namespace qloop {

bool near_root_of_unity(cplx q, int nmax, double tol) {
  for (int n = 1; n <= nmax; ++n)
    if (std::abs(std::pow(q, 2 * n) - 1.0) < tol) return true;
  return false;
}

double Sampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

cplx Sampler::generic_log() { return {uniform(-0.3, 0.3), uniform(-kPi, kPi)}; }

cplx Sampler::generic_unit() { return std::exp(generic_log()); }

cplx Sampler::generic_q() {
  for (;;) {
    const cplx q = generic_unit();
    if (!near_root_of_unity(q)) return q;
  }
}

double Sampler::nu(Model m) {
  for (;;) {
    const double v = m == Model::Dense ? uniform(0.05, 0.45) : uniform(-0.45, -0.05);
    const cplx q = m == Model::Dense ? dense_q(v) : dilute_q(v);
    if (!near_root_of_unity(q, 8, 2e-2)) return v;
  }
}

double Sampler::alpha() { return uniform(0.2, kPi - 0.2); }

}  // namespace qloop
