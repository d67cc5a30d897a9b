#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gskin/types.h"

namespace gskin {

// Seeded RNG with hand-rolled uniform/normal transforms so that a given seed
// produces the same stream everywhere (std::normal_distribution is
// implementation-defined; the mt19937_64 bit stream is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one draw per call, cached pair discarded for simplicity.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1));
  }

  VecX normal_vector(Index n) {
    VecX v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  MatX normal_matrix(Index rows, Index cols) {
    MatX m(rows, cols);
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) m(r, c) = normal();
    return m;
  }

  // Fisher-Yates over [0, n).
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(0, i)]);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gskin
