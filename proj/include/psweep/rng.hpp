#ifndef PSWEEP_RNG_HPP
#define PSWEEP_RNG_HPP

#include <cmath>
#include <random>

#include "psweep/fields.hpp"

namespace psweep {

//! Seeded generator with an explicit Box-Muller normal so draws depend
//! only on the engine, never on library-specific distribution internals.
class Rng {
 public:
  explicit Rng(unsigned long long seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return double(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

inline VectorField random_vector_field(const Grid& g, Rng& rng,
                                       double amplitude) {
  VectorField f(g);
  for (long n = 0; n < f.size(); ++n)
    for (int c = 0; c < 3; ++c) f[n][c] = amplitude * rng.normal();
  f.apply_mask();
  return f;
}

inline TensorField random_tensor_field(const Grid& g, Rng& rng,
                                       double amplitude) {
  TensorField f(g);
  for (long n = 0; n < f.size(); ++n)
    for (int c = 0; c < 6; ++c) f[n][c] = amplitude * rng.normal();
  return f;
}

}  // namespace psweep

#endif
