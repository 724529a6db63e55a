#ifndef SPHEREPROX_RNG_HPP
#define SPHEREPROX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace sphereprox {

// Deterministic sampling. The engine is std::mt19937_64, whose output is
// pinned by the standard; doubles and normals are derived by hand so that
// results do not depend on libstdc++'s distribution internals. Check suites
// and tests rely on bit-identical streams for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via Box-Muller. The second value of each pair is
  // discarded; state stays a pure function of the draw count this way.
  double normal() {
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd gaussian(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sphereprox

#endif
