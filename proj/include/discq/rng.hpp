#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace discq {

// mt19937_64 with fixed output transforms so that streams are identical
// across standard libraries (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Marsaglia polar method.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::vector<double> unit_vector(std::size_t dim) {
    std::vector<double> v(dim);
    double n = 0;
    do {
      n = 0;
      for (auto& x : v) {
        x = gaussian();
        n += x * x;
      }
    } while (n == 0);
    n = std::sqrt(n);
    for (auto& x : v) x /= n;
    return v;
  }

  /// Uniform in the Euclidean ball of given radius.
  std::vector<double> ball_point(std::size_t dim, double radius) {
    std::vector<double> v = unit_vector(dim);
    double r = radius * std::pow(uniform01(), 1.0 / static_cast<double>(dim));
    for (auto& x : v) x *= r;
    return v;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace discq
