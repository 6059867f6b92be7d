#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace wbc {

// Stateless seed mixer (splitmix64 step). Used to derive independent
// per-trial / per-chunk streams from one master seed so that results do not
// depend on evaluation order or thread count.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic random source. Only the raw mt19937_64 stream (which the
// standard pins bit-exactly) is consumed; all distributions are derived here
// by hand so outputs are reproducible across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform on [0,1), 53-bit resolution.
  double unit() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(unit() * static_cast<double>(n)) % n;
  }

  // Draw from a finite distribution by CDF inversion.
  int categorical(std::span<const double> p) {
    double u = unit();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  }

  // Uniform point on the probability simplex (Dirichlet(1,...,1)):
  // normalized standard exponentials.
  void simplex(std::span<double> out) {
    double sum = 0.0;
    for (double& v : out) {
      double u = unit();
      if (u < 1e-300) u = 1e-300;
      v = -std::log(u);
      sum += v;
    }
    for (double& v : out) v /= sum;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace wbc
