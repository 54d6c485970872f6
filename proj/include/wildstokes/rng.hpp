#pragma once

// rng.hpp
// Seeded, stdlib-independent random streams. Distribution code is hand-rolled
// (Box-Muller on top of mt19937_64) so that identical seeds give identical
// streams on every standard library.

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "wildstokes/common.hpp"

namespace wildstokes {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  /// Derive an independent stream (used by parallelizable sample checks).
  Rng fork(std::uint64_t stream) const { return Rng(seed_mix(seed_, stream)); }

  double uniform() {
    // 53-bit mantissa uniform in [0,1)
    return (gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uint64() { return gen_(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex complex_gaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

  Eigen::MatrixXcd complex_gaussian_matrix(int n) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = complex_gaussian();
    return m;
  }

  /// Haar-ish random unitary: QR of a complex Gaussian matrix with the
  /// R-diagonal phases folded into Q.
  Eigen::MatrixXcd random_unitary(int n) {
    Eigen::MatrixXcd g = complex_gaussian_matrix(n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
      Complex d = r(j, j);
      double a = std::abs(d);
      Complex phase = (a > 0) ? d / a : Complex(1, 0);
      q.col(j) *= phase;
    }
    return q;
  }

private:
  static std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  std::uint64_t seed_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace wildstokes
