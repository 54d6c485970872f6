#pragma once

// springer.hpp
// Data model and verification of the multiplicative Grothendieck-Springer
// simultaneous resolution for GL_n: pairs (M, flag) with M preserving the
// flag, the torus-valued map reading the diagonal along the flag, the
// adjoint-quotient map to eigenvalue multisets, fiber enumeration at desk
// scale, and randomized commutativity checks of the resolution square.

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/liecore.hpp"
#include "wildstokes/rng.hpp"

namespace wildstokes::springer {

using liecore::ComplexMatrix;
using liecore::ComplexVector;

/// A point of the Grothendieck space: invertible M together with an M-stable
/// full flag, stored as an ordered basis (columns of `flag`).
struct GrothendieckPoint {
  ComplexMatrix m;
  ComplexMatrix flag;
};

constexpr double kFlagStabilityTol = 1e-10;

namespace detail {

inline ComplexMatrix flag_conjugate(const GrothendieckPoint& p) {
  return p.flag.partialPivLu().solve(p.m * p.flag); // flag^{-1} M flag
}

inline void require_valid(const GrothendieckPoint& p) {
  const int n = static_cast<int>(p.m.rows());
  if (p.flag.rows() != n || p.flag.cols() != n)
    throw malformed_input_error("flag basis has wrong dimension");
  ComplexMatrix t = flag_conjugate(p);
  double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(t(i, j)) > kFlagStabilityTol * scale) {
        std::ostringstream msg;
        msg << "flag is not M-stable: strictly lower entry of size " << std::abs(t(i, j));
        throw malformed_input_error(msg.str());
      }
}

} // namespace detail

/// Projection onto the group factor.
inline ComplexMatrix pi(const GrothendieckPoint& p) {
  detail::require_valid(p);
  return p.m;
}

/// The map to the torus: eigenvalues of M read in flag order (the diagonal of
/// M in the flag-adapted basis).
inline ComplexVector tilde_psi(const GrothendieckPoint& p) {
  detail::require_valid(p);
  return detail::flag_conjugate(p).diagonal();
}

/// Adjoint quotient: the eigenvalue multiset of the semisimple part, i.e. the
/// eigenvalues of M with multiplicity, lexicographically sorted.
inline std::vector<Complex> psi(const ComplexMatrix& m) {
  double det = std::abs(m.determinant());
  if (!(det > 0) || !std::isfinite(det))
    throw degenerate_input_error("psi: matrix must be invertible");
  return liecore::sorted_eigenvalues(m);
}

// ---------------------------------------------------------------------------
// Fiber enumeration
// ---------------------------------------------------------------------------

struct Fiber {
  std::vector<GrothendieckPoint> flags; // enumerated M-stable full flags
  bool enumerable = true;
  int witness_dimension = 0; // eigenspace dimension blocking enumeration
};

namespace detail {

struct EigenCluster {
  Complex value;
  ComplexMatrix eigenvectors; // basis of ker(M - value), columns
};

inline std::vector<EigenCluster> cluster_eigenspaces(const ComplexMatrix& m, double tol) {
  const int n = static_cast<int>(m.rows());
  std::vector<Complex> ev = liecore::sorted_eigenvalues(m);
  std::vector<EigenCluster> clusters;
  std::vector<Complex> values;
  for (const Complex& v : ev) {
    bool merged = false;
    for (Complex& existing : values)
      if (std::abs(existing - v) < tol) {
        merged = true;
        break;
      }
    if (!merged) values.push_back(v);
  }
  for (const Complex& v : values) {
    ComplexMatrix shifted = m - v * ComplexMatrix::Identity(n, n);
    Eigen::FullPivLU<ComplexMatrix> lu(shifted);
    lu.setThreshold(tol);
    int k = static_cast<int>(lu.dimensionOfKernel());
    if (k <= 0) continue;
    ComplexMatrix kernel = lu.kernel();
    for (int c = 0; c < kernel.cols(); ++c) kernel.col(c).normalize();
    clusters.push_back({v, kernel});
  }
  return clusters;
}

/// Recursive invariant-line enumeration of full stable flags. Appends to
/// `out` the flags of `m` expressed in the ambient basis `frame` (columns of
/// `frame` span the current quotient space inside the original C^n).
inline bool enumerate_flags(const ComplexMatrix& m, const ComplexMatrix& frame,
                            std::vector<ComplexVector>& prefix,
                            std::vector<std::vector<ComplexVector>>& out, double tol,
                            int* witness) {
  const int k = static_cast<int>(m.rows());
  if (k == 0) {
    out.push_back(prefix);
    return true;
  }
  std::vector<EigenCluster> clusters = cluster_eigenspaces(m, tol);
  for (const auto& cluster : clusters) {
    if (cluster.eigenvectors.cols() > 1) {
      *witness = static_cast<int>(cluster.eigenvectors.cols());
      return false; // a projective family of invariant lines
    }
    ComplexVector line = cluster.eigenvectors.col(0);

    // quotient by the line: extend to a basis, induce m on the complement
    ComplexMatrix basis(k, k);
    basis.col(0) = line;
    int col = 1;
    int pivot;
    line.cwiseAbs().maxCoeff(&pivot);
    for (int j = 0; j < k; ++j)
      if (j != pivot) basis.col(col++) = ComplexMatrix::Identity(k, k).col(j);
    Eigen::PartialPivLU<ComplexMatrix> lu(basis);
    ComplexMatrix conj = lu.solve(m * basis);
    ComplexMatrix quotient = conj.bottomRightCorner(k - 1, k - 1);

    prefix.push_back(frame * line);
    ComplexMatrix subframe = frame * basis.rightCols(k - 1);
    if (!enumerate_flags(quotient, subframe, prefix, out, tol, witness)) return false;
    prefix.pop_back();
  }
  return true;
}

} // namespace detail

/// All M-stable full flags for n <= 4. Exactly n! flags for regular
/// semisimple M; a repeated eigenvector direction is reported as
/// non-enumerable with the blocking eigenspace dimension.
inline Fiber fiber_over(const ComplexMatrix& m, double tol = 1e-6) {
  const int n = static_cast<int>(m.rows());
  if (n > 4) throw unsupported_scale_error("fiber_over supports n <= 4");
  double det = std::abs(m.determinant());
  if (!(det > 0) || !std::isfinite(det))
    throw degenerate_input_error("fiber_over: matrix must be invertible");

  Fiber fiber;
  std::vector<ComplexVector> prefix;
  std::vector<std::vector<ComplexVector>> raw;
  int witness = 0;
  bool ok = detail::enumerate_flags(m, ComplexMatrix::Identity(n, n), prefix, raw, tol, &witness);
  if (!ok) {
    fiber.enumerable = false;
    fiber.witness_dimension = witness;
    return fiber;
  }
  for (const auto& lines : raw) {
    GrothendieckPoint p;
    p.m = m;
    p.flag.resize(n, n);
    for (int j = 0; j < n; ++j) p.flag.col(j) = lines[j];
    fiber.flags.push_back(std::move(p));
  }
  return fiber;
}

// ---------------------------------------------------------------------------
// Commutativity of the resolution square
// ---------------------------------------------------------------------------

struct DiagramReport {
  int samples = 0;
  int failures = 0;
  double max_deviation = 0.0;
  bool passed() const { return failures == 0; }
};

/// Sample random Grothendieck points (unitary-conjugated invertible upper
/// triangulars with a mild diagonal scaling) and assert that projecting
/// tilde_psi to the adjoint quotient agrees with psi of pi as multisets.
inline DiagramReport diagram_check(int n, int samples, std::uint64_t seed, double tol = 1e-9) {
  if (samples < 1) throw malformed_input_error("diagram_check needs samples >= 1");
  if (n < 1 || n > 4) throw unsupported_scale_error("diagram_check supports 1 <= n <= 4");
  Rng rng(seed);
  DiagramReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    ComplexMatrix t = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      t(i, i) = std::polar(std::exp(0.8 * rng.gaussian()), kTwoPi * rng.uniform());
      for (int j = i + 1; j < n; ++j) t(i, j) = rng.complex_gaussian();
    }
    ComplexMatrix u = rng.random_unitary(n);
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::exp(0.3 * rng.gaussian());
    ComplexMatrix g = u * d;

    GrothendieckPoint p;
    p.flag = g;
    p.m = g * t * g.inverse();

    ComplexVector torus = tilde_psi(p);
    std::vector<Complex> lhs(torus.data(), torus.data() + n); // pr(tilde_psi(p))
    std::vector<Complex> rhs = psi(pi(p));
    double dev = liecore::multiset_distance(lhs, rhs);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (!(dev <= tol)) ++report.failures;
  }
  return report;
}

} // namespace wildstokes::springer
