#pragma once

// liecore.hpp
// Root data, matrix primitives and the ad-inverse operator for gl_n.
// Everything downstream (direction combinatorics, Stokes factors, the
// isomonodromy vector field) reduces to the arithmetic in this header.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>
#include <vector>

#include "wildstokes/common.hpp"

namespace wildstokes::liecore {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Regular diagonal element of the Cartan subalgebra t = diagonal matrices.
struct CartanElement {
  ComplexVector diag;

  CartanElement() = default;
  explicit CartanElement(ComplexVector d) : diag(std::move(d)) {}
  explicit CartanElement(std::initializer_list<Complex> d)
      : diag(Eigen::Map<const ComplexVector>(d.begin(), static_cast<long>(d.size()))) {}

  int dim() const { return static_cast<int>(diag.size()); }

  ComplexMatrix matrix() const {
    ComplexMatrix m = ComplexMatrix::Zero(dim(), dim());
    m.diagonal() = diag;
    return m;
  }
};

/// Root alpha_ij = e_i - e_j of gl_n. Indices are 0-based; i != j.
struct Root {
  int i = 0;
  int j = 1;

  Root() = default;
  Root(int i_, int j_) : i(i_), j(j_) {}

  Root negated() const { return Root(j, i); }

  friend bool operator==(const Root& a, const Root& b) { return a.i == b.i && a.j == b.j; }
  friend bool operator<(const Root& a, const Root& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }
};

/// alpha_ij(A0) = diag[i] - diag[j].
inline Complex pairing(const Root& root, const CartanElement& a0) {
  return a0.diag[root.i] - a0.diag[root.j];
}

/// All n(n-1) roots of gl_n in lexicographic (i,j) order.
inline std::vector<Root> all_roots(int n) {
  std::vector<Root> roots;
  roots.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) roots.emplace_back(i, j);
  return roots;
}

inline double min_eigenvalue_gap(const CartanElement& a0) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a0.dim(); ++i)
    for (int j = i + 1; j < a0.dim(); ++j)
      gap = std::min(gap, std::abs(a0.diag[i] - a0.diag[j]));
  return gap;
}

/// Default regularity tolerance, relative to the scale of A0.
inline double default_regularity_tol(const CartanElement& a0) {
  double scale = a0.dim() > 0 ? a0.diag.cwiseAbs().maxCoeff() : 0.0;
  return kRegularityTol * std::max(1.0, scale);
}

/// True iff all diagonal entries are pairwise separated by more than tol.
inline bool is_regular(const CartanElement& a0, double tol) {
  if (a0.dim() < 2) return true;
  return min_eigenvalue_gap(a0) > tol;
}

inline void require_regular(const CartanElement& a0, double tol) {
  if (!is_regular(a0, tol)) {
    std::ostringstream msg;
    msg << "Cartan element is not regular: minimal eigenvalue gap "
        << min_eigenvalue_gap(a0) << " <= tolerance " << tol;
    throw degenerate_input_error(msg.str());
  }
}

inline ComplexMatrix diagonal_part(const ComplexMatrix& x) {
  ComplexMatrix d = ComplexMatrix::Zero(x.rows(), x.cols());
  d.diagonal() = x.diagonal();
  return d;
}

inline ComplexMatrix offdiagonal_part(const ComplexMatrix& x) {
  ComplexMatrix d = x;
  d.diagonal().setZero();
  return d;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

/// Inverse of ad_{A0} on the off-diagonal part:
///   Y_ij = X_ij / (diag[i] - diag[j]) for i != j, Y_ii = 0,
/// so that [A0, Y] equals the off-diagonal part of X.
inline ComplexMatrix ad_inverse(const CartanElement& a0, const ComplexMatrix& x) {
  require_regular(a0, default_regularity_tol(a0));
  const int n = a0.dim();
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) y(i, j) = x(i, j) / (a0.diag[i] - a0.diag[j]);
  return y;
}

// ---------------------------------------------------------------------------
// Spectra. Contract: eigenvalues are returned sorted lexicographically by
// (real, imaginary) part so that cross-run comparisons are reproducible.
// ---------------------------------------------------------------------------

inline bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

inline std::vector<Complex> sorted_eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw precision_error("eigenvalue iteration failed to converge");
  std::vector<Complex> ev(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), lex_less);
  return ev;
}

/// Eigenvalues together with eigenvectors, eigenvalues in lexicographic order.
struct EigenSystem {
  std::vector<Complex> values;
  ComplexMatrix vectors; // column k belongs to values[k]
};

inline EigenSystem sorted_eigensystem(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw precision_error("eigenvalue iteration failed to converge");
  const int n = static_cast<int>(m.rows());
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return lex_less(solver.eigenvalues()[a], solver.eigenvalues()[b]);
  });
  EigenSystem sys;
  sys.values.resize(n);
  sys.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    sys.values[k] = solver.eigenvalues()[order[k]];
    Eigen::VectorXcd v = solver.eigenvectors().col(order[k]);
    v.normalize();
    // fix the column phase: largest-magnitude entry made positive real
    int imax = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(v[r]) > std::abs(v[imax])) imax = r;
    if (std::abs(v[imax]) > 0) v *= std::conj(v[imax]) / std::abs(v[imax]);
    sys.vectors.col(k) = v;
  }
  return sys;
}

/// Elementary symmetric functions e_1..e_n of the eigenvalues. Equivalent to
/// the characteristic polynomial up to signs; a complete conjugation invariant.
inline std::vector<Complex> elementary_symmetric_spectrum(const ComplexMatrix& m) {
  std::vector<Complex> ev = sorted_eigenvalues(m);
  const int n = static_cast<int>(ev.size());
  std::vector<Complex> e(static_cast<std::size_t>(n) + 1, Complex(0, 0));
  e[0] = Complex(1, 0);
  for (int k = 0; k < n; ++k)
    for (int d = k + 1; d >= 1; --d) e[d] += ev[static_cast<std::size_t>(k)] * e[d - 1];
  return std::vector<Complex>(e.begin() + 1, e.end());
}

/// Distance between two eigenvalue multisets: best matching over permutations
/// for n <= 4, sorted componentwise comparison beyond that.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(a.size());
  std::sort(a.begin(), a.end(), lex_less);
  std::sort(b.begin(), b.end(), lex_less);
  if (n <= 4) {
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) perm[k] = k;
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(a[static_cast<std::size_t>(k)] -
                                         b[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])]));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  double worst = 0.0;
  for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

/// exp(c * Lambda) as a diagonal matrix, for diagonal Lambda.
inline ComplexMatrix diag_exp(const CartanElement& lambda, Complex c) {
  const int n = lambda.dim();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = std::exp(c * lambda.diag[k]);
  return m;
}

} // namespace wildstokes::liecore
