#pragma once

// dualpoisson.hpp
// The dual Poisson Lie group G* for GL_n: pairs of opposite triangular
// matrices with reciprocal diagonals, assembled from Stokes data. Also the
// symplectic-leaf invariant, the Iwasawa projection, Kostant convexity
// sampling and the reality check for skew-Hermitian input data.

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/liecore.hpp"
#include "wildstokes/rng.hpp"
#include "wildstokes/stokescomb.hpp"

namespace wildstokes::dualpoisson {

using liecore::CartanElement;
using liecore::ComplexMatrix;
using liecore::Root;
using stokescomb::SectorDecomposition;

/// Exponent of formal monodromy plus one unipotent factor per singular
/// direction, indexed parallel to a SectorDecomposition.
struct StokesDataBundle {
  CartanElement lambda;
  std::vector<ComplexMatrix> factors;
};

/// Element of G*: b_minus lower triangular, b_plus upper triangular,
/// delta(b_-) delta(b_+) = 1 and delta(b_pm) = exp(pm i pi Lambda).
/// `basis` records the index relabeling applied so that the positive
/// half-period became upper triangular (new index a <-> original basis[a]).
struct DualGroupElement {
  ComplexMatrix b_minus;
  ComplexMatrix b_plus;
  CartanElement lambda;
  std::vector<int> basis;

  ComplexMatrix product() const {
    // b_-^{-1} b_+ via triangular solve
    return b_minus.triangularView<Eigen::Lower>().solve(b_plus);
  }
};

namespace detail {

inline void validate_factor(const ComplexMatrix& k, const std::vector<Root>& support, int n) {
  if (k.rows() != n || k.cols() != n)
    throw malformed_input_error("Stokes factor has wrong dimension");
  std::set<std::pair<int, int>> allowed;
  for (const Root& r : support) allowed.insert({r.i, r.j});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        if (k(i, j) != Complex(1, 0))
          throw malformed_input_error("Stokes factor diagonal must be exactly 1");
      } else if (!allowed.count({i, j}) && k(i, j) != Complex(0, 0)) {
        throw malformed_input_error("Stokes factor has an entry off its direction support");
      }
    }
}

/// Total order on indices induced by a positive system: index with the most
/// positive roots alpha_i* comes first. Returns basis (new -> original).
inline std::vector<int> triangularizing_basis(const std::vector<Root>& r_plus, int n) {
  std::vector<int> wins(n, 0);
  for (const Root& r : r_plus) ++wins[r.i];
  std::vector<int> basis(n);
  std::iota(basis.begin(), basis.end(), 0);
  std::sort(basis.begin(), basis.end(), [&](int a, int b) {
    if (wins[a] != wins[b]) return wins[a] > wins[b];
    return a < b;
  });
  // a genuine total order has distinct win counts n-1, n-2, ..., 0
  for (int a = 0; a < n; ++a)
    if (wins[basis[a]] != n - 1 - a)
      throw malformed_input_error("support set is not a positive system");
  return basis;
}

inline ComplexMatrix relabel(const ComplexMatrix& x, const std::vector<int>& basis) {
  const int n = static_cast<int>(basis.size());
  ComplexMatrix y(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) y(a, b) = x(basis[a], basis[b]);
  return y;
}

} // namespace detail

/// Assemble (b_-, b_+, Lambda) from a bundle of Stokes factors. Factors are
/// multiplied in crossing order with each later crossing composing on the
/// left; this is the order for which the product b_-^{-1} b_+ is conjugate to
/// the counterclockwise monodromy (fixed once by the scalar case).
inline DualGroupElement assemble(const StokesDataBundle& bundle,
                                 const SectorDecomposition& sectors, int base_sector) {
  const int m = sectors.count();
  const int n = bundle.lambda.dim();
  if (static_cast<int>(bundle.factors.size()) != m)
    throw malformed_input_error("bundle factor count does not match direction count");
  if (m % 2 != 0 && m != 0) throw malformed_input_error("direction count must be even");
  if (m > 0 && (base_sector < 0 || base_sector >= m))
    throw malformed_input_error("base sector out of range");

  std::vector<int> basis(n);
  std::iota(basis.begin(), basis.end(), 0);

  ComplexMatrix u_plus = ComplexMatrix::Identity(n, n);
  ComplexMatrix u_minus = ComplexMatrix::Identity(n, n);

  if (m > 0) {
    for (int k = 0; k < m; ++k)
      detail::validate_factor(bundle.factors[k], sectors.directions[k].support, n);

    auto pos = stokescomb::positive_system(sectors, base_sector);
    basis = detail::triangularizing_basis(pos.roots, n);

    const int half = m / 2;
    for (int step = 0; step < half; ++step) {
      int idx = pos.crossed[step];
      ComplexMatrix k = detail::relabel(bundle.factors[idx], basis);
      u_plus = k * u_plus; // later crossings on the left
    }
    for (int step = half; step < m; ++step) {
      int idx = (base_sector + 1 + step) % m;
      ComplexMatrix k = detail::relabel(bundle.factors[idx], basis);
      u_minus = k * u_minus;
    }
  }

  CartanElement lambda_re;
  lambda_re.diag.resize(n);
  for (int a = 0; a < n; ++a) lambda_re.diag[a] = bundle.lambda.diag[basis[a]];

  const Complex ipi(0, kPi);
  ComplexMatrix e_plus = liecore::diag_exp(lambda_re, ipi);
  ComplexMatrix e_minus = liecore::diag_exp(lambda_re, -ipi);

  DualGroupElement g;
  g.lambda = lambda_re;
  g.basis = basis;
  g.b_plus = u_plus * e_plus;
  // u_minus is lower unipotent, so its inverse is too
  g.b_minus = u_minus.triangularView<Eigen::Lower>().solve(ComplexMatrix::Identity(n, n)) * e_minus;
  return g;
}

/// Symplectic-leaf invariant: elementary symmetric functions of the spectrum
/// of b_-^{-1} b_+ (the characteristic polynomial up to signs).
inline std::vector<Complex> class_invariant(const DualGroupElement& g) {
  return liecore::elementary_symmetric_spectrum(g.product());
}

/// Iwasawa projection g = k a n -> log(a): QR-factor g with the R diagonal
/// made real positive, and return the componentwise log of that diagonal.
inline Eigen::VectorXd iwasawa_projection(const ComplexMatrix& g) {
  const int n = static_cast<int>(g.rows());
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) {
    double a = std::abs(r(k, k));
    if (!(a > 0) || !std::isfinite(a))
      throw degenerate_input_error("iwasawa_projection: matrix is singular");
    out[k] = std::log(a);
  }
  return out;
}

inline bool nearly_majorized(const Eigen::VectorXd& x, const Eigen::VectorXd& a, double tol) {
  const int n = static_cast<int>(x.size());
  std::vector<double> xs(x.data(), x.data() + n), as(a.data(), a.data() + n);
  std::sort(xs.begin(), xs.end(), std::greater<double>());
  std::sort(as.begin(), as.end(), std::greater<double>());
  double px = 0, pa = 0;
  for (int k = 0; k < n; ++k) {
    px += xs[k];
    pa += as[k];
    if (px > pa + tol) return false;
  }
  return std::fabs(px - pa) <= tol; // total sums must agree
}

struct KostantReport {
  int samples = 0;
  int violations = 0;
  double max_hull_excess = 0.0;   // worst majorization slack violation
  double vertex_proximity = 0.0;  // max over vertices of min over samples distance
  bool passed() const { return violations == 0; }
};

/// Sample unitary conjugates of exp(diag(a)), Iwasawa-project and verify
/// Kostant's nonlinear convexity: every projection lies in the convex hull of
/// the Sym_n orbit of a. The n! permutation conjugations are sampled first
/// (they attain the hull vertices exactly); remaining samples are Haar-random.
inline KostantReport kostant_check(const Eigen::VectorXd& a, int samples, std::uint64_t seed,
                                   double tol = 1e-9) {
  if (samples < 1) throw malformed_input_error("kostant_check needs samples >= 1");
  const int n = static_cast<int>(a.size());
  ComplexMatrix expa = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) expa(k, k) = std::exp(a[k]);

  // hull vertices: permutation orbit of a (deduplicated)
  std::vector<Eigen::VectorXd> vertices;
  {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Eigen::VectorXd v(n);
      for (int k = 0; k < n; ++k) v[k] = a[perm[k]];
      bool dup = false;
      for (const auto& w : vertices)
        if ((w - v).cwiseAbs().maxCoeff() == 0.0) { dup = true; break; }
      if (!dup) vertices.push_back(v);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  bool perms_left = true;

  Rng rng(seed);
  KostantReport report;
  report.samples = samples;
  std::vector<double> vertex_min(vertices.size(), std::numeric_limits<double>::infinity());

  for (int s = 0; s < samples; ++s) {
    ComplexMatrix u;
    if (perms_left) {
      u = ComplexMatrix::Zero(n, n);
      for (int k = 0; k < n; ++k) u(perm[k], k) = Complex(1, 0);
      perms_left = std::next_permutation(perm.begin(), perm.end());
    } else {
      u = rng.random_unitary(n);
    }
    Eigen::VectorXd proj = iwasawa_projection(u * expa * u.adjoint());

    if (!nearly_majorized(proj, a, tol)) {
      ++report.violations;
      // record how far outside the hull the projection landed
      std::vector<double> xs(proj.data(), proj.data() + n), as(a.data(), a.data() + n);
      std::sort(xs.begin(), xs.end(), std::greater<double>());
      std::sort(as.begin(), as.end(), std::greater<double>());
      double px = 0, pa = 0, excess = 0;
      for (int k = 0; k < n; ++k) {
        px += xs[k];
        pa += as[k];
        excess = std::max(excess, px - pa);
      }
      report.max_hull_excess = std::max(report.max_hull_excess, excess);
    }
    for (std::size_t v = 0; v < vertices.size(); ++v)
      vertex_min[v] = std::min(vertex_min[v], (proj - vertices[v]).cwiseAbs().maxCoeff());
  }
  report.vertex_proximity = *std::max_element(vertex_min.begin(), vertex_min.end());
  return report;
}

/// Spectral consequence of the Ginzburg-Weinstein reality restriction: for
/// data coming from A0 in i R^n and skew-Hermitian B, the spectrum of
/// b_-^{-1} b_+ is real and positive.
inline bool reality_check(const DualGroupElement& g, double rel_tol = 1e-8) {
  for (const Complex& ev : liecore::sorted_eigenvalues(g.product())) {
    if (!(ev.real() > 0)) return false;
    if (std::abs(ev.imag()) > rel_tol * std::abs(ev)) return false;
  }
  return true;
}

} // namespace wildstokes::dualpoisson
