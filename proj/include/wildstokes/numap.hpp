#pragma once

// numap.hpp
// Numerical dual exponential map for (A0/z^2 + B/z) dz: formal normalization
// at the order-two pole, canonical sectorial solutions via optimally
// truncated asymptotics, Stokes factors by arc continuation, monodromy, and
// Duistermaat connection matrices from the simple pole at infinity.
//
// Branch convention: anchors sit at sector midpoints on the circle |z| = r0
// and z^Lambda uses the argument continued counterclockwise from the base
// anchor. The final crossing returns to the base sector one turn up, so the
// last factor is the universal-cover one (twisted by the formal monodromy);
// assemble() consumes exactly these factors.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/dualpoisson.hpp"
#include "wildstokes/liecore.hpp"
#include "wildstokes/ode.hpp"
#include "wildstokes/stokescomb.hpp"

namespace wildstokes::numap {

using dualpoisson::DualGroupElement;
using dualpoisson::StokesDataBundle;
using liecore::CartanElement;
using liecore::ComplexMatrix;
using stokescomb::SectorDecomposition;
using stokescomb::SingularDirection;

struct Precision {
  int series_order = 0;        // 0 = optimal truncation
  double matching_radius = 0;  // 0 = auto
  double ode_rel_tol = kOdeRelTolDefault;
  double support_tol = kSupportTolDefault;
};

struct ConnectionProblem {
  CartanElement a0;
  ComplexMatrix b;
  Precision precision;

  int dim() const { return a0.dim(); }

  void validate() const {
    if (a0.dim() < 1) throw malformed_input_error("empty Cartan element");
    if (b.rows() != a0.dim() || b.cols() != a0.dim())
      throw malformed_input_error("B dimension does not match A0");
    if (!b.allFinite() || !a0.diag.allFinite())
      throw malformed_input_error("non-finite connection data");
    if (!(precision.ode_rel_tol > 0) || !(precision.support_tol > 0))
      throw malformed_input_error("tolerances must be positive");
    liecore::require_regular(a0, liecore::default_regularity_tol(a0));
  }
};

struct FormalExpansion {
  CartanElement lambda;
  std::vector<ComplexMatrix> coeffs; // F_1 .. F_N
  int truncation_order = 0;
  double residual_estimate = 0.0;
};

// ---------------------------------------------------------------------------
// Formal normalization: A = F[A^0] order by order.
//
// With F = 1 + F_1 z + F_2 z^2 + ... and Lambda = diag(B), matching powers in
//   z^2 F' + F (A0 + Lambda z) = (A0 + B z) F
// gives [A0, F_{k+1}] = k F_k + F_k Lambda - B F_k, whose diagonal part fixes
// diag(F_k) = (1/k) diag(B offdiag(F_k)) and whose off-diagonal part is
// inverted by ad^{-1}_{A0}.
// ---------------------------------------------------------------------------

inline std::vector<ComplexMatrix> formal_coefficients(const CartanElement& a0,
                                                      const ComplexMatrix& b, int count) {
  liecore::require_regular(a0, liecore::default_regularity_tol(a0));
  ComplexMatrix lambda = liecore::diagonal_part(b);

  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(count);
  // order 1: [A0, F_1] = Lambda - B
  ComplexMatrix fk = liecore::ad_inverse(a0, lambda - b);
  for (int k = 1; k <= count; ++k) {
    // diagonal consistency at order k
    ComplexMatrix bf = b * liecore::offdiagonal_part(fk);
    fk.diagonal() = bf.diagonal() / static_cast<double>(k);
    coeffs.push_back(fk);
    if (k == count) break;
    ComplexMatrix rhs = static_cast<double>(k) * fk + fk * lambda - b * fk;
    fk = liecore::ad_inverse(a0, rhs);
  }
  return coeffs;
}

/// Index (1-based) and value of the smallest term ||F_k|| r^k; classical
/// optimal truncation of the divergent series.
inline std::pair<int, double> optimal_truncation(const std::vector<ComplexMatrix>& coeffs,
                                                 double r) {
  int best = 1;
  double best_val = std::numeric_limits<double>::infinity();
  double rk = 1.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    rk *= r;
    double t = coeffs[k].cwiseAbs().maxCoeff() * rk;
    if (t < best_val) {
      best_val = t;
      best = static_cast<int>(k) + 1;
    }
  }
  return {best, best_val};
}

inline FormalExpansion formal_normalization(const ConnectionProblem& problem, int order) {
  if (order < 1) throw malformed_input_error("series order must be >= 1");
  FormalExpansion exp;
  exp.lambda = CartanElement(problem.b.diagonal());
  exp.coeffs = formal_coefficients(problem.a0, problem.b, order);
  exp.truncation_order = order;
  exp.residual_estimate = 0.0;
  return exp;
}

/// Defect of the truncated series in the gauge equation, evaluated at z; the
/// norm scales as |z|^{N+1} and is the oracle for the recursion.
inline ComplexMatrix gauge_defect(const ConnectionProblem& problem, const FormalExpansion& exp,
                                  Complex z) {
  const int n = problem.dim();
  ComplexMatrix a0m = problem.a0.matrix();
  ComplexMatrix lm = exp.lambda.matrix();
  ComplexMatrix p = ComplexMatrix::Identity(n, n);
  ComplexMatrix dp = ComplexMatrix::Zero(n, n);
  Complex zk(1, 0);
  for (std::size_t k = 0; k < exp.coeffs.size(); ++k) {
    dp += static_cast<double>(k + 1) * exp.coeffs[k] * zk;
    zk *= z;
    p += exp.coeffs[k] * zk;
  }
  return z * z * dp + p * (a0m + z * lm) - (a0m + z * problem.b) * p;
}

// ---------------------------------------------------------------------------
// Matching radius and truncation resolution
// ---------------------------------------------------------------------------

struct ResolvedSetup {
  double r0 = 0.0;
  FormalExpansion expansion;
  SectorDecomposition sectors;
  double series_residual = 0.0;
};

namespace detail {

inline double spectral_scale(const ComplexMatrix& b) { return b.norm(); } // Frobenius

inline double max_eigenvalue_gap(const CartanElement& a0) {
  double max_gap = 0.0;
  for (int i = 0; i < a0.dim(); ++i)
    for (int j = i + 1; j < a0.dim(); ++j)
      max_gap = std::max(max_gap, std::abs(a0.diag[i] - a0.diag[j]));
  return max_gap;
}

} // namespace detail

inline ResolvedSetup resolve(const ConnectionProblem& problem) {
  problem.validate();
  const Precision& prec = problem.precision;

  ResolvedSetup setup;
  setup.sectors = stokescomb::sector_decomposition(problem.a0);

  // Radius policy. Arc transport takes the detour path, so it is
  // amplification-free; the remaining error sources at radius r are the
  // truncation residual (measurable from the coefficients) and the rounding
  // coset of the series anchors, which grows like eps e^{amp/r} where
  //   amp = max over anchors a, roots beta of |beta(A0)| max(0, cos(theta_beta - theta_a)).
  // The anchors sit at sector midpoints, so amp vanishes when the spectrum of
  // A0 is collinear (every root ray perpendicular to every midpoint) and the
  // radius can shrink freely; for generic spectra the minimizer balances the
  // two terms.
  const double gap = liecore::min_eigenvalue_gap(problem.a0);

  const int hard_cap = 160;
  int cap = prec.series_order > 0 ? std::min(prec.series_order, hard_cap) : hard_cap;
  std::vector<ComplexMatrix> coeffs = formal_coefficients(problem.a0, problem.b, cap);

  double scale_a0 = problem.a0.diag.cwiseAbs().maxCoeff();

  double amp = 0.0;
  {
    const int m = setup.sectors.count();
    for (int s = 0; s < m; ++s) {
      double mid = setup.sectors.sector_midpoint(s);
      for (const auto& dir : setup.sectors.directions)
        for (const auto& root : dir.support) {
          Complex w = liecore::pairing(root, problem.a0);
          double along = std::abs(w) * std::max(0.0, std::cos(std::arg(w) - mid));
          amp = std::max(amp, along);
        }
    }
  }

  double r;
  int order;
  double residual;
  if (prec.matching_radius > 0) {
    r = prec.matching_radius;
    std::tie(order, residual) = optimal_truncation(coeffs, r);
    if (residual > 1e-4 * (1.0 + detail::spectral_scale(problem.b))) {
      std::ostringstream msg;
      msg << "matching radius " << r << " too large: series residual " << residual;
      throw precision_error(msg.str());
    }
  } else if (problem.dim() == 1) {
    r = 1.0 / (detail::spectral_scale(problem.b) + 1.0);
    std::tie(order, residual) = optimal_truncation(coeffs, r);
  } else {
    const double r_min = std::max(scale_a0 / 550.0, gap / (2.0 * hard_cap));
    const double r_max = std::max(r_min, 0.5 * gap);
    const double eps_round = 2e-16;
    const int grid = 80;
    double best_total = std::numeric_limits<double>::infinity();
    double best_r = r_max;
    for (int k = 0; k < grid; ++k) {
      // descending radii; prefer the largest radius among near-ties
      double t = static_cast<double>(k) / (grid - 1);
      double rc = std::exp(std::log(r_max) * (1.0 - t) + std::log(r_min) * t);
      if (scale_a0 / rc > 600.0) continue;
      double total = optimal_truncation(coeffs, rc).second + eps_round * std::exp(amp / rc);
      if (total < 0.5 * best_total) {
        best_total = total;
        best_r = rc;
      }
    }
    r = best_r;
    std::tie(order, residual) = optimal_truncation(coeffs, r);
  }

  // exponent representability at the matching circle
  double max_exponent = 0.0;
  for (int k = 0; k < problem.dim(); ++k)
    max_exponent = std::max(max_exponent, std::abs(problem.a0.diag[k]) / r);
  if (max_exponent > 600.0)
    throw precision_error("matching radius drives exp(-A0/z) out of double range");

  setup.r0 = r;
  setup.series_residual = residual;
  setup.expansion.lambda = CartanElement(problem.b.diagonal());
  setup.expansion.truncation_order = order;
  setup.expansion.residual_estimate = residual;
  setup.expansion.coeffs.assign(coeffs.begin(), coeffs.begin() + order);
  return setup;
}

// ---------------------------------------------------------------------------
// Canonical solutions
// ---------------------------------------------------------------------------

struct CanonicalSolution {
  int sector = 0;
  Complex anchor;
  ComplexMatrix value;
};

namespace detail {

/// Truncated series prefactor P(z) = 1 + F_1 z + ... + F_N z^N.
inline ComplexMatrix series_prefactor(const FormalExpansion& exp, Complex z, int n) {
  ComplexMatrix p = ComplexMatrix::Identity(n, n);
  Complex zk(1, 0);
  for (const ComplexMatrix& f : exp.coeffs) {
    zk *= z;
    p += f * zk;
  }
  return p;
}

inline Complex point_on_circle(double r0, double theta) {
  return Complex(r0 * std::cos(theta), r0 * std::sin(theta));
}

/// Diagonal factor z^Lambda e^{-A0/z} with arg(z) = theta (continued branch).
inline ComplexMatrix diagonal_frame(const CartanElement& a0, const CartanElement& lambda,
                                    double r0, double theta) {
  const int n = a0.dim();
  Complex z = point_on_circle(r0, theta);
  Complex logz(std::log(r0), theta);
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = std::exp(lambda.diag[k] * logz - a0.diag[k] / z);
  return d;
}

/// Anchor value of the canonical solution at angle theta on |z| = r0.
inline ComplexMatrix anchor_value(const ConnectionProblem& problem, const ResolvedSetup& setup,
                                  double theta) {
  ComplexMatrix p = series_prefactor(setup.expansion, point_on_circle(setup.r0, theta),
                                     problem.dim());
  return p * diagonal_frame(problem.a0, setup.expansion.lambda, setup.r0, theta);
}

/// Midpoint anchor angles continued counterclockwise from the base sector;
/// returns m+1 angles, the last being the base midpoint plus a full turn.
inline std::vector<double> continued_anchor_angles(const SectorDecomposition& sectors,
                                                   int base_sector) {
  const int m = sectors.count();
  std::vector<double> angles;
  if (m == 0) {
    angles = {0.0, kTwoPi};
    return angles;
  }
  double prev = sectors.sector_midpoint(base_sector);
  angles.push_back(prev);
  for (int j = 1; j < m; ++j) {
    double a = sectors.sector_midpoint((base_sector + j) % m);
    while (a <= prev) a += kTwoPi;
    angles.push_back(a);
    prev = a;
  }
  angles.push_back(angles.front() + kTwoPi);
  return angles;
}

/// Continue Y' = (A0/z^2 + B/z) Y from (r0, theta_from) to (r0, theta_to),
/// both on the matching circle with continued arguments.
///
/// The path is a detour: radially out along the start ray to a radius where
/// the exponentials of the irregular part are tame, around by an arc there,
/// and radially back in. The connection is holomorphic on C^*, so the
/// continuation only depends on the path's winding; the detour avoids
/// transporting the solution through the dominance peak at the crossed
/// singular ray at small |z|, where column ratios of order e^{|alpha(A0)|/r0}
/// would amplify integration error.
inline ComplexMatrix continue_detour(const ConnectionProblem& problem, double r0,
                                     ComplexMatrix y, double theta_from, double theta_to,
                                     ode::Stats* stats = nullptr) {
  ComplexMatrix a0m = problem.a0.matrix();
  const Complex iunit(0, 1);
  double scale_a0 = problem.a0.diag.cwiseAbs().maxCoeff();
  double r_big = std::max(2.0 * scale_a0, 4.0 * r0);

  ode::Options opt;
  opt.rel_tol = problem.precision.ode_rel_tol;
  opt.max_step = 0.1;
  opt.initial_step = 0.01;

  auto radial = [&](double theta, bool outward, ComplexMatrix state) {
    double span = std::log(r_big / r0);
    Complex ray(std::cos(theta), std::sin(theta));
    auto rhs = [&, ray](double t, const ode::State& s) -> ode::State {
      double logr = outward ? std::log(r0) + t : std::log(r_big) - t;
      Complex z = std::exp(logr) * ray;
      ode::State v = (a0m / z + problem.b) * s; // z A(z) s
      return outward ? v : ode::State(-v);
    };
    return ode::integrate(rhs, std::move(state), 0.0, span, opt, stats);
  };

  y = radial(theta_from, true, std::move(y));
  auto arc_rhs = [&](double theta, const ode::State& state) -> ode::State {
    Complex z = point_on_circle(r_big, theta);
    return iunit * ((a0m / z + problem.b) * state);
  };
  y = ode::integrate(arc_rhs, std::move(y), theta_from, theta_to, opt, stats);
  return radial(theta_to, false, std::move(y));
}

} // namespace detail

inline CanonicalSolution canonical_solution(const ConnectionProblem& problem,
                                            const ResolvedSetup& setup, int sector,
                                            int base_sector = 0) {
  const int m = setup.sectors.count();
  if (m > 0 && (sector < 0 || sector >= m))
    throw malformed_input_error("sector index out of range");
  std::vector<double> angles = detail::continued_anchor_angles(setup.sectors, base_sector);
  int offset = (m > 0) ? ((sector - base_sector) % m + m) % m : 0;
  CanonicalSolution sol;
  sol.sector = sector;
  sol.anchor = detail::point_on_circle(setup.r0, angles[offset]);
  sol.value = detail::anchor_value(problem, setup, angles[offset]);
  return sol;
}

// ---------------------------------------------------------------------------
// Stokes factors, nu, monodromy
// ---------------------------------------------------------------------------

struct FactorDiagnostics {
  int direction = 0;            // direction index in the sector decomposition
  double off_support = 0.0;     // largest stray entry before projection
  double diagonal_defect = 0.0; // largest |K_ii - 1| before projection
};

struct NuDiagnostics {
  double matching_radius = 0.0;
  int truncation_order = 0;
  double series_residual = 0.0;
  double max_off_support = 0.0;
  std::vector<FactorDiagnostics> factors;
  long ode_steps = 0;
};

struct NuResult {
  SectorDecomposition sectors;
  int base_sector = 0;
  StokesDataBundle bundle; // universal-cover factors, indexed per direction
  DualGroupElement element;
  std::vector<Complex> spectrum_b;
  std::vector<Complex> spectrum_product;
  NuDiagnostics diagnostics;
};

namespace detail {

/// Project a computed factor onto its Stokes group support; returns the
/// largest stray entry seen. Strays are gated relative to the factor's own
/// entry scale: the final crossing is the universal-cover factor, whose
/// entries legitimately carry the e^{2 pi Im Lambda}-sized twist.
inline FactorDiagnostics project_factor(ComplexMatrix& k, const SingularDirection& dir,
                                        int dir_index, double support_tol) {
  const int n = static_cast<int>(k.rows());
  std::set<std::pair<int, int>> allowed;
  for (const auto& r : dir.support) allowed.insert({r.i, r.j});
  FactorDiagnostics diag;
  diag.direction = dir_index;
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  ComplexMatrix projected = ComplexMatrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        diag.diagonal_defect = std::max(diag.diagonal_defect, std::abs(k(i, j) - Complex(1, 0)));
      } else if (allowed.count({i, j})) {
        projected(i, j) = k(i, j);
      } else {
        diag.off_support = std::max(diag.off_support, std::abs(k(i, j)));
      }
    }
  if (diag.off_support > support_tol * scale) {
    std::ostringstream msg;
    msg << "Stokes factor for direction " << dir_index
        << " violates its support: largest stray entry " << diag.off_support
        << " > support_tol " << support_tol << " at entry scale " << scale;
    throw precision_error(msg.str());
  }
  // unipotence carries the full series residual, so it gets a looser gate
  if (diag.diagonal_defect > 100.0 * support_tol * scale) {
    std::ostringstream msg;
    msg << "Stokes factor for direction " << dir_index << " is not unipotent: |K_ii - 1| = "
        << diag.diagonal_defect;
    throw precision_error(msg.str());
  }
  k = std::move(projected);
  return diag;
}

/// Solve Phi(anchor)^{-1} Y with Phi = P D split to keep the diagonal scales
/// explicit: K = D^{-1} (P^{-1} Y).
inline ComplexMatrix frame_solve(const ConnectionProblem& problem, const ResolvedSetup& setup,
                                 double theta, const ComplexMatrix& y) {
  const int n = problem.dim();
  ComplexMatrix p =
      series_prefactor(setup.expansion, point_on_circle(setup.r0, theta), n);
  ComplexMatrix d = diagonal_frame(problem.a0, setup.expansion.lambda, setup.r0, theta);
  ComplexMatrix k = p.partialPivLu().solve(y);
  for (int i = 0; i < n; ++i) k.row(i) /= d(i, i);
  return k;
}

} // namespace detail

/// Stokes factor across the direction separating sector `sector` from the
/// next counterclockwise sector (anchored per the base-sector branch).
inline ComplexMatrix stokes_factor(const ConnectionProblem& problem, const ResolvedSetup& setup,
                                   int crossing, int base_sector = 0,
                                   FactorDiagnostics* diag_out = nullptr,
                                   ode::Stats* stats = nullptr) {
  const int m = setup.sectors.count();
  if (m == 0) throw malformed_input_error("no singular directions: nothing to cross");
  if (crossing < 1 || crossing > m)
    throw malformed_input_error("crossing index out of range");
  std::vector<double> angles = detail::continued_anchor_angles(setup.sectors, base_sector);

  ComplexMatrix y = detail::anchor_value(problem, setup, angles[crossing - 1]);
  y = detail::continue_detour(problem, setup.r0, std::move(y), angles[crossing - 1],
                           angles[crossing], stats);
  ComplexMatrix k = detail::frame_solve(problem, setup, angles[crossing], y);

  int dir_index = (base_sector + crossing) % m;
  FactorDiagnostics diag = detail::project_factor(k, setup.sectors.directions[dir_index],
                                                  dir_index, problem.precision.support_tol);
  if (diag_out) *diag_out = diag;
  return k;
}

/// The dual exponential map: Stokes data of (A0/z^2 + B/z) dz assembled into
/// a dual group element, with diagnostics.
inline NuResult nu(const ConnectionProblem& problem, int base_sector = 0) {
  ResolvedSetup setup = resolve(problem);
  const int m = setup.sectors.count();
  if (m > 0 && (base_sector < 0 || base_sector >= m))
    throw malformed_input_error("base sector out of range");

  NuResult result;
  result.sectors = setup.sectors;
  result.base_sector = base_sector;
  result.bundle.lambda = setup.expansion.lambda;
  result.bundle.factors.assign(m, ComplexMatrix());
  result.diagnostics.matching_radius = setup.r0;
  result.diagnostics.truncation_order = setup.expansion.truncation_order;
  result.diagnostics.series_residual = setup.series_residual;

  ode::Stats stats;
  for (int t = 1; t <= m; ++t) {
    FactorDiagnostics fd;
    ComplexMatrix k = stokes_factor(problem, setup, t, base_sector, &fd, &stats);
    int dir_index = (base_sector + t) % m;
    result.bundle.factors[dir_index] = std::move(k);
    result.diagnostics.max_off_support =
        std::max(result.diagnostics.max_off_support, fd.off_support);
    result.diagnostics.factors.push_back(fd);
  }
  result.diagnostics.ode_steps = stats.accepted;

  result.element = dualpoisson::assemble(result.bundle, result.sectors, base_sector);
  result.spectrum_b = liecore::sorted_eigenvalues(problem.b);
  result.spectrum_product = liecore::sorted_eigenvalues(result.element.product());
  return result;
}

inline NuResult nu(const CartanElement& a0, const ComplexMatrix& b,
                   const Precision& precision = {}, int base_sector = 0) {
  return nu(ConnectionProblem{a0, b, precision}, base_sector);
}

/// Monodromy in the canonical frame: continue the base-sector solution once
/// counterclockwise around |z| = r0.
inline ComplexMatrix monodromy(const ConnectionProblem& problem, int base_sector = 0,
                               ode::Stats* stats = nullptr) {
  ResolvedSetup setup = resolve(problem);
  std::vector<double> angles = detail::continued_anchor_angles(setup.sectors, base_sector);
  double theta0 = angles.front();
  ComplexMatrix y = detail::anchor_value(problem, setup, theta0);
  y = detail::continue_detour(problem, setup.r0, std::move(y), theta0, theta0 + kTwoPi, stats);
  return detail::frame_solve(problem, setup, theta0, y);
}

// ---------------------------------------------------------------------------
// Connection matrix (Duistermaat map data)
// ---------------------------------------------------------------------------

/// Throws resonance_error if two eigenvalues of B differ by a nonzero integer
/// (within tol on the real part, with matching imaginary parts).
inline void require_nonresonant(const ComplexMatrix& b, double tol = 1e-8) {
  std::vector<Complex> ev = liecore::sorted_eigenvalues(b);
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = 0; j < ev.size(); ++j) {
      if (i == j) continue;
      Complex d = ev[i] - ev[j];
      double nearest = std::round(d.real());
      if (nearest != 0.0 && std::abs(d.real() - nearest) <= tol && std::abs(d.imag()) <= tol)
        throw resonance_error("residue spectrum has an integer-spaced eigenvalue pair");
    }
}

/// Connection matrix C relating the eigenframe solution at infinity (simple
/// pole, residue -B) to the canonical solution of the base sector:
/// C = Phi_base(z0)^{-1} Y_inf(z0).
inline ComplexMatrix connection_matrix(const ConnectionProblem& problem, int base_sector = 0,
                                       double r_out = 0.0, ode::Stats* stats = nullptr) {
  require_nonresonant(problem.b);
  ResolvedSetup setup = resolve(problem);
  const int n = problem.dim();

  liecore::EigenSystem sys = liecore::sorted_eigensystem(-problem.b);
  const ComplexMatrix& s = sys.vectors;
  Eigen::PartialPivLU<ComplexMatrix> s_lu(s);
  ComplexMatrix a0m = problem.a0.matrix();

  std::vector<double> angles = detail::continued_anchor_angles(setup.sectors, base_sector);
  double theta0 = angles.front();

  double scale_a0 = problem.a0.diag.cwiseAbs().maxCoeff();
  double radius = (r_out > 0) ? r_out : 20.0 * (1.0 + scale_a0);

  for (int attempt = 0;; ++attempt) {
    // Frobenius series H(w) = S + sum H_k w^k for w = 1/z:
    //   (k - Delta_p + Delta_q) X_pq = -(S^{-1} A0 H_{k-1})_pq, H_k = S X_k
    double w0_abs = 1.0 / radius;
    ComplexMatrix h_prev = s;
    ComplexMatrix h_sum = s;
    Complex w0 = std::polar(w0_abs, -theta0);
    Complex w0k(1, 0);
    bool converged = false;
    for (int k = 1; k <= 400; ++k) {
      ComplexMatrix r = -(s_lu.solve(a0m * h_prev));
      ComplexMatrix x(n, n);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          Complex denom = Complex(static_cast<double>(k), 0) - sys.values[p] + sys.values[q];
          if (std::abs(denom) < 1e-8)
            throw resonance_error("frame at infinity degenerates (resonant denominators)");
          x(p, q) = r(p, q) / denom;
        }
      h_prev = s * x;
      w0k *= w0;
      ComplexMatrix term = h_prev * w0k;
      h_sum += term;
      if (term.cwiseAbs().maxCoeff() < 1e-16 * h_sum.cwiseAbs().maxCoeff() && k >= 4) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      radius *= 2.0;
      if (attempt >= 6) throw precision_error("R_out auto-selection failed to converge");
      continue;
    }

    // frame value at |z| = radius on the base-anchor ray: H(w0) w0^{Delta}
    ComplexMatrix y = h_sum;
    Complex logw0(std::log(w0_abs), -theta0);
    for (int q = 0; q < n; ++q) y.col(q) *= std::exp(sys.values[q] * logw0);

    // integrate inward along the ray to the base anchor
    auto rhs = [&](double t, const ode::State& state) -> ode::State {
      double sparam = std::log(radius) - t;
      Complex z = std::polar(std::exp(sparam), theta0);
      return (-(a0m / z + problem.b)) * state; // d/dt with t = -log|z| + const
    };
    ode::Options opt;
    opt.rel_tol = problem.precision.ode_rel_tol;
    opt.max_step = 0.1;
    opt.initial_step = 0.01;
    y = ode::integrate(rhs, std::move(y), 0.0, std::log(radius) - std::log(setup.r0), opt,
                       stats);
    return detail::frame_solve(problem, setup, theta0, y);
  }
}

} // namespace wildstokes::numap
