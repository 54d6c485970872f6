#pragma once

// isoflow.hpp
// Integration of the isomonodromy equation dB = [B, ad^{-1}_{A0}[dA0, B]]
// along piecewise-linear paths and loops in the space of regular Cartan
// elements, with conservation monitoring, flatness/holonomy helpers and the
// endpoint Stokes-data comparison.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/liecore.hpp"
#include "wildstokes/numap.hpp"
#include "wildstokes/ode.hpp"
#include "wildstokes/stokescomb.hpp"

namespace wildstokes::isoflow {

using liecore::CartanElement;
using liecore::ComplexMatrix;

/// Piecewise-linear path in diag-coordinates. Every interpolated point must
/// stay regular with margin >= wall_clearance (relative to the waypoint scale).
struct PathSpec {
  std::vector<CartanElement> waypoints;
  double wall_clearance = 1e-3;

  bool closed() const {
    if (waypoints.size() < 2) return true;
    return (waypoints.front().diag - waypoints.back().diag).cwiseAbs().maxCoeff() == 0.0;
  }

  int dim() const { return waypoints.empty() ? 0 : waypoints.front().dim(); }

  int segments() const { return std::max<int>(0, static_cast<int>(waypoints.size()) - 1); }

  /// Point at global parameter t in [0,1] (uniform parameter per segment).
  CartanElement at(double t) const {
    const int segs = segments();
    if (segs == 0) return waypoints.at(0);
    double s = std::clamp(t, 0.0, 1.0) * segs;
    int seg = std::min(static_cast<int>(s), segs - 1);
    double local = s - seg;
    CartanElement p;
    p.diag = (1.0 - local) * waypoints[seg].diag + local * waypoints[seg + 1].diag;
    return p;
  }

  /// Velocity dA0/dt on segment seg (constant per segment, global parameter).
  CartanElement velocity(int seg) const {
    CartanElement v;
    v.diag = (waypoints[seg + 1].diag - waypoints[seg].diag) * static_cast<double>(segments());
    return v;
  }

  double scale() const {
    double s = 0.0;
    for (const auto& w : waypoints) s = std::max(s, w.diag.cwiseAbs().maxCoeff());
    return s;
  }
};

struct FlowState {
  double t = 0.0;
  CartanElement a0;
  ComplexMatrix b;
};

/// The isomonodromy vector field [B, ad^{-1}_{A0} [dA0, B]].
inline ComplexMatrix vector_field(const CartanElement& a0, const CartanElement& da0,
                                  const ComplexMatrix& b) {
  ComplexMatrix bracket = liecore::commutator(da0.matrix(), b);
  ComplexMatrix lifted = liecore::ad_inverse(a0, bracket);
  return liecore::commutator(b, lifted);
}

struct FlowResult {
  ComplexMatrix b_final;
  double max_spectrum_drift = 0.0; // vs initial elementary symmetric functions
  double max_diag_drift = 0.0;     // vs initial diag(B)
  double min_clearance = std::numeric_limits<double>::infinity();
  long steps = 0;
};

namespace detail {

inline void require_clearance(const PathSpec& path) {
  if (path.waypoints.empty()) throw malformed_input_error("empty path");
  const double clearance = path.wall_clearance * std::max(path.scale(), 1e-300);
  const int samples_per_segment = 1000;
  const int segs = std::max(path.segments(), 1);
  for (int i = 0; i <= segs * samples_per_segment; ++i) {
    double t = static_cast<double>(i) / (segs * samples_per_segment);
    double gap = liecore::min_eigenvalue_gap(path.at(t));
    if (!(gap >= clearance)) {
      std::ostringstream msg;
      msg << "path approaches a wall: min |alpha(A0(t))| = " << gap << " < clearance "
          << clearance << " near t = " << t;
      throw path_error(msg.str());
    }
  }
}

} // namespace detail

/// Integrate the flow along the path; conserved quantities (spectrum and
/// diagonal of B) are monitored on every accepted step.
inline FlowResult integrate_flow(const PathSpec& path, const ComplexMatrix& b0, double tol = 1e-10) {
  if (!(tol > 0)) throw malformed_input_error("tolerance must be positive");
  detail::require_clearance(path);
  const double clearance = path.wall_clearance * std::max(path.scale(), 1e-300);

  FlowResult result;
  result.b_final = b0;
  if (path.segments() == 0) return result;

  std::vector<Complex> invariants0 = liecore::elementary_symmetric_spectrum(b0);
  Eigen::VectorXcd diag0 = b0.diagonal();

  ode::Options opt;
  opt.rel_tol = tol;
  opt.max_step = 0.05;
  opt.initial_step = 1e-3;
  ode::Stats stats;

  for (int seg = 0; seg < path.segments(); ++seg) {
    CartanElement da0 = path.velocity(seg);
    double t_lo = static_cast<double>(seg) / path.segments();
    auto rhs = [&](double t, const ode::State& state) -> ode::State {
      CartanElement a0 = path.at(t_lo + t / path.segments());
      return vector_field(a0, da0, state) / static_cast<double>(path.segments());
    };
    auto monitor = [&](double t, const ode::State& state) {
      CartanElement a0 = path.at(t_lo + t / path.segments());
      double gap = liecore::min_eigenvalue_gap(a0);
      result.min_clearance = std::min(result.min_clearance, gap);
      if (!(gap >= clearance)) throw path_error("flow stepped below wall clearance");
      result.max_diag_drift = std::max(
          result.max_diag_drift,
          (Eigen::VectorXcd(state.diagonal()) - diag0).cwiseAbs().maxCoeff());
    };
    result.b_final =
        ode::integrate(rhs, std::move(result.b_final), 0.0, 1.0, opt, &stats, monitor);
  }
  result.steps = stats.accepted;

  std::vector<Complex> invariants1 = liecore::elementary_symmetric_spectrum(result.b_final);
  for (std::size_t k = 0; k < invariants0.size(); ++k)
    result.max_spectrum_drift =
        std::max(result.max_spectrum_drift, std::abs(invariants0[k] - invariants1[k]));
  result.max_diag_drift = std::max(
      result.max_diag_drift,
      (Eigen::VectorXcd(result.b_final.diagonal()) - diag0).cwiseAbs().maxCoeff());
  return result;
}

inline ComplexMatrix integrate(const PathSpec& path, const ComplexMatrix& b0, double tol = 1e-10) {
  return integrate_flow(path, b0, tol).b_final;
}

/// Holonomy of a closed path: the image of B0 under the loop. The induced map
/// is the pure braid group action on the B-side of the correspondence.
inline ComplexMatrix loop_action(const PathSpec& loop, const ComplexMatrix& b0, double tol = 1e-10) {
  if (!loop.closed()) throw malformed_input_error("loop_action requires first waypoint == last");
  return integrate(loop, b0, tol);
}

// ---------------------------------------------------------------------------
// Isomonodromy verification: Stokes data is constant along chamber-internal
// paths.
// ---------------------------------------------------------------------------

struct IsomonodromyReport {
  bool passed = false;
  double max_factor_deviation = 0.0;
  double lambda_deviation = 0.0;
  int directions = 0;
};

namespace detail {

/// Continuous track of one singular direction along a chamber-internal path:
/// its (stable) support set and its angle unwrapped along the path.
struct DirectionTrack {
  std::vector<stokescomb::Root> support;
  double continuous_angle = 0.0;
};

inline double wrap_to_pm_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a > kPi) a -= kTwoPi;
  if (a <= -kPi) a += kTwoPi;
  return a;
}

/// Probe the path densely, verify the chamber stays intact (constant
/// direction count, no near-collisions, stable supports) and unwrap each
/// direction's angle continuously. Tracks are indexed like the directions of
/// the starting configuration.
inline std::vector<DirectionTrack> track_directions(const PathSpec& path) {
  const int probes = 200 * std::max(path.segments(), 1);
  std::vector<DirectionTrack> tracks;
  for (int i = 0; i <= probes; ++i) {
    double t = static_cast<double>(i) / probes;
    auto dirs = stokescomb::singular_directions(path.at(t));
    double min_sep = kTwoPi;
    for (std::size_t a = 0; a < dirs.size(); ++a) {
      double next = (a + 1 < dirs.size()) ? dirs[a + 1].angle : dirs[0].angle + kTwoPi;
      min_sep = std::min(min_sep, next - dirs[a].angle);
    }
    if (dirs.size() > 1 && min_sep < 10.0 * kAngleClusterTol)
      throw chamber_error("two singular directions pass within the clustering tolerance");

    if (i == 0) {
      for (const auto& d : dirs) tracks.push_back({d.support, d.angle});
      continue;
    }
    if (dirs.size() != tracks.size())
      throw chamber_error("singular directions collide along the path");
    for (auto& track : tracks) {
      bool found = false;
      for (const auto& d : dirs)
        if (d.support == track.support) {
          track.continuous_angle += wrap_to_pm_pi(d.angle - track.continuous_angle);
          found = true;
          break;
        }
      if (!found) throw chamber_error("direction support sets changed along the path");
    }
  }
  return tracks;
}

} // namespace detail

/// Flow B along the path, compute nu at both endpoints and compare Stokes
/// factors entrywise. Direction labels are tracked continuously along the
/// path (by support set, angles unwrapped); when a tracked direction winds
/// around relative to the endpoint's canonical branch, the measured factor
/// is pulled back by the formal monodromy twist
///   K(theta + 2 pi w) = e^{-2 pi i w Lambda} K(theta) e^{2 pi i w Lambda}
/// before comparing. Deviations are relative to the factor's entry scale.
inline IsomonodromyReport isomonodromy_check(const PathSpec& path, const ComplexMatrix& b0,
                                             const numap::Precision& precision = {},
                                             double flow_tol = 1e-10) {
  std::vector<detail::DirectionTrack> tracks = detail::track_directions(path);

  numap::ConnectionProblem start{path.at(0.0), b0, precision};
  numap::NuResult nu_start = numap::nu(start);

  ComplexMatrix b1 = integrate(path, b0, flow_tol);
  numap::ConnectionProblem end{path.at(1.0), b1, precision};

  // Anchor the far end at the sector whose lower boundary carries the same
  // support set as the starting base sector.
  auto end_sectors = stokescomb::sector_decomposition(end.a0);
  int base_end = -1;
  const auto& base_support = nu_start.sectors.directions[nu_start.base_sector].support;
  for (int j = 0; j < end_sectors.count(); ++j)
    if (end_sectors.directions[j].support == base_support) {
      base_end = j;
      break;
    }
  if (base_end < 0) throw chamber_error("direction support sets changed between endpoints");
  numap::NuResult nu_end = numap::nu(end, base_end);

  IsomonodromyReport report;
  report.directions = nu_start.sectors.count();
  if (nu_end.sectors.count() != nu_start.sectors.count())
    throw chamber_error("direction count changed between endpoints");

  // measurement angle of direction j in a nu run: the lift of its canonical
  // angle into (mid(base), mid(base) + 2 pi)
  auto measurement_angle = [](const numap::NuResult& result, int j) {
    double mid = result.sectors.sector_midpoint(result.base_sector);
    double mu = result.sectors.directions[j].angle;
    while (mu <= mid) mu += kTwoPi;
    return mu;
  };

  const int n = nu_start.bundle.lambda.dim();
  for (int i = 0; i < nu_start.sectors.count(); ++i) {
    const auto& dir_s = nu_start.sectors.directions[i];
    int match = -1;
    for (int j = 0; j < nu_end.sectors.count(); ++j)
      if (nu_end.sectors.directions[j].support == dir_s.support) {
        match = j;
        break;
      }
    if (match < 0) throw chamber_error("direction support sets changed between endpoints");

    const detail::DirectionTrack* track = nullptr;
    for (const auto& t : tracks)
      if (t.support == dir_s.support) {
        track = &t;
        break;
      }
    if (!track) throw chamber_error("tracked direction lost along the path");

    double delta = track->continuous_angle - dir_s.angle;
    double mu_s = measurement_angle(nu_start, i);
    double mu_e = measurement_angle(nu_end, match);
    double winding = (mu_s + delta - mu_e) / kTwoPi;
    long w = std::lround(winding);
    if (std::abs(winding - static_cast<double>(w)) > 1e-6)
      throw chamber_error("direction winding is not an integer number of turns");

    ComplexMatrix k_end = nu_end.bundle.factors[match];
    if (w != 0) {
      const auto& lambda = nu_end.bundle.lambda.diag;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          if (p != q)
            k_end(p, q) *= std::exp(Complex(0, -kTwoPi * w) * (lambda[p] - lambda[q]));
    }
    double scale = std::max(1.0, nu_start.bundle.factors[i].cwiseAbs().maxCoeff());
    double dev = (nu_start.bundle.factors[i] - k_end).cwiseAbs().maxCoeff() / scale;
    report.max_factor_deviation = std::max(report.max_factor_deviation, dev);
  }
  report.lambda_deviation =
      (nu_start.bundle.lambda.diag - nu_end.bundle.lambda.diag).cwiseAbs().maxCoeff();
  report.passed = report.max_factor_deviation < 1e-6;
  return report;
}

} // namespace wildstokes::isoflow
