#pragma once

// stokescomb.hpp
// Combinatorics of irregular types at a second order pole: singular
// directions of A0, their supporting roots, sector decompositions and
// half-period positive systems.
//
// Directions are built per *line* through the origin: the n(n-1)/2 unordered
// index pairs are clustered by the angle of their pairing modulo pi, and each
// line cluster then contributes the two antipodal directions, each root going
// to the ray its pairing actually points along. This makes the antipodal
// support symmetry exact by construction rather than up to rounding.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/liecore.hpp"

namespace wildstokes::stokescomb {

using liecore::CartanElement;
using liecore::Root;

/// Polar part Q = A_r/z^r + ... + A_1/z. The order-two pole algorithms use
/// r = 1 with Q = -A0/z; higher orders are accepted for direction
/// combinatorics of the leading term only.
struct IrregularType {
  std::vector<CartanElement> coefficients; // index k holds A_{k+1}
  int order() const { return static_cast<int>(coefficients.size()); }
  const CartanElement& leading() const { return coefficients.back(); }
};

struct SingularDirection {
  double angle = 0.0;           // canonical representative in [0, 2pi)
  std::vector<Root> support;    // sorted lexicographically
};

struct SectorDecomposition {
  std::vector<SingularDirection> directions; // strictly increasing angle
  int count() const { return static_cast<int>(directions.size()); }

  /// Sector i is the open arc from direction i to direction i+1 (mod count).
  double sector_midpoint(int i) const {
    const int m = count();
    double lo = directions[i].angle;
    double hi = (i + 1 < m) ? directions[i + 1].angle : directions[0].angle + kTwoPi;
    return 0.5 * (lo + hi);
  }
};

inline double canonical_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a == kTwoPi) a = 0.0; // fmod can return the period itself
  return a;
}

namespace detail {

inline double circular_distance(double a, double b, double period) {
  double d = std::fabs(a - b);
  d = std::fmod(d, period);
  return std::min(d, period - d);
}

/// Union-find clustering of angles (mod `period`) under transitive closure of
/// pairwise proximity below tol.
inline std::vector<int> cluster_angles(const std::vector<double>& angles, double tol,
                                       double period) {
  const int m = static_cast<int>(angles.size());
  std::vector<int> parent(m);
  for (int k = 0; k < m; ++k) parent[k] = k;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (circular_distance(angles[a], angles[b], period) < tol) parent[find(a)] = find(b);
  std::vector<int> label(m);
  for (int k = 0; k < m; ++k) label[k] = find(k);
  return label;
}

} // namespace detail

/// Singular (anti-Stokes) directions of Q = -A0/z: the rays arg(alpha(A0))
/// for all roots alpha, with roots clustered onto shared rays.
inline std::vector<SingularDirection> singular_directions(const CartanElement& a0,
                                                          double tol_angle = kAngleClusterTol) {
  liecore::require_regular(a0, liecore::default_regularity_tol(a0));
  const int n = a0.dim();

  struct PairRay {
    int i, j;        // i < j
    double angle;    // arg(diag_i - diag_j) in [0, 2pi)
    double line;     // angle mod pi
  };
  std::vector<PairRay> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  std::vector<double> lines;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Complex w = a0.diag[i] - a0.diag[j];
      double ang = canonical_angle(std::arg(w));
      double line = std::fmod(ang, kPi);
      pairs.push_back({i, j, ang, line});
      lines.push_back(line);
    }

  std::vector<int> label = detail::cluster_angles(lines, tol_angle, kPi);

  // Group pairs by line cluster, splitting each cluster into the two
  // antipodal rays. Each unordered pair contributes alpha_ij to one side and
  // alpha_ji to the other, so supports negate exactly between the two rays.
  std::vector<SingularDirection> out;
  std::set<int> seen;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    int root_label = label[k];
    if (seen.count(root_label)) continue;
    seen.insert(root_label);

    std::vector<std::size_t> members;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      if (label[p] == root_label) members.push_back(p);

    // reference ray of the cluster: the first member's actual ray
    double ref = pairs[members.front()].angle;
    SingularDirection side0, side1; // side0 near ref, side1 antipodal
    for (std::size_t p : members) {
      bool near_ref = detail::circular_distance(pairs[p].angle, ref, kTwoPi) < kPi / 2;
      Root fwd(pairs[p].i, pairs[p].j);
      if (near_ref) {
        side0.support.push_back(fwd);
        side1.support.push_back(fwd.negated());
      } else {
        side1.support.push_back(fwd);
        side0.support.push_back(fwd.negated());
      }
    }
    for (SingularDirection* side : {&side0, &side1}) {
      std::sort(side->support.begin(), side->support.end());
      // representative angle: the ray of the smallest supporting root
      const Root& r = side->support.front();
      Complex w = a0.diag[r.i] - a0.diag[r.j];
      side->angle = canonical_angle(std::arg(w));
      out.push_back(std::move(*side));
    }
  }

  std::sort(out.begin(), out.end(), [](const SingularDirection& a, const SingularDirection& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.support.front() < b.support.front();
  });
  return out;
}

/// Directions of the leading coefficient of a general irregular type.
inline std::vector<SingularDirection> singular_directions(const IrregularType& q,
                                                          double tol_angle = kAngleClusterTol) {
  if (q.order() < 1) throw malformed_input_error("irregular type has no coefficients");
  return singular_directions(q.leading(), tol_angle);
}

/// R(d): the roots supported on a singular direction.
inline const std::vector<Root>& stokes_group_support(const SingularDirection& d) {
  return d.support;
}

inline SectorDecomposition sector_decomposition(const CartanElement& a0,
                                                double tol_angle = kAngleClusterTol) {
  SectorDecomposition dec;
  dec.directions = singular_directions(a0, tol_angle);
  return dec;
}

struct PositiveSystem {
  std::vector<Root> roots;                 // R_+, sorted
  std::vector<int> crossed;                // direction indices in crossing order
};

/// Walk counterclockwise from the base sector to its antipode; the crossed
/// directions support a positive system (one root per unordered pair).
inline PositiveSystem positive_system(const SectorDecomposition& sectors, int base_sector) {
  const int m = sectors.count();
  if (m == 0) throw malformed_input_error("empty sector decomposition");
  if (m % 2 != 0) throw malformed_input_error("direction count must be even");
  if (base_sector < 0 || base_sector >= m) throw malformed_input_error("base sector out of range");

  PositiveSystem sys;
  for (int step = 1; step <= m / 2; ++step) {
    int idx = (base_sector + step) % m;
    sys.crossed.push_back(idx);
    const auto& sup = sectors.directions[idx].support;
    sys.roots.insert(sys.roots.end(), sup.begin(), sup.end());
  }
  std::sort(sys.roots.begin(), sys.roots.end());
  return sys;
}

} // namespace wildstokes::stokescomb
