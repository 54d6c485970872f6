#pragma once

// selftest.hpp
// Condensed cross-module invariant suite behind the `selftest` task: one
// quick deterministic pass over the identities every module is built on.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wildstokes/curves.hpp"
#include "wildstokes/dualpoisson.hpp"
#include "wildstokes/isoflow.hpp"
#include "wildstokes/kmgraphs.hpp"
#include "wildstokes/liecore.hpp"
#include "wildstokes/numap.hpp"
#include "wildstokes/rng.hpp"
#include "wildstokes/springer.hpp"
#include "wildstokes/stokescomb.hpp"

namespace wildstokes::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline liecore::CartanElement collinear_cartan(Rng& rng, int n) {
  double phase = kTwoPi * rng.uniform();
  liecore::CartanElement a0;
  a0.diag.resize(n);
  double base = 0.0;
  for (int k = 0; k < n; ++k) {
    base += 0.7 + 1.3 * rng.uniform();
    a0.diag[k] = std::polar(1.0, phase) * base;
  }
  return a0;
}

inline kmgraphs::Graph pentagon() {
  kmgraphs::Graph g(5);
  for (int k = 0; k < 5; ++k) g.add_edge(k, (k + 1) % 5);
  return g;
}

} // namespace detail

inline Report run(std::uint64_t seed) {
  Report report;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    CheckResult r;
    r.name = name;
    try {
      auto [ok, detail] = fn();
      r.passed = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    report.checks.push_back(std::move(r));
  };

  Rng rng(seed);

  check("liecore.ad_inverse_identity", [&] {
    liecore::CartanElement a0 = detail::collinear_cartan(rng, 3);
    liecore::ComplexMatrix x = rng.complex_gaussian_matrix(3);
    liecore::ComplexMatrix y = liecore::ad_inverse(a0, x);
    double dev = (liecore::commutator(a0.matrix(), y) - liecore::offdiagonal_part(x))
                     .cwiseAbs()
                     .maxCoeff();
    std::ostringstream d;
    d << "max deviation " << dev;
    return std::make_pair(dev < 1e-12, d.str());
  });

  check("stokescomb.antipodal_partition", [&] {
    for (int n = 2; n <= 5; ++n) {
      liecore::CartanElement a0;
      a0.diag.resize(n);
      for (int k = 0; k < n; ++k) a0.diag[k] = rng.complex_gaussian();
      if (!liecore::is_regular(a0, liecore::default_regularity_tol(a0))) continue;
      auto dirs = stokescomb::singular_directions(a0);
      if (dirs.size() % 2 != 0) return std::make_pair(false, std::string("odd direction count"));
      std::size_t total = 0;
      for (const auto& d : dirs) total += d.support.size();
      if (total != static_cast<std::size_t>(n * (n - 1)))
        return std::make_pair(false, std::string("support sizes do not partition the roots"));
    }
    return std::make_pair(true, std::string("n = 2..5"));
  });

  check("numap.eigenvalue_identity", [&] {
    liecore::CartanElement a0 = detail::collinear_cartan(rng, 2);
    liecore::ComplexMatrix b = rng.complex_gaussian_matrix(2);
    b *= 1.0 / b.norm();
    auto res = numap::nu(a0, b);
    auto target = res.spectrum_b;
    for (auto& l : target) l = std::exp(Complex(0, kTwoPi) * l);
    double dev = liecore::multiset_distance(res.spectrum_product, target);
    std::ostringstream d;
    d << "spectrum deviation " << dev;
    return std::make_pair(dev < 1e-6, d.str());
  });

  check("dualpoisson.diagonal_reciprocity", [&] {
    liecore::CartanElement a0 = detail::collinear_cartan(rng, 2);
    liecore::ComplexMatrix b = rng.complex_gaussian_matrix(2);
    b *= 0.7 / b.norm();
    auto res = numap::nu(a0, b);
    double dev = 0.0;
    for (int k = 0; k < 2; ++k)
      dev = std::max(dev,
                     std::abs(res.element.b_minus(k, k) * res.element.b_plus(k, k) - Complex(1, 0)));
    std::ostringstream d;
    d << "max |delta(b_-) delta(b_+) - 1| = " << dev;
    return std::make_pair(dev < 1e-13, d.str());
  });

  check("isoflow.conservation", [&] {
    double phase = kTwoPi * rng.uniform();
    auto mk = [&](double a, double b, double c) {
      liecore::CartanElement e;
      e.diag.resize(3);
      e.diag << std::polar(1.0, phase) * a, std::polar(1.0, phase) * b, std::polar(1.0, phase) * c;
      return e;
    };
    isoflow::PathSpec path;
    path.waypoints = {mk(0.0, 1.1, 2.5), mk(0.2, 1.35, 2.8)};
    liecore::ComplexMatrix b0 = rng.complex_gaussian_matrix(3);
    b0 *= 0.8 / b0.norm();
    auto flow = isoflow::integrate_flow(path, b0);
    std::ostringstream d;
    d << "spectrum drift " << flow.max_spectrum_drift << ", diag drift " << flow.max_diag_drift;
    return std::make_pair(flow.max_spectrum_drift < 1e-10 && flow.max_diag_drift < 1e-10, d.str());
  });

  check("kmgraphs.painleve_recognition", [&] {
    using namespace kmgraphs;
    bool ok = painleve_recognize(graph_from_partition(Partition({1, 1, 1}))) == Painleve::IV &&
              painleve_recognize(graph_from_partition(Partition({2, 2}))) == Painleve::V &&
              painleve_recognize(graph_from_partition(Partition({4, 1}))) == Painleve::VI &&
              painleve_recognize(detail::pentagon()) == Painleve::none;
    return std::make_pair(ok, std::string("IV/V/VI/pentagon"));
  });

  check("kmgraphs.enumeration_count", [&] {
    auto graphs = kmgraphs::enumerate_graphs(6, true, true);
    std::ostringstream d;
    d << graphs.size() << " graphs for N <= 6";
    return std::make_pair(graphs.size() == 18, d.str());
  });

  check("springer.diagram_commutes", [&] {
    auto rep = springer::diagram_check(3, 50, rng.uint64());
    std::ostringstream d;
    d << rep.failures << " failures, max deviation " << rep.max_deviation;
    return std::make_pair(rep.passed(), d.str());
  });

  check("curves.artifacts", [&] {
    auto curve = curves::genus_seven_curve();
    auto rep = curves::symmetry_check(curve);
    bool consts = curve.evaluate(curves::Rational(0), curves::Rational(0)) == curves::Rational(16);
    bool smooth = curves::elliptic_smoothness(curves::dubrovin_mazzocco_elliptic());
    return std::make_pair(rep.passed() && consts && smooth, std::string("symmetries + smoothness"));
  });

  return report;
}

} // namespace wildstokes::selftest
