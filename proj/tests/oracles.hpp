#pragma once

// oracles.hpp
// Test-only oracles, independent of the implementation paths they check.

#include <algorithm>
#include <set>
#include <vector>

#include "wildstokes/kmgraphs.hpp"
#include "wildstokes/liecore.hpp"

namespace oracles {

using wildstokes::Complex;

/// Brute-force isomonodromy vector field, computed entrywise from the raw
/// formula [B, Y]_ij with Y_pq = ([dA0,B])_pq / (a_p - a_q):
/// independent of liecore::ad_inverse / commutator helpers.
inline wildstokes::liecore::ComplexMatrix
vector_field_bruteforce(const wildstokes::liecore::CartanElement& a0,
                        const wildstokes::liecore::CartanElement& da0,
                        const wildstokes::liecore::ComplexMatrix& b) {
  const int n = a0.dim();
  wildstokes::liecore::ComplexMatrix bracket(n, n), lifted(n, n), out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      bracket(i, j) = da0.diag[i] * b(i, j) - b(i, j) * da0.diag[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      lifted(i, j) = (i == j) ? Complex(0, 0) : bracket(i, j) / (a0.diag[i] - a0.diag[j]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex s(0, 0);
      for (int k = 0; k < n; ++k) s += b(i, k) * lifted(k, j) - lifted(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

/// Bounded brute-force Kac-Moody root search: BFS over simple reflections
/// from the simple roots (real roots) and over the fundamental-cone test for
/// imaginary roots, up to the given height.
class RootOracle {
public:
  RootOracle(const wildstokes::kmgraphs::CartanMatrix& c, const wildstokes::kmgraphs::Graph& g,
             int max_height)
      : c_(c), graph_(g) {
    const int n = c.size();
    std::set<std::vector<wildstokes::kmgraphs::Int>> seen;
    std::vector<std::vector<wildstokes::kmgraphs::Int>> frontier;
    for (int i = 0; i < n; ++i) {
      std::vector<wildstokes::kmgraphs::Int> e(n, 0);
      e[i] = 1;
      frontier.push_back(e);
      seen.insert(e);
    }
    while (!frontier.empty()) {
      std::vector<std::vector<wildstokes::kmgraphs::Int>> next;
      for (const auto& v : frontier)
        for (int i = 0; i < n; ++i) {
          auto w = wildstokes::kmgraphs::reflect(v, i, c_);
          long long height = 0;
          bool positive = true;
          for (auto x : w) {
            height += x;
            positive &= (x >= 0);
          }
          if (!positive || height > max_height) continue;
          if (seen.insert(w).second) next.push_back(w);
        }
      frontier = std::move(next);
    }
    positive_real_roots_.assign(seen.begin(), seen.end());
  }

  bool is_real_root(std::vector<wildstokes::kmgraphs::Int> v) const {
    bool neg = std::all_of(v.begin(), v.end(), [](auto x) { return x <= 0; });
    if (neg)
      for (auto& x : v) x = -x;
    return std::binary_search(positive_real_roots_.begin(), positive_real_roots_.end(), v);
  }

  /// Imaginary iff some reflection orbit member lies in the fundamental
  /// cone with connected support; searched by height descent.
  bool is_imaginary_root(std::vector<wildstokes::kmgraphs::Int> v) const {
    bool neg = std::all_of(v.begin(), v.end(), [](auto x) { return x <= 0; });
    if (neg)
      for (auto& x : v) x = -x;
    if (std::any_of(v.begin(), v.end(), [](auto x) { return x < 0; })) return false;
    for (int guard = 0; guard < 10000; ++guard) {
      auto pairings = c_.apply(v);
      int pivot = -1;
      for (int i = 0; i < c_.size(); ++i)
        if (pairings[i] > 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) return connected_support(v);
      v[pivot] -= pairings[pivot];
      if (v[pivot] < 0) return false;
    }
    return false;
  }

private:
  bool connected_support(const std::vector<wildstokes::kmgraphs::Int>& v) const {
    std::vector<int> support;
    for (int i = 0; i < graph_.n; ++i)
      if (v[i] != 0) support.push_back(i);
    if (support.empty()) return false;
    std::set<int> seen{support.front()};
    std::vector<int> stack{support.front()};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b : support)
        if (!seen.count(b) && graph_.adj[a][b]) {
          seen.insert(b);
          stack.push_back(b);
        }
    }
    return seen.size() == support.size();
  }

  wildstokes::kmgraphs::CartanMatrix c_;
  wildstokes::kmgraphs::Graph graph_;
  std::vector<std::vector<wildstokes::kmgraphs::Int>> positive_real_roots_;
};

} // namespace oracles
