#pragma once

// kmgraphs.hpp
// Supernova / complete k-partite graph constructions and the Kac-Moody
// machinery attached to a simply-laced graph: Cartan matrices, simple
// reflections, root classification and recognition of the three affine
// diagrams carrying second order Painleve equations. All lattice arithmetic
// is exact (64-bit integers).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "wildstokes/common.hpp"

namespace wildstokes::kmgraphs {

using Int = std::int64_t;
using IntVector = std::vector<Int>;
using IntMatrix = std::vector<IntVector>;

/// Weakly decreasing positive parts.
struct Partition {
  std::vector<int> parts;

  explicit Partition(std::vector<int> p) : parts(std::move(p)) {
    if (parts.empty()) throw malformed_input_error("partition needs at least one part");
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k] <= 0) throw malformed_input_error("partition parts must be positive");
      if (k > 0 && parts[k] > parts[k - 1])
        throw malformed_input_error("partition parts must be weakly decreasing");
    }
  }

  int sum() const { return std::accumulate(parts.begin(), parts.end(), 0); }
  int count() const { return static_cast<int>(parts.size()); }
};

/// Simple undirected graph on n vertices.
struct Graph {
  int n = 0;
  std::vector<std::vector<bool>> adj;

  explicit Graph(int n_ = 0) : n(n_), adj(n_, std::vector<bool>(n_, false)) {}

  void add_edge(int a, int b) {
    if (a == b) throw malformed_input_error("no self loops");
    adj[a][b] = adj[b][a] = true;
  }

  int degree(int v) const {
    int d = 0;
    for (int w = 0; w < n; ++w)
      if (adj[v][w]) ++d;
    return d;
  }

  int edge_count() const {
    int e = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (adj[a][b]) ++e;
    return e;
  }
};

/// Complete multipartite graph: vertices grouped by part, edges exactly
/// between distinct parts.
struct CompleteMultipartiteGraph {
  Partition partition;
  Graph graph;

  explicit CompleteMultipartiteGraph(Partition p) : partition(std::move(p)), graph(partition.sum()) {
    std::vector<int> part_of;
    for (int k = 0; k < partition.count(); ++k)
      for (int j = 0; j < partition.parts[k]; ++j) part_of.push_back(k);
    for (int a = 0; a < graph.n; ++a)
      for (int b = a + 1; b < graph.n; ++b)
        if (part_of[a] != part_of[b]) graph.add_edge(a, b);
  }
};

inline CompleteMultipartiteGraph graph_from_partition(const Partition& p) {
  return CompleteMultipartiteGraph(p);
}

/// All partitions of n, parts weakly decreasing, lexicographically descending.
inline std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  std::vector<int> current;
  std::function<void(int, int)> recurse = [&](int rest, int max_part) {
    if (rest == 0) {
      out.push_back(Partition(current));
      return;
    }
    for (int next = std::min(rest, max_part); next >= 1; --next) {
      current.push_back(next);
      recurse(rest - next, next);
      current.pop_back();
    }
  };
  recurse(n, n);
  return out;
}

/// One complete multipartite graph per partition of every N <= n_max.
/// Exclusions follow the figure conventions: one-part partitions give the
/// totally disconnected duals Gamma(n); (1, n)-shaped partitions give the
/// stars Gamma(1, n).
inline std::vector<CompleteMultipartiteGraph> enumerate_graphs(int n_max, bool exclude_stars,
                                                               bool exclude_discrete) {
  if (n_max < 1) throw malformed_input_error("n_max must be >= 1");
  std::vector<CompleteMultipartiteGraph> out;
  for (int n = 1; n <= n_max; ++n)
    for (const Partition& p : partitions_of(n)) {
      if (exclude_discrete && p.count() == 1) continue;
      if (exclude_stars && p.count() == 2 && p.parts[1] == 1) continue;
      out.push_back(graph_from_partition(p));
    }
  return out;
}

/// Generalized (symmetric, simply-laced) Cartan matrix 2 I - adjacency.
struct CartanMatrix {
  IntMatrix c;

  int size() const { return static_cast<int>(c.size()); }

  IntVector apply(const IntVector& v) const {
    const int n = size();
    IntVector out(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i] += c[i][j] * v[j];
    return out;
  }

  /// Bilinear form (v, w)_C = v^T C w.
  Int form(const IntVector& v, const IntVector& w) const {
    Int s = 0;
    IntVector cw = apply(w);
    for (int i = 0; i < size(); ++i) s += v[i] * cw[i];
    return s;
  }
};

inline CartanMatrix cartan_matrix(const Graph& g) {
  CartanMatrix cm;
  cm.c.assign(g.n, IntVector(g.n, 0));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) cm.c[i][j] = (i == j) ? 2 : (g.adj[i][j] ? -1 : 0);
  return cm;
}

inline CartanMatrix cartan_matrix(const CompleteMultipartiteGraph& g) {
  return cartan_matrix(g.graph);
}

/// Simple reflection r_i(v) = v - <v, alpha_i^vee> e_i = v - (C v)_i e_i.
inline IntVector reflect(const IntVector& v, int i, const CartanMatrix& c) {
  if (i < 0 || i >= c.size()) throw malformed_input_error("reflection index out of range");
  IntVector out = v;
  Int pairing = 0;
  for (int j = 0; j < c.size(); ++j) pairing += c.c[i][j] * v[j];
  out[i] -= pairing;
  return out;
}

enum class RootClass { real_root, imaginary_root, not_root };

namespace detail {

inline bool connected_support(const IntVector& v, const Graph& g) {
  std::vector<int> support;
  for (int i = 0; i < g.n; ++i)
    if (v[i] != 0) support.push_back(i);
  if (support.empty()) return false;
  std::set<int> seen{support.front()};
  std::vector<int> stack{support.front()};
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (int b : support)
      if (!seen.count(b) && g.adj[a][b]) {
        seen.insert(b);
        stack.push_back(b);
      }
  }
  return seen.size() == support.size();
}

inline bool is_unit_vector(const IntVector& v) {
  int ones = 0;
  for (Int x : v) {
    if (x == 1) ++ones;
    else if (x != 0) return false;
  }
  return ones == 1;
}

} // namespace detail

/// Kac-Moody root classification by greedy height descent: reflect at a
/// vertex with positive pairing until reaching a simple root (real root), a
/// vector in the fundamental imaginary cone with connected support
/// (imaginary root), or a sign-indefinite vector (not a root).
inline RootClass root_classify(IntVector v, const CartanMatrix& c, const Graph& g) {
  const int n = c.size();
  if (static_cast<int>(v.size()) != n) throw malformed_input_error("vector/matrix size mismatch");
  bool any_pos = false, any_neg = false, any_nonzero = false;
  for (Int x : v) {
    any_nonzero |= (x != 0);
    any_pos |= (x > 0);
    any_neg |= (x < 0);
  }
  if (!any_nonzero) throw malformed_input_error("root_classify: zero vector");
  if (any_pos && any_neg) return RootClass::not_root;
  if (any_neg)
    for (Int& x : v) x = -x; // roots come in opposite pairs

  for (long guard = 0; guard < 100000; ++guard) {
    if (detail::is_unit_vector(v)) return RootClass::real_root;
    IntVector pairings = c.apply(v);
    int pivot = -1;
    Int best = 0;
    for (int i = 0; i < n; ++i)
      if (pairings[i] > best) {
        best = pairings[i];
        pivot = i;
      }
    if (pivot < 0) {
      // fundamental imaginary cone: all pairings <= 0
      return detail::connected_support(v, g) ? RootClass::imaginary_root : RootClass::not_root;
    }
    v[pivot] -= best; // height strictly decreases
    if (v[pivot] < 0) return RootClass::not_root;
  }
  throw error("root_classify failed to terminate");
}

inline RootClass root_classify(const IntVector& v, const CompleteMultipartiteGraph& g) {
  return root_classify(v, cartan_matrix(g), g.graph);
}

// ---------------------------------------------------------------------------
// Painleve diagram recognition
// ---------------------------------------------------------------------------

enum class Painleve { IV, V, VI, none };

inline const char* to_string(Painleve p) {
  switch (p) {
    case Painleve::IV: return "IV";
    case Painleve::V: return "V";
    case Painleve::VI: return "VI";
    default: return "none";
  }
}

namespace detail {

/// Brute-force isomorphism over vertex permutations; recognition targets
/// have at most 8 vertices.
inline bool isomorphic(const Graph& a, const Graph& b) {
  if (a.n != b.n || a.edge_count() != b.edge_count()) return false;
  if (a.n > 8) throw unsupported_scale_error("graph isomorphism limited to 8 vertices");
  std::vector<int> da, db;
  for (int v = 0; v < a.n; ++v) da.push_back(a.degree(v));
  for (int v = 0; v < b.n; ++v) db.push_back(b.degree(v));
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db) return false;

  std::vector<int> perm(a.n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool match = true;
    for (int x = 0; x < a.n && match; ++x)
      for (int y = x + 1; y < a.n && match; ++y)
        if (a.adj[x][y] != b.adj[perm[x]][perm[y]]) match = false;
    if (match) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline Graph cycle_graph(int n) {
  Graph g(n);
  for (int k = 0; k < n; ++k) g.add_edge(k, (k + 1) % n);
  return g;
}

inline Graph star_graph(int rays) {
  Graph g(rays + 1);
  for (int k = 1; k <= rays; ++k) g.add_edge(0, k);
  return g;
}

} // namespace detail

/// IV for the triangle (affine A2), V for the square (affine A3), VI for the
/// four-pointed star (affine D4); none otherwise -- e.g. the pentagon is not
/// complete multipartite and carries no second order Painleve equation.
inline Painleve painleve_recognize(const Graph& g) {
  if (g.n == 3 && detail::isomorphic(g, detail::cycle_graph(3))) return Painleve::IV;
  if (g.n == 4 && detail::isomorphic(g, detail::cycle_graph(4))) return Painleve::V;
  if (g.n == 5 && detail::isomorphic(g, detail::star_graph(4))) return Painleve::VI;
  return Painleve::none;
}

inline Painleve painleve_recognize(const CompleteMultipartiteGraph& g) {
  return painleve_recognize(g.graph);
}

// ---------------------------------------------------------------------------
// Exact integer kernel (fraction-free elimination), used by the affine
// diagram checks to verify null vectors.
// ---------------------------------------------------------------------------

/// Rank of an integer matrix by fraction-free Gaussian elimination over
/// rationals represented as exact integer rows (Bareiss-style with gcd
/// normalization; matrices here are tiny).
inline int integer_rank(IntMatrix m) {
  const int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[rank], m[pivot]);
    for (int r = rank + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      Int a = m[rank][col], b = m[r][col];
      Int g = std::gcd(a, b);
      Int fa = b / g, fb = a / g;
      for (int cc = 0; cc < cols; ++cc) m[r][cc] = m[r][cc] * fb - m[rank][cc] * fa;
      // keep entries small
      Int rowgcd = 0;
      for (int cc = 0; cc < cols; ++cc) rowgcd = std::gcd(rowgcd, std::abs(m[r][cc]));
      if (rowgcd > 1)
        for (int cc = 0; cc < cols; ++cc) m[r][cc] /= rowgcd;
    }
    ++rank;
  }
  return rank;
}

inline bool is_null_vector(const CartanMatrix& c, const IntVector& v) {
  IntVector image = c.apply(v);
  return std::all_of(image.begin(), image.end(), [](Int x) { return x == 0; });
}

} // namespace wildstokes::kmgraphs
