#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fdla {

using Edge = std::pair<int, int>;

/// Undirected communication graph over agents 0..n-1.
///
/// Every agent is its own neighbour: neighbors(i) always contains i. The
/// proper neighbourhood (without i) and the degree d_i = |proper_neighbors(i)|
/// are exposed separately so that weight formulas never have to guess which
/// convention is meant.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from 0-based non-self pairs. Self-loops are implied,
  /// duplicates and reversed pairs collapse, and explicit (i,i) pairs are
  /// accepted and ignored.
  static Graph from_edge_list(int n, const std::vector<Edge>& pairs);

  /// Complete graph K_n.
  static Graph complete(int n);

  /// Path 0-1-...-(n-1).
  static Graph path(int n);

  int size() const { return n_; }

  bool has_edge(int i, int j) const;

  /// N_i, sorted, including i itself.
  const std::vector<int>& neighbors(int i) const { return nbrs_[i]; }

  /// N_i without i, sorted.
  std::vector<int> proper_neighbors(int i) const;

  int degree(int i) const { return static_cast<int>(nbrs_[i].size()) - 1; }

  /// Unordered non-self edges (i < j), lexicographic.
  std::vector<Edge> edges() const;

  std::size_t num_edges() const;

  bool is_connected() const;

  /// Same topology with vertex v renamed to perm[v].
  Graph relabeled(const std::vector<int>& perm) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.nbrs_ == b.nbrs_;
  }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> nbrs_;
};

/// Erdős–Rényi G(n, p): every pair (i<j), visited in lexicographic order,
/// is kept when one uniform draw from a seeded mt19937_64 falls below p.
Graph er_random(int n, double p, std::uint64_t seed);

/// Grows g by new_count agents (indices n..n+new_count-1) and the given
/// 0-based attachment pairs. Throws if require_connected and the result is
/// disconnected.
Graph add_agents(const Graph& g, int new_count, const std::vector<Edge>& attach_pairs,
                 bool require_connected = false);

/// Text format: first token n, then 1-based "i j" pairs (non-self edges).
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace fdla
