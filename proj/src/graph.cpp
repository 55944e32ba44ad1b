#include "fdla/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>

namespace fdla {

Graph Graph::from_edge_list(int n, const std::vector<Edge>& pairs) {
  if (n <= 0) throw std::invalid_argument("graph: agent count must be positive");
  Graph g;
  g.n_ = n;
  g.nbrs_.assign(n, {});
  for (int i = 0; i < n; ++i) g.nbrs_[i].push_back(i);
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::out_of_range("graph: edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range for n = " + std::to_string(n));
    if (i == j) continue;
    g.nbrs_[i].push_back(j);
    g.nbrs_[j].push_back(i);
  }
  for (auto& nb : g.nbrs_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

Graph Graph::complete(int n) {
  std::vector<Edge> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return from_edge_list(n, pairs);
}

Graph Graph::path(int n) {
  std::vector<Edge> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return from_edge_list(n, pairs);
}

bool Graph::has_edge(int i, int j) const {
  const auto& nb = nbrs_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<int> Graph::proper_neighbors(int i) const {
  std::vector<int> out;
  out.reserve(nbrs_[i].size());
  for (int j : nbrs_[i])
    if (j != i) out.push_back(j);
  return out;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < n_; ++i)
    for (int j : nbrs_[i])
      if (j > i) out.emplace_back(i, j);
  return out;
}

std::size_t Graph::num_edges() const {
  std::size_t total = 0;
  for (int i = 0; i < n_; ++i) total += nbrs_[i].size() - 1;
  return total / 2;
}

bool Graph::is_connected() const {
  if (n_ == 0) return false;
  std::vector<char> seen(n_, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : nbrs_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n_;
}

Graph Graph::relabeled(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_)
    throw std::invalid_argument("graph: permutation size mismatch");
  std::vector<Edge> pairs;
  for (auto [i, j] : edges()) pairs.emplace_back(perm[i], perm[j]);
  return from_edge_list(n_, pairs);
}

Graph er_random(int n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("er_random: p must lie in [0, 1]");
  std::mt19937_64 gen(seed);
  std::vector<Edge> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // 53-bit uniform in [0, 1); avoids library-specific distribution code.
      double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      if (u < p) pairs.emplace_back(i, j);
    }
  }
  return Graph::from_edge_list(n, pairs);
}

Graph add_agents(const Graph& g, int new_count, const std::vector<Edge>& attach_pairs,
                 bool require_connected) {
  if (new_count < 0) throw std::invalid_argument("add_agents: negative count");
  std::vector<Edge> pairs = g.edges();
  pairs.insert(pairs.end(), attach_pairs.begin(), attach_pairs.end());
  Graph out = Graph::from_edge_list(g.size() + new_count, pairs);
  if (require_connected && !out.is_connected())
    throw std::invalid_argument("add_agents: resulting graph is disconnected");
  return out;
}

Graph read_graph(std::istream& in) {
  int n = 0;
  if (!(in >> n)) throw std::runtime_error("graph file: missing agent count");
  std::vector<Edge> pairs;
  long long i = 0, j = 0;
  while (in >> i) {
    if (!(in >> j)) throw std::runtime_error("graph file: dangling index");
    if (i < 1 || i > n || j < 1 || j > n)
      throw std::out_of_range("graph file: index out of range 1.." + std::to_string(n));
    pairs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
  }
  if (!in.eof()) throw std::runtime_error("graph file: malformed entry");
  return Graph::from_edge_list(n, pairs);
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.size() << '\n';
  for (auto [i, j] : g.edges()) out << i + 1 << ' ' << j + 1 << '\n';
}

}  // namespace fdla
