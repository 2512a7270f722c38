#include "flocksim/digraph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace flocksim {

Digraph::Digraph(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Digraph: vertex count must be positive");
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
}

void Digraph::check_vertex(int v, const char* what) const {
  if (v < 0 || v >= n_) {
    throw std::invalid_argument(std::string("Digraph: ") + what + " vertex out of range");
  }
}

void Digraph::add_edge(int from, int to) {
  check_vertex(from, "edge source");
  check_vertex(to, "edge target");
  adj_[static_cast<std::size_t>(from) * n_ + to] = 1;
}

bool Digraph::has_edge(int from, int to) const {
  check_vertex(from, "edge source");
  check_vertex(to, "edge target");
  return adj_[static_cast<std::size_t>(from) * n_ + to] != 0;
}

void Digraph::add_all_self_loops() {
  for (int v = 0; v < n_; ++v) adj_[static_cast<std::size_t>(v) * n_ + v] = 1;
}

bool Digraph::has_all_self_loops() const {
  for (int v = 0; v < n_; ++v) {
    if (!adj_[static_cast<std::size_t>(v) * n_ + v]) return false;
  }
  return true;
}

std::vector<std::pair<int, int>> Digraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int from = 0; from < n_; ++from) {
    for (int to = 0; to < n_; ++to) {
      if (adj_[static_cast<std::size_t>(from) * n_ + to]) out.emplace_back(from, to);
    }
  }
  return out;
}

int Digraph::edge_count() const {
  int c = 0;
  for (char v : adj_) c += (v != 0);
  return c;
}

bool has_spanning_tree(const Digraph& g) {
  const int n = g.size();
  if (n == 0) throw std::invalid_argument("has_spanning_tree: empty graph");
  std::vector<int> stack;
  std::vector<char> seen(n);
  for (int root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[root] = 1;
    stack.assign(1, root);
    int reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (v == u || seen[v] || !g.has_edge(u, v)) continue;
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
    if (reached == n) return true;
  }
  return false;
}

Digraph union_graphs(const std::vector<Digraph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("union_graphs: empty list");
  const int n = graphs.front().size();
  Digraph out(n);
  for (const Digraph& g : graphs) {
    if (g.size() != n) {
      throw std::invalid_argument("union_graphs: vertex-count mismatch");
    }
    for (int from = 0; from < n; ++from) {
      for (int to = 0; to < n; ++to) {
        if (g.has_edge(from, to)) out.add_edge(from, to);
      }
    }
  }
  return out;
}

DenseMatrix adjacency_matrix(const Digraph& g) {
  const int n = g.size();
  DenseMatrix chi(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.has_edge(j, i)) chi.at(i, j) = 1.0;
    }
  }
  return chi;
}

}  // namespace flocksim
