#pragma once

#include <vector>

#include "flocksim/matrix.hpp"

namespace flocksim {

/// Directed communication graph on n vertices.  An edge (from, to) means
/// "vertex `to` receives information from vertex `from`".  Vertices are
/// 0-indexed throughout the C++ API; the JSON/CSV file formats use 1-indexed
/// vertices and the conversion happens at those boundaries only.
class Digraph {
public:
  Digraph() = default;
  explicit Digraph(int n);

  int size() const { return n_; }

  void add_edge(int from, int to);
  bool has_edge(int from, int to) const;

  /// Add the self-loop (v, v) at every vertex.
  void add_all_self_loops();

  /// True when every vertex carries its self-loop.
  bool has_all_self_loops() const;

  std::vector<std::pair<int, int>> edges() const;
  int edge_count() const;

private:
  int n_ = 0;
  std::vector<char> adj_;  // adj_[from * n_ + to]

  void check_vertex(int v, const char* what) const;
};

/// True when some root vertex reaches every other vertex along directed
/// edges.  Self-loops are ignored for reachability, so an isolated vertex
/// with only its self-loop is not reachable from anywhere else.
bool has_spanning_tree(const Digraph& g);

/// Edgewise union of a non-empty list of digraphs on a common vertex set.
/// Throws std::invalid_argument for an empty list or mismatched sizes.
Digraph union_graphs(const std::vector<Digraph>& graphs);

/// 0/1 adjacency matrix chi with chi(i, j) = 1 exactly when vertex i
/// receives from vertex j, i.e. when the edge (j, i) is present.
DenseMatrix adjacency_matrix(const Digraph& g);

}  // namespace flocksim
