#pragma once

#include <string>
#include <vector>

#include "flocksim/digraph.hpp"

namespace flocksim {

/// A finite family of candidate communication graphs on a common vertex set
/// together with the probability of drawing each one at a switching instant.
struct GraphLibrary {
  std::vector<Digraph> graphs;
  std::vector<double> probabilities;

  int vertex_count() const { return graphs.empty() ? 0 : graphs.front().size(); }
  int graph_count() const { return static_cast<int>(graphs.size()); }
};

/// Validate the assumptions the simulator and certifier rely on:
///  - at least one graph, one probability per graph,
///  - all graphs share the vertex count,
///  - every graph has a self-loop at every vertex,
///  - probabilities are positive and sum to 1 within 1e-12,
///  - the union of all graphs has a spanning tree.
/// Returns a list of human-readable violations; empty means valid.
std::vector<std::string> validate_library(const GraphLibrary& lib);

/// Throwing wrapper around validate_library (std::invalid_argument listing
/// every violation).
void require_valid_library(const GraphLibrary& lib);

/// JSON serialization.  Schema, with 1-indexed vertices:
///   {
///     "n": 3,
///     "graphs": [[[1,1],[2,2],[3,3],[1,2]], ...],   // list of [from, to]
///     "probabilities": [0.5, 0.5]
///   }
GraphLibrary library_from_json(const std::string& text);
std::string library_to_json(const GraphLibrary& lib);

GraphLibrary load_library_file(const std::string& path);
void save_library_file(const GraphLibrary& lib, const std::string& path);

}  // namespace flocksim
