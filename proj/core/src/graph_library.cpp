#include "flocksim/graph_library.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "text_io.hpp"

namespace flocksim {

std::vector<std::string> validate_library(const GraphLibrary& lib) {
  std::vector<std::string> problems;
  if (lib.graphs.empty()) {
    problems.push_back("library has no graphs");
    return problems;
  }
  if (lib.probabilities.size() != lib.graphs.size()) {
    std::ostringstream ss;
    ss << "probability count " << lib.probabilities.size()
       << " does not match graph count " << lib.graphs.size();
    problems.push_back(ss.str());
  }

  const int n = lib.graphs.front().size();
  for (std::size_t k = 0; k < lib.graphs.size(); ++k) {
    if (lib.graphs[k].size() != n) {
      std::ostringstream ss;
      ss << "graph " << (k + 1) << " has vertex count " << lib.graphs[k].size()
         << ", expected " << n;
      problems.push_back(ss.str());
      continue;
    }
    if (!lib.graphs[k].has_all_self_loops()) {
      std::ostringstream ss;
      ss << "graph " << (k + 1) << ": missing self-loop";
      problems.push_back(ss.str());
    }
  }

  double sum = 0.0;
  bool positive = true;
  for (std::size_t k = 0; k < lib.probabilities.size(); ++k) {
    if (!(lib.probabilities[k] > 0.0)) {
      std::ostringstream ss;
      ss << "probability " << (k + 1) << " is not positive";
      problems.push_back(ss.str());
      positive = false;
    }
    sum += lib.probabilities[k];
  }
  if (positive && !lib.probabilities.empty() && std::abs(sum - 1.0) > 1e-12) {
    problems.push_back("probabilities do not sum to 1");
  }

  bool shapes_ok = true;
  for (const Digraph& g : lib.graphs) shapes_ok = shapes_ok && g.size() == n;
  if (shapes_ok && !has_spanning_tree(union_graphs(lib.graphs))) {
    problems.push_back("union of library graphs has no spanning tree");
  }
  return problems;
}

void require_valid_library(const GraphLibrary& lib) {
  const std::vector<std::string> problems = validate_library(lib);
  if (problems.empty()) return;
  std::string msg = "invalid graph library:";
  for (const std::string& p : problems) msg += "\n  - " + p;
  throw std::invalid_argument(msg);
}

GraphLibrary library_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("library JSON parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("graphs") ||
      !j.contains("probabilities")) {
    throw std::invalid_argument("library JSON must contain n, graphs, probabilities");
  }
  const int n = j.at("n").get<int>();
  if (n <= 0) throw std::invalid_argument("library JSON: n must be positive");

  GraphLibrary lib;
  for (const auto& edges : j.at("graphs")) {
    Digraph g(n);
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2) {
        throw std::invalid_argument("library JSON: edge must be a [from, to] pair");
      }
      const int from = e.at(0).get<int>();
      const int to = e.at(1).get<int>();
      if (from < 1 || from > n || to < 1 || to > n) {
        throw std::invalid_argument("library JSON: vertex index out of range (1-indexed)");
      }
      g.add_edge(from - 1, to - 1);
    }
    lib.graphs.push_back(std::move(g));
  }
  lib.probabilities = j.at("probabilities").get<std::vector<double>>();
  return lib;
}

std::string library_to_json(const GraphLibrary& lib) {
  std::string out = "{\n  \"graphs\": [";
  for (std::size_t k = 0; k < lib.graphs.size(); ++k) {
    out += (k == 0) ? "\n    [" : ",\n    [";
    const auto edges = lib.graphs[k].edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (e > 0) out += ",";
      out += "[" + std::to_string(edges[e].first + 1) + "," +
             std::to_string(edges[e].second + 1) + "]";
    }
    out += "]";
  }
  out += "\n  ],\n  \"n\": " + std::to_string(lib.vertex_count());
  out += ",\n  \"probabilities\": [";
  for (std::size_t k = 0; k < lib.probabilities.size(); ++k) {
    if (k > 0) out += ",";
    out += detail::format_double(lib.probabilities[k]);
  }
  out += "]\n}\n";
  return out;
}

GraphLibrary load_library_file(const std::string& path) {
  return library_from_json(detail::read_text_file(path));
}

void save_library_file(const GraphLibrary& lib, const std::string& path) {
  detail::write_text_file(path, library_to_json(lib));
}

}  // namespace flocksim
