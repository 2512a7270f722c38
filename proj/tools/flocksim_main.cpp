// flocksim: command-line front end for the flocking simulator and certifier.
//
// Subcommands:
//   check        evaluate the flocking certificate for a configuration
//   simulate     run one seeded trajectory; export trajectory CSV + summary JSON
//   montecarlo   run a seeded Monte Carlo batch; export a report (json or csv)
//   schedule     sample a switching schedule; export CSV + block spanning analysis
//   matrix-tools evaluate ergodicity/scrambling/stochasticity of a CSV matrix
//
// Exit codes: 0 success, 2 invalid input (validation/parse), 3 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flocksim/certify.hpp"
#include "flocksim/digraph.hpp"
#include "flocksim/dynamics.hpp"
#include "flocksim/graph_library.hpp"
#include "flocksim/harness.hpp"
#include "flocksim/matrix.hpp"
#include "flocksim/switching.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(out_path, text);
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Parses a compact increment-distribution spec of the form
///   uniform:a,b | deterministic:delta | truncexp:rate,a,b | exponential:rate
flocksim::IncrementDistribution parse_increments(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream rest(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(rest, tok, ',')) {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("bad number in spec: " + tok);
      args.push_back(v);
    }
  }
  const auto need = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("increment spec '" + kind + "' expects " +
                                  std::to_string(n) + " parameter(s)");
    }
  };
  if (kind == "uniform") {
    need(2);
    return flocksim::IncrementDistribution::uniform(args[0], args[1]);
  }
  if (kind == "deterministic") {
    need(1);
    return flocksim::IncrementDistribution::deterministic(args[0]);
  }
  if (kind == "truncexp") {
    need(3);
    return flocksim::IncrementDistribution::truncated_exponential(args[0], args[1], args[2]);
  }
  if (kind == "exponential") {
    need(1);
    return flocksim::IncrementDistribution::exponential(args[0]);
  }
  throw std::invalid_argument(
      "unknown increment kind '" + kind +
      "' (expected uniform:a,b, deterministic:delta, truncexp:rate,a,b, exponential:rate)");
}

int run_check(const std::string& config_path, const std::string& out_path) {
  const flocksim::ExperimentConfig cfg = flocksim::load_config_file(config_path);
  const flocksim::EnsembleState initial = cfg.initial_state();
  const double dx0 = flocksim::position_diameter(initial);
  const double dv0 = flocksim::velocity_diameter(initial);
  const flocksim::TheoremParameters params = cfg.theorem_parameters();
  const flocksim::FlockingCertificate cert = flocksim::certify(params, dx0, dv0);
  emit(flocksim::certificate_to_json(cert), out_path);
  return kExitOk;
}

int run_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path, const std::string& summary_path) {
  const flocksim::ExperimentConfig cfg = flocksim::load_config_file(config_path);
  const flocksim::SingleRunResult result = flocksim::run_once_detailed(cfg, seed);
  if (!result.summary.integration_failed) {
    emit(flocksim::trajectory_to_csv(result.trajectory, result.schedule), out_path);
  } else {
    std::cerr << "integration aborted (non-finite state); no trajectory exported\n";
  }
  const std::string summary = flocksim::run_summary_to_json(result.summary);
  if (summary_path.empty()) {
    std::cout << summary << '\n';
  } else {
    write_text_file(summary_path, summary);
  }
  return kExitOk;
}

int run_montecarlo(const std::string& config_path, int runs, int workers,
                   const std::string& format, const std::string& out_path) {
  if (format != "json" && format != "csv") {
    throw std::invalid_argument("format must be json or csv");
  }
  const flocksim::ExperimentConfig cfg = flocksim::load_config_file(config_path);
  const flocksim::MonteCarloReport report = flocksim::monte_carlo(cfg, runs, workers);
  const std::string text =
      format == "json" ? flocksim::report_to_json(report) : flocksim::report_to_csv(report);
  emit(text, out_path);
  std::cerr << "runs=" << report.run_count
            << " flocking_fraction=" << format_double(report.flocking_fraction)
            << " spanning_fraction=" << format_double(report.spanning_fraction)
            << " wall_clock_seconds=" << format_double(report.wall_clock_seconds) << '\n';
  return kExitOk;
}

int run_schedule(const std::string& library_path, const std::string& increments_spec,
                 int switches, std::uint64_t seed, const std::string& out_path,
                 int block_n, double block_c) {
  const flocksim::GraphLibrary lib = flocksim::load_library_file(library_path);
  const flocksim::IncrementDistribution inc = parse_increments(increments_spec);
  const flocksim::SwitchingSchedule sched =
      flocksim::sample_schedule(lib, inc, switches, seed);
  emit(flocksim::schedule_to_csv(sched), out_path);

  // Block analysis: with (n, c) given, report which blocks' union graphs have a
  // spanning tree, for as many full blocks as the sampled schedule covers.
  if (block_n >= 1 && block_c > 0.0) {
    std::ostringstream analysis;
    analysis << "# block analysis: n=" << block_n << " c=" << format_double(block_c) << '\n';
    int count = 1;
    flocksim::BlockSequence seq = flocksim::block_indices(block_n, block_c, count);
    while (seq.indices.back() <= switches) {
      ++count;
      seq = flocksim::block_indices(block_n, block_c, count);
    }
    const int covered = count - 1;
    if (covered < 1) {
      analysis << "# schedule too short to cover one full block\n";
    } else {
      seq = flocksim::block_indices(block_n, block_c, covered);
      bool all = true;
      for (int blk = 0; blk < covered; ++blk) {
        const flocksim::Digraph g = flocksim::block_union_graph(sched, lib, seq, blk);
        const bool spans = flocksim::has_spanning_tree(g);
        all = all && spans;
        analysis << "block " << blk << ": switches [" << seq.indices[static_cast<std::size_t>(blk)]
                 << ", " << seq.indices[static_cast<std::size_t>(blk) + 1]
                 << "), spanning=" << (spans ? "true" : "false") << '\n';
      }
      analysis << "all_spanning=" << (all ? "true" : "false") << '\n';
    }
    std::cerr << analysis.str();
  }
  return kExitOk;
}

int run_matrix_tools(const std::string& in_path, double tol, const std::string& out_path) {
  const flocksim::DenseMatrix m = flocksim::matrix_from_csv(read_text_file(in_path));
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix predicates need a square matrix");
  }
  std::ostringstream out;
  out << "{\n";
  out << "  \"cols\": " << m.cols() << ",\n";
  out << "  \"ergodicity_coefficient\": " << format_double(flocksim::ergodicity_coefficient(m))
      << ",\n";
  out << "  \"row_diameter\": " << format_double(flocksim::row_diameter(m)) << ",\n";
  out << "  \"rows\": " << m.rows() << ",\n";
  out << "  \"scrambling\": " << (flocksim::is_scrambling(m, tol) ? "true" : "false") << ",\n";
  out << "  \"stochastic\": " << (flocksim::is_stochastic(m, tol) ? "true" : "false") << ",\n";
  out << "  \"tolerance\": " << format_double(tol) << "\n";
  out << "}";
  emit(out.str(), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flocking simulator and certification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string summary_path;
  std::string library_path;
  std::string increments_spec = "uniform:0.5,1.5";
  std::string format = "json";
  std::string matrix_path;
  std::uint64_t seed = 1;
  int runs = 100;
  int workers = 1;
  int switches = 100;
  int block_n = 0;
  double block_c = 0.0;
  double tol = 1e-12;

  CLI::App* check = app.add_subcommand("check", "Evaluate the flocking certificate");
  check->add_option("--config", config_path, "Experiment config JSON")->required();
  check->add_option("--out", out_path, "Certificate JSON path (default: stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "Run one seeded trajectory");
  simulate->add_option("--config", config_path, "Experiment config JSON")->required();
  simulate->add_option("--seed", seed, "Schedule seed");
  simulate->add_option("--out", out_path, "Trajectory CSV path (default: stdout)");
  simulate->add_option("--summary-out", summary_path, "Summary JSON path (default: stdout)");

  CLI::App* montecarlo = app.add_subcommand("montecarlo", "Run a Monte Carlo batch");
  montecarlo->add_option("--config", config_path, "Experiment config JSON")->required();
  montecarlo->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
  montecarlo->add_option("--workers", workers, "Worker threads (0 = hardware)");
  montecarlo->add_option("--format", format, "Report format: json or csv");
  montecarlo->add_option("--out", out_path, "Report path (default: stdout)");

  CLI::App* schedule = app.add_subcommand("schedule", "Sample a switching schedule");
  schedule->add_option("--library", library_path, "Graph library JSON")->required();
  schedule->add_option("--increments", increments_spec,
                       "uniform:a,b | deterministic:d | truncexp:rate,a,b | exponential:rate");
  schedule->add_option("--switches", switches, "Number of switching intervals")
      ->check(CLI::PositiveNumber);
  schedule->add_option("--seed", seed, "Schedule seed");
  schedule->add_option("--out", out_path, "Schedule CSV path (default: stdout)");
  schedule->add_option("--block-n", block_n, "Block base length for spanning analysis");
  schedule->add_option("--block-c", block_c, "Block log coefficient for spanning analysis");

  CLI::App* matrix_tools =
      app.add_subcommand("matrix-tools", "Matrix predicates from a CSV matrix");
  matrix_tools->add_option("--in", matrix_path, "Matrix CSV path")->required();
  matrix_tools->add_option("--tol", tol, "Positivity/stochasticity tolerance");
  matrix_tools->add_option("--out", out_path, "Result JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (check->parsed()) return run_check(config_path, out_path);
    if (simulate->parsed()) return run_simulate(config_path, seed, out_path, summary_path);
    if (montecarlo->parsed())
      return run_montecarlo(config_path, runs, workers, format, out_path);
    if (schedule->parsed())
      return run_schedule(library_path, increments_spec, switches, seed, out_path, block_n,
                          block_c);
    if (matrix_tools->parsed()) return run_matrix_tools(matrix_path, tol, out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
