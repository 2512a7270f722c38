#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flocksim/certify.hpp"
#include "flocksim/dynamics.hpp"
#include "flocksim/graph_library.hpp"
#include "flocksim/switching.hpp"
#include "flocksim/weight.hpp"

namespace flocksim {

/// Everything one experiment needs.  Initial conditions are part of the
/// config (explicit, or drawn once from sampling boxes with their own
/// seed), so a Monte Carlo sweep varies only the switching path: the
/// per-run seed drives increment and label draws, nothing else.
struct ExperimentConfig {
  GraphLibrary library;
  IncrementDistribution increments = IncrementDistribution::uniform(0.5, 1.5);
  CommunicationWeight weight = CommunicationWeight::constant(1.0);
  int dimension = 2;

  // Initial conditions.
  bool explicit_initial = false;
  std::vector<double> x0;       // row-major N*d, used when explicit_initial
  std::vector<double> v0;
  double position_box = 1.0;    // coordinates uniform in [-box, box)
  double velocity_box = 1.0;
  std::uint64_t initial_seed = 1;

  enum class HorizonKind { Time, Blocks };
  HorizonKind horizon = HorizonKind::Blocks;
  double t_end = 10.0;  // HorizonKind::Time
  int blocks = 30;      // HorizonKind::Blocks: cover this many certified blocks

  double dt = 1e-2;
  double tolerance_v = 1e-4;  // flocking declared when final DV <= tolerance_v
  std::uint64_t base_seed = 1;
  int sample_stride = 100;

  void validate() const;  // throws std::invalid_argument with the violation
  /// The shared initial state (deterministic: explicit data or a one-time
  /// box draw from initial_seed).
  EnsembleState initial_state() const;
  /// Certification inputs implied by the config; throws when the increment
  /// distribution has unbounded support (nothing to certify then).
  TheoremParameters theorem_parameters() const;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const ExperimentConfig& cfg, const std::string& path);

/// Outcome of a single run.  `flocked` is the finite-horizon proxy
/// final DV <= tolerance_v.  Block bookkeeping (spanning check, envelope
/// comparison) is filled only when the config admits a valid certificate;
/// envelope violations are counted only on runs where every covered block
/// spans and the realized sup DX stays within the certified x_infinity, the
/// regime where the envelope is asserted.
struct RunSummary {
  std::uint64_t seed = 0;
  bool flocked = false;
  double sup_dx = 0.0;
  double final_dv = 0.0;
  bool blocks_all_spanning = false;
  long long envelope_violations = 0;
  bool integration_failed = false;  // non-finite state; summary flagged, no throw
};

/// Deterministic in (cfg, seed).  The schedule is drawn from `seed`; the
/// initial state comes from the config.
RunSummary run_once(const ExperimentConfig& cfg, std::uint64_t seed);
std::string run_summary_to_json(const RunSummary& s);

/// run_once plus the artifacts a caller may want to export: the realized
/// schedule and the sampled trajectory (empty when integration failed).
struct SingleRunResult {
  RunSummary summary;
  SwitchingSchedule schedule;
  TrajectoryRecord trajectory;
};
SingleRunResult run_once_detailed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Aggregate of M independent runs with derived seeds.  When the config is
/// certifiable, `flocking_fraction` counts runs with final DV <= tolerance_v
/// AND sup DX <= x_infinity (the certified event); otherwise just the
/// velocity criterion.  `wall_clock_seconds` is measured but never
/// serialized, so exports are byte-identical across worker counts.
struct MonteCarloReport {
  long long run_count = 0;
  double flocking_fraction = 0.0;
  double spanning_fraction = 0.0;
  long long envelope_violation_total = 0;
  long long integration_failures = 0;
  bool certificate_valid = false;
  double p_n = 0.0;         // analytic spanning-probability reference
  double x_infinity = 0.0;  // certified position bound
  double tolerance_v = 0.0;
  std::vector<RunSummary> runs;
  double wall_clock_seconds = 0.0;  // not exported
};

/// Run `run_count` summaries with per-run seed mix_seed(base_seed, i) on
/// `workers` threads (clamped to [1, run_count]; 0 picks the hardware
/// count).  Results are reduced in run-index order, so the report does not
/// depend on scheduling or the worker count.
MonteCarloReport monte_carlo(const ExperimentConfig& cfg, int run_count, int workers = 1);

/// Byte-stable exports: keys sorted, floats at 17 significant digits.  CSV
/// carries the aggregates as leading "# key: value" lines and one row per
/// run with the fixed column order seed,flocked,sup_dx,final_dv,spanning,
/// violations.  `format` is "json" or "csv".
std::string report_to_json(const MonteCarloReport& r);
std::string report_to_csv(const MonteCarloReport& r);
MonteCarloReport report_from_json(const std::string& text);
MonteCarloReport report_from_csv(const std::string& text);
void export_report(const MonteCarloReport& r, const std::string& path,
                   const std::string& format);
MonteCarloReport parse_report_file(const std::string& path, const std::string& format);

}  // namespace flocksim
