#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flocksim/graph_library.hpp"

namespace flocksim {

/// Distribution of the waiting time between consecutive switching instants.
/// The certified theory requires a density supported in [a, b] with
/// 0 < a <= b < infinity; the plain exponential is accepted by the sampler
/// for exploratory runs (flagged as unbounded) but rejected by the
/// certification routines.
struct IncrementDistribution {
  enum class Kind { Uniform, Deterministic, TruncatedExponential, Exponential };

  Kind kind = Kind::Deterministic;
  double a = 1.0;     // support lower bound (uniform / truncated exponential)
  double b = 1.0;     // support upper bound (uniform / truncated exponential)
  double delta = 1.0; // fixed increment (deterministic)
  double rate = 1.0;  // exponential rate

  static IncrementDistribution uniform(double a, double b);
  static IncrementDistribution deterministic(double delta);
  static IncrementDistribution truncated_exponential(double rate, double a, double b);
  static IncrementDistribution exponential(double rate);

  bool bounded_support() const { return kind != Kind::Exponential; }
  double lower_bound() const;
  double upper_bound() const;  // +infinity for the plain exponential
};

/// Piecewise-constant switching signal: times 0 = t_0 < t_1 < ... < t_L and
/// the 0-based library label in force on each interval [t_l, t_{l+1}).
struct SwitchingSchedule {
  std::vector<double> times;
  std::vector<int> labels;
  bool unbounded_support_warning = false;

  int interval_count() const { return static_cast<int>(labels.size()); }
  double end_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// Block boundaries a_0 = 0, a_{l+1} = a_l + n + floor(c * ln(l+1)), stored
/// as the first count+1 terms.  Block l spans switching intervals
/// [a_l, a_{l+1}).  Natural logarithm throughout.
struct BlockSequence {
  int n = 1;
  double c = 1.0;
  std::vector<long long> indices;

  int block_count() const { return static_cast<int>(indices.size()) - 1; }
};

/// Draw a schedule with `switch_count` i.i.d. increments and interval labels.
/// The draw order is fixed and documented for reproducibility: for each
/// interval l = 0..switch_count-1, first the increment t_{l+1} - t_l, then
/// the label, both from one SplitMix64 stream seeded with `seed`.
SwitchingSchedule sample_schedule(const GraphLibrary& lib,
                                  const IncrementDistribution& dist,
                                  int switch_count, std::uint64_t seed);

/// Same draw sequence, but keeps drawing intervals until the schedule covers
/// t_end (i.e. last time >= t_end).  Works for unbounded distributions too.
SwitchingSchedule sample_schedule_covering(const GraphLibrary& lib,
                                           const IncrementDistribution& dist,
                                           double t_end, std::uint64_t seed);

/// Label in force at time t.  Domain is the half-open [t_0, t_L); querying
/// t_L or beyond throws std::out_of_range.
int sigma_at(const SwitchingSchedule& s, double t);

/// First `count`+1 block boundaries for the logarithmic block progression.
/// Throws std::invalid_argument for n < 1, c <= 0, or count < 1.
BlockSequence block_indices(int n, double c, int count);

/// Union of the library graphs active during block `ell`.  Requires the
/// schedule to contain all switching intervals of that block.
Digraph block_union_graph(const SwitchingSchedule& s, const GraphLibrary& lib,
                          const BlockSequence& blocks, int ell);

/// True when every one of the first `block_count` blocks has a spanning tree
/// in its union graph.
bool blocks_all_spanning(const SwitchingSchedule& s, const GraphLibrary& lib,
                         const BlockSequence& blocks, int block_count);

/// Block parameters (n, c) chosen from the main certification condition:
///   c = (1/m + (1 - epsilon*(N-1)) / (kappa*b*(N-1))) / 2,
///   n = smallest integer >= 1 with sum_k (1-p_k)^n <= 1/2,
/// where m = min_k ln(1/(1-p_k)) and 1/m is taken as 0 when every p_k = 1.
/// Throws std::invalid_argument when the condition epsilon < 1/(N-1) -
/// kappa*b/m fails (no valid c exists).
struct BlockParameters {
  int n = 1;
  double c = 1.0;
};
BlockParameters choose_block_parameters(double kappa, double b, int n_particles,
                                        const std::vector<double>& probabilities,
                                        double epsilon);

/// Lower bound on the probability that every block union graph contains all
/// library labels (and hence a spanning tree):
///   exp(-2 ln2 * sum_k (1-p_k)^n * sum_{l>=0} (1-p_k)^floor(c ln(l+1)))
/// Preconditions: sum_k (1-p_k)^n <= 1/2 and c * min_k ln(1/(1-p_k)) > 1
/// (otherwise the inner series diverges); violations throw
/// std::invalid_argument.
///
/// The inner series is summed exactly by regrouping runs of equal floor
/// value; the remaining geometric tail bound is added to the sum, which can
/// only lower the returned probability, keeping it a valid lower bound.
struct SpanningProbabilityBound {
  double value = 0.0;
  long long series_terms = 0;  // regrouped terms summed across all k
  double series_tail = 0.0;    // total tail bound added across all k
};
SpanningProbabilityBound spanning_probability_lower_bound_detailed(
    const std::vector<double>& probabilities, int n, double c,
    double tail_tol = 1e-12);
double spanning_probability_lower_bound(const GraphLibrary& lib, int n, double c,
                                        double tail_tol = 1e-12);

/// CSV export with columns (index, time, label); labels are written
/// 1-indexed, and the final row repeats the last interval's label so every
/// row has the same shape.
std::string schedule_to_csv(const SwitchingSchedule& s);
SwitchingSchedule schedule_from_csv(const std::string& text);

}  // namespace flocksim
