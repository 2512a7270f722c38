#include "flocksim/switching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "flocksim/rng.hpp"
#include "text_io.hpp"

namespace flocksim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// min_k ln(1/(1-p_k)); +infinity when every p_k equals 1.
double min_log_inverse_miss(const std::vector<double>& probabilities) {
  double m = kInf;
  for (double p : probabilities) {
    if (!(p > 0.0) || p > 1.0) {
      throw std::invalid_argument("probabilities must lie in (0, 1]");
    }
    if (p < 1.0) m = std::min(m, -std::log1p(-p));
  }
  return m;
}

std::vector<double> cumulative(const std::vector<double>& probabilities) {
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    acc += probabilities[k];
    cdf[k] = acc;
  }
  cdf.back() = 1.0;  // close the floating-point gap
  return cdf;
}

double draw_increment(const IncrementDistribution& d, SplitMix64& g) {
  switch (d.kind) {
    case IncrementDistribution::Kind::Uniform:
      return d.a + (d.b - d.a) * g.next_unit();
    case IncrementDistribution::Kind::Deterministic:
      return d.delta;
    case IncrementDistribution::Kind::TruncatedExponential: {
      // Inverse CDF of an exponential restricted to [a, b].
      const double span = -std::expm1(-d.rate * (d.b - d.a));
      const double u = g.next_unit();
      return d.a - std::log1p(-u * span) / d.rate;
    }
    case IncrementDistribution::Kind::Exponential:
      return -std::log1p(-g.next_unit()) / d.rate;
  }
  throw std::logic_error("draw_increment: unknown kind");
}

}  // namespace

IncrementDistribution IncrementDistribution::uniform(double a, double b) {
  if (!(a > 0.0) || !(b >= a)) {
    throw std::invalid_argument("uniform increments require 0 < a <= b");
  }
  IncrementDistribution d;
  d.kind = Kind::Uniform;
  d.a = a;
  d.b = b;
  return d;
}

IncrementDistribution IncrementDistribution::deterministic(double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("deterministic increment must be positive");
  }
  IncrementDistribution d;
  d.kind = Kind::Deterministic;
  d.delta = delta;
  d.a = delta;
  d.b = delta;
  return d;
}

IncrementDistribution IncrementDistribution::truncated_exponential(double rate, double a,
                                                                   double b) {
  if (!(rate > 0.0)) throw std::invalid_argument("truncated exponential: rate must be positive");
  if (!(a > 0.0) || !(b >= a)) {
    throw std::invalid_argument("truncated exponential requires 0 < a <= b");
  }
  IncrementDistribution d;
  d.kind = Kind::TruncatedExponential;
  d.rate = rate;
  d.a = a;
  d.b = b;
  return d;
}

IncrementDistribution IncrementDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
  IncrementDistribution d;
  d.kind = Kind::Exponential;
  d.rate = rate;
  d.a = 0.0;
  d.b = kInf;
  return d;
}

double IncrementDistribution::lower_bound() const {
  return kind == Kind::Deterministic ? delta : a;
}

double IncrementDistribution::upper_bound() const {
  switch (kind) {
    case Kind::Deterministic: return delta;
    case Kind::Exponential: return kInf;
    default: return b;
  }
}

SwitchingSchedule sample_schedule(const GraphLibrary& lib, const IncrementDistribution& dist,
                                  int switch_count, std::uint64_t seed) {
  if (switch_count < 1) {
    throw std::invalid_argument("sample_schedule: switch_count must be >= 1");
  }
  require_valid_library(lib);
  const std::vector<double> cdf = cumulative(lib.probabilities);

  SwitchingSchedule s;
  s.unbounded_support_warning = !dist.bounded_support();
  s.times.reserve(switch_count + 1);
  s.labels.reserve(switch_count);
  s.times.push_back(0.0);
  SplitMix64 g(seed);
  for (int l = 0; l < switch_count; ++l) {
    const double inc = draw_increment(dist, g);
    s.times.push_back(s.times.back() + inc);
    s.labels.push_back(g.next_category(cdf));
  }
  return s;
}

SwitchingSchedule sample_schedule_covering(const GraphLibrary& lib,
                                           const IncrementDistribution& dist,
                                           double t_end, std::uint64_t seed) {
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("sample_schedule_covering: t_end must be positive");
  }
  require_valid_library(lib);
  const std::vector<double> cdf = cumulative(lib.probabilities);

  SwitchingSchedule s;
  s.unbounded_support_warning = !dist.bounded_support();
  s.times.push_back(0.0);
  SplitMix64 g(seed);
  while (s.times.back() < t_end) {
    const double inc = draw_increment(dist, g);
    s.times.push_back(s.times.back() + inc);
    s.labels.push_back(g.next_category(cdf));
  }
  return s;
}

int sigma_at(const SwitchingSchedule& s, double t) {
  if (s.labels.empty()) throw std::out_of_range("sigma_at: empty schedule");
  if (t < s.times.front() || t >= s.times.back()) {
    throw std::out_of_range("sigma_at: time outside the covered half-open span");
  }
  // Largest l with times[l] <= t.
  const auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
  const auto l = static_cast<std::size_t>(it - s.times.begin()) - 1;
  return s.labels[l];
}

BlockSequence block_indices(int n, double c, int count) {
  if (n < 1) throw std::invalid_argument("block_indices: n must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("block_indices: c must be positive");
  if (count < 1) throw std::invalid_argument("block_indices: count must be >= 1");
  BlockSequence b;
  b.n = n;
  b.c = c;
  b.indices.reserve(count + 1);
  b.indices.push_back(0);
  for (int l = 0; l < count; ++l) {
    const long long gap = n + static_cast<long long>(std::floor(c * std::log(l + 1.0)));
    b.indices.push_back(b.indices.back() + gap);
  }
  return b;
}

Digraph block_union_graph(const SwitchingSchedule& s, const GraphLibrary& lib,
                          const BlockSequence& blocks, int ell) {
  if (ell < 0 || ell >= blocks.block_count()) {
    throw std::invalid_argument("block_union_graph: block index out of range");
  }
  const long long lo = blocks.indices[ell];
  const long long hi = blocks.indices[ell + 1];
  if (hi > static_cast<long long>(s.labels.size())) {
    throw std::invalid_argument("block_union_graph: schedule shorter than the block");
  }
  std::vector<Digraph> active;
  for (long long j = lo; j < hi; ++j) {
    const int label = s.labels[static_cast<std::size_t>(j)];
    if (label < 0 || label >= lib.graph_count()) {
      throw std::invalid_argument("block_union_graph: schedule label outside library");
    }
    active.push_back(lib.graphs[static_cast<std::size_t>(label)]);
  }
  return union_graphs(active);
}

bool blocks_all_spanning(const SwitchingSchedule& s, const GraphLibrary& lib,
                         const BlockSequence& blocks, int block_count) {
  if (block_count < 0 || block_count > blocks.block_count()) {
    throw std::invalid_argument("blocks_all_spanning: block count out of range");
  }
  for (int ell = 0; ell < block_count; ++ell) {
    if (!has_spanning_tree(block_union_graph(s, lib, blocks, ell))) return false;
  }
  return true;
}

BlockParameters choose_block_parameters(double kappa, double b, int n_particles,
                                        const std::vector<double>& probabilities,
                                        double epsilon) {
  if (!(kappa > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("choose_block_parameters: kappa and b must be positive");
  }
  if (n_particles < 2) {
    throw std::invalid_argument("choose_block_parameters: need at least two particles");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("choose_block_parameters: epsilon must be nonnegative");
  }
  const double m = min_log_inverse_miss(probabilities);
  const double inv_m = std::isinf(m) ? 0.0 : 1.0 / m;
  const double nm1 = n_particles - 1.0;

  // Feasibility: epsilon < 1/(N-1) - kappa*b/m, equivalently
  // 1/m < (1 - epsilon*(N-1)) / (kappa*b*(N-1)).
  const double upper = (1.0 - epsilon * nm1) / (kappa * b * nm1);
  if (!(inv_m < upper)) {
    throw std::invalid_argument(
        "choose_block_parameters: main condition fails "
        "(kappa*b*(N-1) too large for the label probabilities / epsilon)");
  }

  BlockParameters out;
  out.c = 0.5 * (inv_m + upper);

  int n = 1;
  for (;; ++n) {
    double sum = 0.0;
    for (double p : probabilities) sum += std::pow(1.0 - p, n);
    if (sum <= 0.5) break;
    if (n > 1000000) {
      throw std::logic_error("choose_block_parameters: no feasible n reached the 1/2 target");
    }
  }
  out.n = n;

  // Both derived inequalities hold by construction; keep them as hard checks.
  if (!(kappa * b * nm1 * out.c < 1.0) || !(out.c > inv_m)) {
    throw std::logic_error("choose_block_parameters: internal inequality violated");
  }
  return out;
}

SpanningProbabilityBound spanning_probability_lower_bound_detailed(
    const std::vector<double>& probabilities, int n, double c, double tail_tol) {
  if (n < 1) throw std::invalid_argument("spanning_probability_lower_bound: n must be >= 1");
  if (!(c > 0.0)) {
    throw std::invalid_argument("spanning_probability_lower_bound: c must be positive");
  }
  if (!(tail_tol > 0.0)) {
    throw std::invalid_argument("spanning_probability_lower_bound: tail_tol must be positive");
  }
  double miss_sum = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0) || p > 1.0) {
      throw std::invalid_argument("spanning_probability_lower_bound: probabilities in (0,1]");
    }
    miss_sum += std::pow(1.0 - p, n);
  }
  if (miss_sum > 0.5) {
    throw std::invalid_argument(
        "spanning_probability_lower_bound: sum_k (1-p_k)^n exceeds 1/2");
  }

  SpanningProbabilityBound out;
  double exponent_sum = 0.0;
  for (double p : probabilities) {
    const double rho = 1.0 - p;
    if (rho <= 0.0) continue;  // certain label: contributes nothing

    // Divergence guard: the inner series behaves like sum l^(-c*ln(1/rho)).
    const double ratio = rho * std::exp(1.0 / c);  // < 1 iff c*ln(1/rho) > 1
    if (!(ratio < 1.0)) {
      throw std::invalid_argument(
          "spanning_probability_lower_bound: c below the convergence threshold "
          "1/min_k ln(1/(1-p_k))");
    }

    // sum_{l>=0} rho^floor(c*ln(l+1)), regrouped by the floor value m:
    // the count of l with floor(c*ln(l+1)) == m is ceil(e^((m+1)/c)) -
    // ceil(e^(m/c)).  Counts are exact while they fit a double; beyond that
    // the term is replaced by its upper bound e^((m+1)/c) * rho^m, and the
    // geometric tail bound e^(1/c)*ratio^(m+1)/(1-ratio) is added at the
    // truncation point.  Both replacements only enlarge the sum, which only
    // lowers the returned probability, so the result stays a lower bound.
    const double log_rho = std::log(rho);
    double series = 0.0;
    double tail = kInf;
    long long terms = 0;
    double lo_count = 1.0;  // ceil(e^(m/c)) at the current m
    for (long long m = 0;; ++m) {
      const double hi_edge = std::exp((m + 1.0) / c);
      if (hi_edge < 9.0e15) {
        const double hi_count = std::ceil(hi_edge);
        series += (hi_count - lo_count) * std::exp(m * log_rho);
        lo_count = hi_count;
      } else {
        series += std::exp((m + 1.0) / c + m * log_rho);
      }
      ++terms;
      tail = std::exp(1.0 / c) * std::pow(ratio, m + 1.0) / (1.0 - ratio);
      if (tail < tail_tol) break;
      if (m > 2000000) {
        throw std::logic_error("spanning_probability_lower_bound: tail did not shrink");
      }
    }
    series += tail;
    out.series_terms += terms;
    out.series_tail += tail;
    exponent_sum += std::pow(rho, n) * series;
  }

  out.value = std::exp(-2.0 * std::log(2.0) * exponent_sum);
  return out;
}

double spanning_probability_lower_bound(const GraphLibrary& lib, int n, double c,
                                        double tail_tol) {
  return spanning_probability_lower_bound_detailed(lib.probabilities, n, c, tail_tol).value;
}

std::string schedule_to_csv(const SwitchingSchedule& s) {
  std::string out = "index,time,label\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const std::size_t label_idx = std::min(i, s.labels.size() - 1);
    out += std::to_string(i);
    out += ',';
    out += detail::format_double(s.times[i]);
    out += ',';
    out += std::to_string(s.labels.empty() ? 0 : s.labels[label_idx] + 1);
    out += '\n';
  }
  return out;
}

SwitchingSchedule schedule_from_csv(const std::string& text) {
  SwitchingSchedule s;
  std::istringstream lines(text);
  std::string line;
  bool header_skipped = false;
  std::vector<int> labels_1based;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::istringstream cells(line);
    std::string idx, time, label;
    if (!std::getline(cells, idx, ',') || !std::getline(cells, time, ',') ||
        !std::getline(cells, label, ',')) {
      throw std::invalid_argument("schedule_from_csv: malformed row '" + line + "'");
    }
    s.times.push_back(std::stod(time));
    labels_1based.push_back(std::stoi(label));
  }
  if (s.times.size() < 2) {
    throw std::invalid_argument("schedule_from_csv: need at least two rows");
  }
  // The final row repeats the last interval's label; drop it.
  for (std::size_t i = 0; i + 1 < labels_1based.size(); ++i) {
    s.labels.push_back(labels_1based[i] - 1);
  }
  return s;
}

}  // namespace flocksim
