#include "flocksim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "flocksim/rng.hpp"
#include "json.hpp"
#include "text_io.hpp"

namespace flocksim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Per-experiment invariants shared by every Monte Carlo run: the initial
/// state, its diameters, the certificate (when derivable), and the switch
/// count implied by a block-count horizon.
struct RunContext {
  EnsembleState initial;
  double dx0 = 0.0;
  double dv0 = 0.0;
  bool has_certificate = false;
  FlockingCertificate cert;
  TheoremParameters params;
  BlockSequence horizon_blocks;
  int horizon_switches = 0;
};

RunContext build_context(const ExperimentConfig& cfg) {
  cfg.validate();
  RunContext ctx;
  ctx.initial = cfg.initial_state();
  ctx.dx0 = position_diameter(ctx.initial);
  ctx.dv0 = velocity_diameter(ctx.initial);
  if (cfg.increments.bounded_support()) {
    ctx.params = cfg.theorem_parameters();
    ctx.cert = certify(ctx.params, ctx.dx0, ctx.dv0);
    ctx.has_certificate = ctx.cert.main_condition_holds;
  }
  if (cfg.horizon == ExperimentConfig::HorizonKind::Blocks) {
    if (!ctx.has_certificate) {
      throw std::invalid_argument(
          "block-count horizon requires a configuration whose certificate holds; "
          "use a time horizon instead");
    }
    ctx.horizon_blocks = block_indices(ctx.cert.n, ctx.cert.c, cfg.blocks);
    const long long switches = ctx.horizon_blocks.indices.back();
    if (switches > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("block horizon needs more switches than supported");
    }
    ctx.horizon_switches = static_cast<int>(switches);
  }
  return ctx;
}

SingleRunResult run_with_context(const ExperimentConfig& cfg, const RunContext& ctx,
                                 std::uint64_t seed) {
  SingleRunResult detailed;
  RunSummary& out = detailed.summary;
  out.seed = seed;

  const bool block_horizon = cfg.horizon == ExperimentConfig::HorizonKind::Blocks;
  const SwitchingSchedule sched =
      block_horizon
          ? sample_schedule(cfg.library, cfg.increments, ctx.horizon_switches, seed)
          : sample_schedule_covering(cfg.library, cfg.increments, cfg.t_end, seed);
  const double t_end = block_horizon ? sched.times.back() : cfg.t_end;
  detailed.schedule = sched;

  TrajectoryRecord& rec = detailed.trajectory;
  try {
    rec = integrate(ctx.initial, sched, cfg.library, cfg.weight, cfg.dt, t_end,
                    cfg.sample_stride);
  } catch (const std::runtime_error&) {
    out.integration_failed = true;
    out.sup_dx = kNaN;
    out.final_dv = kNaN;
    return detailed;
  }

  out.sup_dx = rec.sup_dx;
  out.final_dv = velocity_diameter(rec.final_state);
  out.flocked = out.final_dv <= cfg.tolerance_v;

  if (!ctx.has_certificate) return detailed;

  // Determine how many full blocks the realized trajectory covers.
  const long long max_switch =
      rec.switch_indices.empty() ? -1 : rec.switch_indices.back();
  BlockSequence seq;
  int covered = 0;
  if (block_horizon) {
    seq = ctx.horizon_blocks;
    covered = cfg.blocks;
  } else {
    int count = 4;
    seq = block_indices(ctx.cert.n, ctx.cert.c, count);
    while (seq.indices.back() <= max_switch && count < (1 << 24)) {
      count *= 2;
      seq = block_indices(ctx.cert.n, ctx.cert.c, count);
    }
    while (covered + 1 < static_cast<int>(seq.indices.size()) &&
           seq.indices[static_cast<std::size_t>(covered) + 1] <= max_switch) {
      ++covered;
    }
  }
  if (covered < 1) return detailed;

  out.blocks_all_spanning = blocks_all_spanning(sched, cfg.library, seq, covered);

  // The decay envelope is asserted only on paths where every covered block
  // spans and the position diameter stayed inside the certified bound;
  // compare at the window boundaries the proof uses.
  if (out.blocks_all_spanning && out.sup_dx <= ctx.cert.x_infinity) {
    const int window = ctx.params.n_particles - 1;
    for (long long r = 1; r * window <= covered; ++r) {
      const long long boundary_index =
          seq.indices[static_cast<std::size_t>(r * window)];
      const auto it = std::lower_bound(rec.switch_indices.begin(),
                                       rec.switch_indices.end(), boundary_index);
      if (it == rec.switch_indices.end() || *it != boundary_index) continue;
      const double dv_r =
          rec.dv_at_switch[static_cast<std::size_t>(it - rec.switch_indices.begin())];
      const double env =
          decay_envelope(ctx.params, ctx.cert.x_infinity, ctx.cert.n, ctx.cert.c, r);
      if (dv_r > env * ctx.dv0 * (1.0 + 1e-6)) ++out.envelope_violations;
    }
  }
  return detailed;
}

std::string bool_json(bool b) { return b ? "true" : "false"; }

}  // namespace

void ExperimentConfig::validate() const {
  require_valid_library(library);
  if (dimension < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("dt must be positive and finite");
  if (!(tolerance_v > 0.0) || !std::isfinite(tolerance_v))
    throw std::invalid_argument("tolerance_v must be positive and finite");
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be at least 1");
  switch (horizon) {
    case HorizonKind::Time:
      if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("time horizon must be positive and finite");
      break;
    case HorizonKind::Blocks:
      if (blocks < 1) throw std::invalid_argument("block horizon must be at least 1");
      break;
  }
  const std::size_t coords =
      static_cast<std::size_t>(library.vertex_count()) * static_cast<std::size_t>(dimension);
  if (explicit_initial) {
    if (x0.size() != coords || v0.size() != coords) {
      throw std::invalid_argument(
          "explicit initial data must provide N*d position and velocity coordinates");
    }
    for (double value : x0) {
      if (!std::isfinite(value))
        throw std::invalid_argument("explicit initial positions must be finite");
    }
    for (double value : v0) {
      if (!std::isfinite(value))
        throw std::invalid_argument("explicit initial velocities must be finite");
    }
  } else {
    if (!(position_box >= 0.0) || !std::isfinite(position_box))
      throw std::invalid_argument("position box half-width must be non-negative");
    if (!(velocity_box >= 0.0) || !std::isfinite(velocity_box))
      throw std::invalid_argument("velocity box half-width must be non-negative");
  }
  // Increment-distribution and weight invariants (normally enforced by the
  // factories; re-checked here because the fields are writable).
  switch (increments.kind) {
    case IncrementDistribution::Kind::Uniform:
    case IncrementDistribution::Kind::TruncatedExponential:
      if (!(increments.a > 0.0) || !(increments.b >= increments.a) ||
          !std::isfinite(increments.b)) {
        throw std::invalid_argument("increment support must satisfy 0 < a <= b < infinity");
      }
      if (increments.kind == IncrementDistribution::Kind::TruncatedExponential &&
          !(increments.rate > 0.0)) {
        throw std::invalid_argument("increment rate must be positive");
      }
      break;
    case IncrementDistribution::Kind::Deterministic:
      if (!(increments.delta > 0.0) || !std::isfinite(increments.delta))
        throw std::invalid_argument("deterministic increment must be positive and finite");
      break;
    case IncrementDistribution::Kind::Exponential:
      if (!(increments.rate > 0.0))
        throw std::invalid_argument("increment rate must be positive");
      break;
  }
  if (!(weight.kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (weight.kind == CommunicationWeight::Kind::Algebraic && !(weight.beta >= 0.0))
    throw std::invalid_argument("beta must be non-negative");
}

EnsembleState ExperimentConfig::initial_state() const {
  const int n = library.vertex_count();
  if (explicit_initial) {
    EnsembleState st = make_state(n, dimension);
    st.x = x0;
    st.v = v0;
    return st;
  }
  return sample_state_in_boxes(n, dimension, -position_box, position_box, -velocity_box,
                               velocity_box, initial_seed);
}

TheoremParameters ExperimentConfig::theorem_parameters() const {
  if (!increments.bounded_support()) {
    throw std::invalid_argument(
        "certification requires an increment distribution with bounded support");
  }
  TheoremParameters tp;
  tp.kappa = weight.kappa;
  tp.a = increments.lower_bound();
  tp.b = increments.upper_bound();
  tp.n_particles = library.vertex_count();
  tp.probabilities = library.probabilities;
  tp.epsilon = weight.decay_exponent();
  tp.beta = weight.decay_exponent();
  return tp;
}

RunSummary run_once(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_with_context(cfg, build_context(cfg), seed).summary;
}

SingleRunResult run_once_detailed(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_with_context(cfg, build_context(cfg), seed);
}

MonteCarloReport monte_carlo(const ExperimentConfig& cfg, int run_count, int workers) {
  if (run_count < 1) throw std::invalid_argument("monte_carlo: need at least one run");
  const RunContext ctx = build_context(cfg);

  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, run_count);

  const auto started = std::chrono::steady_clock::now();
  std::vector<RunSummary> runs(static_cast<std::size_t>(run_count));
  if (workers == 1) {
    for (int i = 0; i < run_count; ++i) {
      runs[static_cast<std::size_t>(i)] =
          run_with_context(cfg, ctx, mix_seed(cfg.base_seed, static_cast<std::uint64_t>(i)))
              .summary;
    }
  } else {
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= run_count || failed.load()) break;
        try {
          runs[static_cast<std::size_t>(i)] =
              run_with_context(cfg, ctx,
                               mix_seed(cfg.base_seed, static_cast<std::uint64_t>(i)))
                  .summary;
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          break;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  const auto finished = std::chrono::steady_clock::now();

  MonteCarloReport report;
  report.run_count = run_count;
  report.runs = std::move(runs);
  report.certificate_valid = ctx.has_certificate;
  report.p_n = ctx.has_certificate ? ctx.cert.p_n : 0.0;
  report.x_infinity = ctx.has_certificate ? ctx.cert.x_infinity : 0.0;
  report.tolerance_v = cfg.tolerance_v;

  long long flocked = 0;
  long long spanning = 0;
  for (const RunSummary& r : report.runs) {
    const bool position_ok =
        !ctx.has_certificate || (r.sup_dx <= ctx.cert.x_infinity);
    if (r.flocked && position_ok) ++flocked;
    if (r.blocks_all_spanning) ++spanning;
    report.envelope_violation_total += r.envelope_violations;
    if (r.integration_failed) ++report.integration_failures;
  }
  report.flocking_fraction = static_cast<double>(flocked) / run_count;
  report.spanning_fraction = static_cast<double>(spanning) / run_count;
  report.wall_clock_seconds =
      std::chrono::duration<double>(finished - started).count();
  return report;
}

// --------------------------------------------------------------------------
// Serialization.

std::string run_summary_to_json(const RunSummary& s) {
  using detail::json_number;
  std::ostringstream os;
  os << "{\n";
  os << "  \"blocks_all_spanning\": " << bool_json(s.blocks_all_spanning) << ",\n";
  os << "  \"envelope_violations\": " << s.envelope_violations << ",\n";
  os << "  \"final_dv\": " << json_number(s.final_dv) << ",\n";
  os << "  \"flocked\": " << bool_json(s.flocked) << ",\n";
  os << "  \"integration_failed\": " << bool_json(s.integration_failed) << ",\n";
  os << "  \"seed\": " << s.seed << ",\n";
  os << "  \"sup_dx\": " << json_number(s.sup_dx) << "\n";
  os << "}\n";
  return os.str();
}

std::string report_to_json(const MonteCarloReport& r) {
  using detail::json_number;
  std::ostringstream os;
  os << "{\n";
  os << "  \"certificate_valid\": " << bool_json(r.certificate_valid) << ",\n";
  os << "  \"envelope_violation_total\": " << r.envelope_violation_total << ",\n";
  os << "  \"flocking_fraction\": " << json_number(r.flocking_fraction) << ",\n";
  os << "  \"integration_failures\": " << r.integration_failures << ",\n";
  os << "  \"p_n\": " << json_number(r.p_n) << ",\n";
  os << "  \"run_count\": " << r.run_count << ",\n";
  os << "  \"runs\": [";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const RunSummary& s = r.runs[i];
    os << (i == 0 ? "\n" : ",\n");
    os << "    {\"blocks_all_spanning\": " << bool_json(s.blocks_all_spanning)
       << ", \"envelope_violations\": " << s.envelope_violations
       << ", \"final_dv\": " << json_number(s.final_dv)
       << ", \"flocked\": " << bool_json(s.flocked)
       << ", \"integration_failed\": " << bool_json(s.integration_failed)
       << ", \"seed\": " << s.seed << ", \"sup_dx\": " << json_number(s.sup_dx) << "}";
  }
  os << (r.runs.empty() ? "],\n" : "\n  ],\n");
  os << "  \"spanning_fraction\": " << json_number(r.spanning_fraction) << ",\n";
  os << "  \"tolerance_v\": " << json_number(r.tolerance_v) << ",\n";
  os << "  \"x_infinity\": " << json_number(r.x_infinity) << "\n";
  os << "}\n";
  return os.str();
}

std::string report_to_csv(const MonteCarloReport& r) {
  using detail::format_double;
  std::ostringstream os;
  os << "# certificate_valid: " << (r.certificate_valid ? 1 : 0) << "\n";
  os << "# envelope_violation_total: " << r.envelope_violation_total << "\n";
  os << "# flocking_fraction: " << format_double(r.flocking_fraction) << "\n";
  os << "# integration_failures: " << r.integration_failures << "\n";
  os << "# p_n: " << format_double(r.p_n) << "\n";
  os << "# run_count: " << r.run_count << "\n";
  os << "# spanning_fraction: " << format_double(r.spanning_fraction) << "\n";
  os << "# tolerance_v: " << format_double(r.tolerance_v) << "\n";
  os << "# x_infinity: " << format_double(r.x_infinity) << "\n";
  os << "seed,flocked,sup_dx,final_dv,spanning,violations\n";
  for (const RunSummary& s : r.runs) {
    os << s.seed << ',' << (s.flocked ? 1 : 0) << ',' << format_double(s.sup_dx) << ','
       << format_double(s.final_dv) << ',' << (s.blocks_all_spanning ? 1 : 0) << ','
       << s.envelope_violations << "\n";
  }
  return os.str();
}

MonteCarloReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto number_or_nan = [](const nlohmann::json& v) {
    return v.is_null() ? kNaN : v.get<double>();
  };
  MonteCarloReport r;
  r.certificate_valid = j.at("certificate_valid").get<bool>();
  r.envelope_violation_total = j.at("envelope_violation_total").get<long long>();
  r.flocking_fraction = number_or_nan(j.at("flocking_fraction"));
  r.integration_failures = j.at("integration_failures").get<long long>();
  r.p_n = number_or_nan(j.at("p_n"));
  r.run_count = j.at("run_count").get<long long>();
  r.spanning_fraction = number_or_nan(j.at("spanning_fraction"));
  r.tolerance_v = number_or_nan(j.at("tolerance_v"));
  r.x_infinity = number_or_nan(j.at("x_infinity"));
  for (const auto& run : j.at("runs")) {
    RunSummary s;
    s.blocks_all_spanning = run.at("blocks_all_spanning").get<bool>();
    s.envelope_violations = run.at("envelope_violations").get<long long>();
    s.final_dv = number_or_nan(run.at("final_dv"));
    s.flocked = run.at("flocked").get<bool>();
    s.integration_failed = run.at("integration_failed").get<bool>();
    s.seed = run.at("seed").get<std::uint64_t>();
    s.sup_dx = number_or_nan(run.at("sup_dx"));
    r.runs.push_back(s);
  }
  return r;
}

MonteCarloReport report_from_csv(const std::string& text) {
  MonteCarloReport r;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      const std::string value = line.substr(colon + 1);
      const char* v = value.c_str();
      if (key == "certificate_valid") r.certificate_valid = std::strtol(v, nullptr, 10) != 0;
      else if (key == "envelope_violation_total")
        r.envelope_violation_total = std::strtoll(v, nullptr, 10);
      else if (key == "flocking_fraction") r.flocking_fraction = std::strtod(v, nullptr);
      else if (key == "integration_failures")
        r.integration_failures = std::strtoll(v, nullptr, 10);
      else if (key == "p_n") r.p_n = std::strtod(v, nullptr);
      else if (key == "run_count") r.run_count = std::strtoll(v, nullptr, 10);
      else if (key == "spanning_fraction") r.spanning_fraction = std::strtod(v, nullptr);
      else if (key == "tolerance_v") r.tolerance_v = std::strtod(v, nullptr);
      else if (key == "x_infinity") r.x_infinity = std::strtod(v, nullptr);
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) {
      throw std::invalid_argument("report CSV row must have 6 columns: " + line);
    }
    RunSummary s;
    s.seed = std::strtoull(cells[0].c_str(), nullptr, 10);
    s.flocked = std::strtol(cells[1].c_str(), nullptr, 10) != 0;
    s.sup_dx = std::strtod(cells[2].c_str(), nullptr);
    s.final_dv = std::strtod(cells[3].c_str(), nullptr);
    s.blocks_all_spanning = std::strtol(cells[4].c_str(), nullptr, 10) != 0;
    s.envelope_violations = std::strtoll(cells[5].c_str(), nullptr, 10);
    r.runs.push_back(s);
  }
  return r;
}

void export_report(const MonteCarloReport& r, const std::string& path,
                   const std::string& format) {
  if (format == "json") {
    detail::write_text_file(path, report_to_json(r));
  } else if (format == "csv") {
    detail::write_text_file(path, report_to_csv(r));
  } else {
    throw std::invalid_argument("report format must be \"json\" or \"csv\"");
  }
}

MonteCarloReport parse_report_file(const std::string& path, const std::string& format) {
  if (format == "json") return report_from_json(detail::read_text_file(path));
  if (format == "csv") return report_from_csv(detail::read_text_file(path));
  throw std::invalid_argument("report format must be \"json\" or \"csv\"");
}

// --------------------------------------------------------------------------
// Config serialization.

std::string config_to_json(const ExperimentConfig& cfg) {
  using detail::format_double;
  std::ostringstream os;
  os << "{\n";
  os << "  \"base_seed\": " << cfg.base_seed << ",\n";
  os << "  \"dimension\": " << cfg.dimension << ",\n";
  os << "  \"dt\": " << format_double(cfg.dt) << ",\n";
  os << "  \"horizon\": ";
  if (cfg.horizon == ExperimentConfig::HorizonKind::Blocks) {
    os << "{\"blocks\": " << cfg.blocks << ", \"kind\": \"blocks\"},\n";
  } else {
    os << "{\"kind\": \"time\", \"t_end\": " << format_double(cfg.t_end) << "},\n";
  }
  os << "  \"increments\": ";
  switch (cfg.increments.kind) {
    case IncrementDistribution::Kind::Uniform:
      os << "{\"a\": " << format_double(cfg.increments.a)
         << ", \"b\": " << format_double(cfg.increments.b) << ", \"kind\": \"uniform\"},\n";
      break;
    case IncrementDistribution::Kind::Deterministic:
      os << "{\"delta\": " << format_double(cfg.increments.delta)
         << ", \"kind\": \"deterministic\"},\n";
      break;
    case IncrementDistribution::Kind::TruncatedExponential:
      os << "{\"a\": " << format_double(cfg.increments.a)
         << ", \"b\": " << format_double(cfg.increments.b)
         << ", \"kind\": \"truncated_exponential\", \"rate\": "
         << format_double(cfg.increments.rate) << "},\n";
      break;
    case IncrementDistribution::Kind::Exponential:
      os << "{\"kind\": \"exponential\", \"rate\": " << format_double(cfg.increments.rate)
         << "},\n";
      break;
  }
  os << "  \"initial\": ";
  if (cfg.explicit_initial) {
    const int n = cfg.library.vertex_count();
    const int d = cfg.dimension;
    const auto emit_rows = [&](const std::vector<double>& flat) {
      os << "[";
      for (int i = 0; i < n; ++i) {
        os << (i == 0 ? "[" : ", [");
        for (int k = 0; k < d; ++k) {
          if (k) os << ", ";
          os << format_double(flat[static_cast<std::size_t>(i) * d + k]);
        }
        os << "]";
      }
      os << "]";
    };
    os << "{\"kind\": \"explicit\", \"positions\": ";
    emit_rows(cfg.x0);
    os << ", \"velocities\": ";
    emit_rows(cfg.v0);
    os << "},\n";
  } else {
    os << "{\"kind\": \"sampled\", \"position_box\": " << format_double(cfg.position_box)
       << ", \"seed\": " << cfg.initial_seed
       << ", \"velocity_box\": " << format_double(cfg.velocity_box) << "},\n";
  }
  // Library object, re-indented to nest inside the config document.
  {
    std::istringstream lib(library_to_json(cfg.library));
    std::string line;
    bool first = true;
    os << "  \"library\": ";
    while (std::getline(lib, line)) {
      if (first) {
        os << line << "\n";
        first = false;
      } else {
        os << "  " << line << (line == "}" ? "" : "\n");
      }
    }
    os << ",\n";
  }
  os << "  \"sample_stride\": " << cfg.sample_stride << ",\n";
  os << "  \"tolerance_v\": " << format_double(cfg.tolerance_v) << ",\n";
  os << "  \"weight\": ";
  if (cfg.weight.kind == CommunicationWeight::Kind::Constant) {
    os << "{\"kappa\": " << format_double(cfg.weight.kappa) << ", \"kind\": \"constant\"}\n";
  } else {
    os << "{\"beta\": " << format_double(cfg.weight.beta)
       << ", \"kappa\": " << format_double(cfg.weight.kappa)
       << ", \"kind\": \"algebraic\"}\n";
  }
  os << "}\n";
  return os.str();
}

ExperimentConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.library = library_from_json(j.at("library").dump());
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  cfg.dimension = j.at("dimension").get<int>();
  cfg.dt = j.at("dt").get<double>();

  const auto& hz = j.at("horizon");
  const std::string hz_kind = hz.at("kind").get<std::string>();
  if (hz_kind == "blocks") {
    cfg.horizon = ExperimentConfig::HorizonKind::Blocks;
    cfg.blocks = hz.at("blocks").get<int>();
  } else if (hz_kind == "time") {
    cfg.horizon = ExperimentConfig::HorizonKind::Time;
    cfg.t_end = hz.at("t_end").get<double>();
  } else {
    throw std::invalid_argument("horizon kind must be \"blocks\" or \"time\"");
  }

  const auto& inc = j.at("increments");
  const std::string inc_kind = inc.at("kind").get<std::string>();
  if (inc_kind == "uniform") {
    cfg.increments =
        IncrementDistribution::uniform(inc.at("a").get<double>(), inc.at("b").get<double>());
  } else if (inc_kind == "deterministic") {
    cfg.increments = IncrementDistribution::deterministic(inc.at("delta").get<double>());
  } else if (inc_kind == "truncated_exponential") {
    cfg.increments = IncrementDistribution::truncated_exponential(
        inc.at("rate").get<double>(), inc.at("a").get<double>(), inc.at("b").get<double>());
  } else if (inc_kind == "exponential") {
    cfg.increments = IncrementDistribution::exponential(inc.at("rate").get<double>());
  } else {
    throw std::invalid_argument("unknown increment distribution kind: " + inc_kind);
  }

  const auto& init = j.at("initial");
  const std::string init_kind = init.at("kind").get<std::string>();
  if (init_kind == "explicit") {
    cfg.explicit_initial = true;
    const auto flatten = [&](const nlohmann::json& rows) {
      std::vector<double> flat;
      for (const auto& row : rows) {
        for (const auto& value : row) flat.push_back(value.get<double>());
      }
      return flat;
    };
    cfg.x0 = flatten(init.at("positions"));
    cfg.v0 = flatten(init.at("velocities"));
  } else if (init_kind == "sampled") {
    cfg.explicit_initial = false;
    cfg.position_box = init.at("position_box").get<double>();
    cfg.velocity_box = init.at("velocity_box").get<double>();
    cfg.initial_seed = init.at("seed").get<std::uint64_t>();
  } else {
    throw std::invalid_argument("initial kind must be \"explicit\" or \"sampled\"");
  }

  const auto& w = j.at("weight");
  const std::string w_kind = w.at("kind").get<std::string>();
  if (w_kind == "constant") {
    cfg.weight = CommunicationWeight::constant(w.at("kappa").get<double>());
  } else if (w_kind == "algebraic") {
    cfg.weight =
        CommunicationWeight::algebraic(w.at("kappa").get<double>(), w.at("beta").get<double>());
  } else {
    throw std::invalid_argument("weight kind must be \"constant\" or \"algebraic\"");
  }

  if (j.contains("sample_stride")) cfg.sample_stride = j.at("sample_stride").get<int>();
  if (j.contains("tolerance_v")) cfg.tolerance_v = j.at("tolerance_v").get<double>();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  return config_from_json(detail::read_text_file(path));
}

void save_config_file(const ExperimentConfig& cfg, const std::string& path) {
  detail::write_text_file(path, config_to_json(cfg));
}

}  // namespace flocksim
