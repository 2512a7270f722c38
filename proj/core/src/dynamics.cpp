#include "flocksim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "flocksim/rng.hpp"
#include "json.hpp"
#include "text_io.hpp"

namespace flocksim {

bool EnsembleState::all_finite() const {
  for (double e : x) {
    if (!std::isfinite(e)) return false;
  }
  for (double e : v) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

EnsembleState make_state(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_state: n and d must be positive");
  EnsembleState s;
  s.n = n;
  s.d = d;
  s.x.assign(static_cast<std::size_t>(n) * d, 0.0);
  s.v.assign(static_cast<std::size_t>(n) * d, 0.0);
  return s;
}

EnsembleState sample_state_in_boxes(int n, int d, double position_lo, double position_hi,
                                    double velocity_lo, double velocity_hi,
                                    std::uint64_t seed) {
  EnsembleState s = make_state(n, d);
  SplitMix64 g(seed);
  for (double& e : s.x) e = g.next_in(position_lo, position_hi);
  for (double& e : s.v) e = g.next_in(velocity_lo, velocity_hi);
  return s;
}

double diameter(const std::vector<double>& rows, int n, int d) {
  if (n < 1 || d < 1 || rows.size() != static_cast<std::size_t>(n) * d) {
    throw std::invalid_argument("diameter: row buffer does not match n*d");
  }
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = rows[static_cast<std::size_t>(i) * d + k] -
                            rows[static_cast<std::size_t>(j) * d + k];
        d2 += diff * diff;
      }
      best = std::max(best, d2);
    }
  }
  return std::sqrt(best);
}

double position_diameter(const EnsembleState& s) { return diameter(s.x, s.n, s.d); }
double velocity_diameter(const EnsembleState& s) { return diameter(s.v, s.n, s.d); }

namespace {

/// Pairwise coupling weights w_ij = chi_ij * phi(|x_i - x_j|) for one graph
/// at given positions; the workhorse of every RK4 stage.
void fill_weights(const Digraph& g, const CommunicationWeight& w, const double* x, int n,
                  int d, std::vector<double>& out) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double wij = 0.0;
      if (g.has_edge(j, i)) {  // i receives from j
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = x[static_cast<std::size_t>(i) * d + k] -
                              x[static_cast<std::size_t>(j) * d + k];
          r2 += diff * diff;
        }
        // An overflowed stage state yields NaN distances (inf - inf); pass the
        // NaN through the weight so the step's finite-range check reports the
        // blow-up instead of the weight's domain guard rejecting it.
        const double r = std::sqrt(r2);
        wij = std::isnan(r) ? r : phi_eval(w, r);
      }
      out[static_cast<std::size_t>(i) * n + j] = wij;
    }
  }
}

/// Apply the averaging generator to an n x m block:
/// (out)_ic = (1/n) sum_j w_ij (block_jc - block_ic).
void apply_generator(const std::vector<double>& weights, const double* block, int n, int m,
                     double* out) {
  const double inv_n = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) out[static_cast<std::size_t>(i) * m + c] = 0.0;
    for (int j = 0; j < n; ++j) {
      const double wij = weights[static_cast<std::size_t>(i) * n + j];
      if (wij == 0.0) continue;
      for (int c = 0; c < m; ++c) {
        out[static_cast<std::size_t>(i) * m + c] +=
            wij * (block[static_cast<std::size_t>(j) * m + c] -
                   block[static_cast<std::size_t>(i) * m + c]);
      }
    }
    for (int c = 0; c < m; ++c) out[static_cast<std::size_t>(i) * m + c] *= inv_n;
  }
}

struct Workspace {
  // Stage buffers for positions/velocities/transition columns.
  std::vector<double> weights;
  std::vector<double> xs, vs, ps;          // stage state
  std::vector<double> kx[4], kv[4], kp[4]; // stage derivatives

  void init(int n, int d, bool with_phi) {
    weights.assign(static_cast<std::size_t>(n) * n, 0.0);
    const std::size_t nd = static_cast<std::size_t>(n) * d;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    xs.assign(nd, 0.0);
    vs.assign(nd, 0.0);
    for (auto* buf : {&kx[0], &kx[1], &kx[2], &kx[3]}) buf->assign(nd, 0.0);
    for (auto* buf : {&kv[0], &kv[1], &kv[2], &kv[3]}) buf->assign(nd, 0.0);
    if (with_phi) {
      ps.assign(nn, 0.0);
      for (auto* buf : {&kp[0], &kp[1], &kp[2], &kp[3]}) buf->assign(nn, 0.0);
    }
  }
};

void axpy(std::vector<double>& out, const std::vector<double>& base,
          const std::vector<double>& slope, double h) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + h * slope[i];
}

/// One RK4 step of size h with the graph frozen to `g`.  Advances x, v and,
/// when non-null, the transition block phi (n x n, evolved by the same
/// velocity generator).
void rk4_step(const Digraph& g, const CommunicationWeight& w, int n, int d, double h,
              std::vector<double>& x, std::vector<double>& v, std::vector<double>* phi,
              Workspace& ws) {
  const bool with_phi = phi != nullptr;
  const double half = 0.5 * h;

  // Stage 1 at (x, v).
  fill_weights(g, w, x.data(), n, d, ws.weights);
  ws.kx[0] = v;
  apply_generator(ws.weights, v.data(), n, d, ws.kv[0].data());
  if (with_phi) apply_generator(ws.weights, phi->data(), n, n, ws.kp[0].data());

  // Stage 2 at (x + h/2 k1x, ...).
  axpy(ws.xs, x, ws.kx[0], half);
  axpy(ws.vs, v, ws.kv[0], half);
  if (with_phi) axpy(ws.ps, *phi, ws.kp[0], half);
  fill_weights(g, w, ws.xs.data(), n, d, ws.weights);
  ws.kx[1] = ws.vs;
  apply_generator(ws.weights, ws.vs.data(), n, d, ws.kv[1].data());
  if (with_phi) apply_generator(ws.weights, ws.ps.data(), n, n, ws.kp[1].data());

  // Stage 3.
  axpy(ws.xs, x, ws.kx[1], half);
  axpy(ws.vs, v, ws.kv[1], half);
  if (with_phi) axpy(ws.ps, *phi, ws.kp[1], half);
  fill_weights(g, w, ws.xs.data(), n, d, ws.weights);
  ws.kx[2] = ws.vs;
  apply_generator(ws.weights, ws.vs.data(), n, d, ws.kv[2].data());
  if (with_phi) apply_generator(ws.weights, ws.ps.data(), n, n, ws.kp[2].data());

  // Stage 4.
  axpy(ws.xs, x, ws.kx[2], h);
  axpy(ws.vs, v, ws.kv[2], h);
  if (with_phi) axpy(ws.ps, *phi, ws.kp[2], h);
  fill_weights(g, w, ws.xs.data(), n, d, ws.weights);
  ws.kx[3] = ws.vs;
  apply_generator(ws.weights, ws.vs.data(), n, d, ws.kv[3].data());
  if (with_phi) apply_generator(ws.weights, ws.ps.data(), n, n, ws.kp[3].data());

  const double sixth = h / 6.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] += sixth * (ws.kx[0][i] + 2.0 * ws.kx[1][i] + 2.0 * ws.kx[2][i] + ws.kx[3][i]);
    v[i] += sixth * (ws.kv[0][i] + 2.0 * ws.kv[1][i] + 2.0 * ws.kv[2][i] + ws.kv[3][i]);
  }
  if (with_phi) {
    for (std::size_t i = 0; i < phi->size(); ++i) {
      (*phi)[i] +=
          sixth * (ws.kp[0][i] + 2.0 * ws.kp[1][i] + 2.0 * ws.kp[2][i] + ws.kp[3][i]);
    }
  }
}

TrajectoryRecord integrate_impl(const EnsembleState& state0, const SwitchingSchedule& s,
                                const GraphLibrary& lib, const CommunicationWeight& w,
                                double dt, double t_end, int sample_stride,
                                std::vector<double>* phi) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (sample_stride < 1) throw std::invalid_argument("integrate: sample_stride must be >= 1");
  if (state0.n != lib.vertex_count()) {
    throw std::invalid_argument("integrate: state agent count differs from library");
  }
  if (!state0.all_finite()) throw std::invalid_argument("integrate: non-finite initial state");
  if (s.times.size() < 2) throw std::invalid_argument("integrate: empty schedule");
  if (state0.t < s.times.front() || t_end > s.times.back()) {
    throw std::invalid_argument("integrate: schedule shorter than the requested span");
  }
  if (!(t_end >= state0.t)) throw std::invalid_argument("integrate: t_end before start");

  const int n = state0.n;
  const int d = state0.d;

  TrajectoryRecord rec;
  rec.final_state = state0;
  EnsembleState& st = rec.final_state;

  Workspace ws;
  ws.init(n, d, phi != nullptr);

  // Interval index: largest l with times[l] <= t (t < times.back()).
  std::size_t interval = 0;
  {
    const auto it = std::upper_bound(s.times.begin(), s.times.end(), st.t);
    interval = static_cast<std::size_t>(it - s.times.begin());
    if (interval > 0) --interval;
    if (interval >= s.labels.size()) interval = s.labels.size() - 1;
  }

  const auto record_sample = [&](double dx, double dv) {
    rec.sample_times.push_back(st.t);
    rec.dx_series.push_back(dx);
    rec.dv_series.push_back(dv);
  };
  const auto record_switch = [&](long long idx, double dx, double dv) {
    rec.switch_indices.push_back(idx);
    rec.switch_times.push_back(st.t);
    rec.dx_at_switch.push_back(dx);
    rec.dv_at_switch.push_back(dv);
  };

  double dx = position_diameter(st);
  double dv = velocity_diameter(st);
  rec.sup_dx = dx;
  record_sample(dx, dv);
  if (st.t == s.times[interval]) {
    record_switch(static_cast<long long>(interval), dx, dv);
  }

  long long steps_since_sample = 0;
  while (st.t < t_end) {
    const double next_switch = s.times[interval + 1];
    const double boundary = std::min(t_end, next_switch);
    const double h = std::min(dt, boundary - st.t);
    const bool lands_on_boundary = (st.t + h >= boundary) || (h < dt);

    rk4_step(lib.graphs[static_cast<std::size_t>(s.labels[interval])], w, n, d,
             lands_on_boundary ? boundary - st.t : h, st.x, st.v, phi, ws);
    st.t = lands_on_boundary ? boundary : st.t + h;
    ++rec.step_count;
    ++steps_since_sample;

    if (!st.all_finite()) {
      std::ostringstream msg;
      msg << "integrate: state left the finite range near t=" << st.t
          << " (step " << rec.step_count << "); likely dt too large";
      throw std::runtime_error(msg.str());
    }

    dx = position_diameter(st);
    dv = velocity_diameter(st);
    rec.sup_dx = std::max(rec.sup_dx, dx);

    const bool on_switch = lands_on_boundary && boundary == next_switch;
    if (on_switch) {
      record_switch(static_cast<long long>(interval) + 1, dx, dv);
      if (interval + 2 < s.times.size()) ++interval;
    }
    if (on_switch || steps_since_sample >= sample_stride || st.t >= t_end) {
      record_sample(dx, dv);
      steps_since_sample = 0;
    }
  }
  return rec;
}

}  // namespace

DenseMatrix assemble_laplacian(const GraphLibrary& lib, int k, const EnsembleState& state,
                               const CommunicationWeight& w) {
  if (k < 0 || k >= lib.graph_count()) {
    throw std::invalid_argument("assemble_laplacian: graph index out of range");
  }
  if (state.n != lib.vertex_count()) {
    throw std::invalid_argument("assemble_laplacian: state does not match library");
  }
  const int n = state.n;
  std::vector<double> weights(static_cast<std::size_t>(n) * n, 0.0);
  fill_weights(lib.graphs[static_cast<std::size_t>(k)], w, state.x.data(), n, state.d,
               weights);
  DenseMatrix L(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = weights[static_cast<std::size_t>(i) * n + j];
      deg += a;
      L.at(i, j) = -a;
    }
    L.at(i, i) += deg;
  }
  return L;
}

TrajectoryRecord integrate(const EnsembleState& state0, const SwitchingSchedule& s,
                           const GraphLibrary& lib, const CommunicationWeight& w, double dt,
                           double t_end, int sample_stride) {
  return integrate_impl(state0, s, lib, w, dt, t_end, sample_stride, nullptr);
}

std::pair<TrajectoryRecord, TransitionMatrix> integrate_with_transition(
    const EnsembleState& state0, const SwitchingSchedule& s, const GraphLibrary& lib,
    const CommunicationWeight& w, double dt, double t1, double t2, int sample_stride) {
  if (state0.t != t1) {
    throw std::invalid_argument("integrate_with_transition: state0.t must equal t1");
  }
  if (!(t1 <= t2)) {
    throw std::invalid_argument("integrate_with_transition: need t1 <= t2");
  }
  const int n = state0.n;
  std::vector<double> phi(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) phi[static_cast<std::size_t>(i) * n + i] = 1.0;

  TrajectoryRecord rec = integrate_impl(state0, s, lib, w, dt, t2, sample_stride, &phi);

  TransitionMatrix tm;
  tm.t1 = t1;
  tm.t2 = t2;
  tm.phi = DenseMatrix(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      tm.phi.at(i, j) = phi[static_cast<std::size_t>(i) * n + j];
    }
  }
  return {std::move(rec), std::move(tm)};
}

DenseMatrix frozen_transition_oracle(const DenseMatrix& laplacian, double dt, int order) {
  if (laplacian.rows() != laplacian.cols()) {
    throw std::invalid_argument("frozen_transition_oracle: matrix must be square");
  }
  if (order < 0) throw std::invalid_argument("frozen_transition_oracle: order must be >= 0");
  const int n = laplacian.rows();
  const DenseMatrix generator = matrix_scale(laplacian, -dt / n);  // dt * (-L/N)
  DenseMatrix sum = DenseMatrix::identity(n);
  DenseMatrix term = DenseMatrix::identity(n);
  for (int m = 1; m <= order; ++m) {
    term = matrix_scale(matrix_multiply(term, generator), 1.0 / m);
    sum = matrix_add(sum, term);
  }
  return sum;
}

std::string trajectory_to_csv(const TrajectoryRecord& record, const SwitchingSchedule& s) {
  std::string out = "time,DX,DV,sigma\n";
  for (std::size_t i = 0; i < record.sample_times.size(); ++i) {
    const double t = record.sample_times[i];
    int label;
    if (t >= s.times.back()) {
      label = s.labels.back();
    } else if (t < s.times.front()) {
      throw std::invalid_argument("trajectory_to_csv: sample before schedule start");
    } else {
      label = sigma_at(s, t);
    }
    out += detail::format_double(t);
    out += ',';
    out += detail::format_double(record.dx_series[i]);
    out += ',';
    out += detail::format_double(record.dv_series[i]);
    out += ',';
    out += std::to_string(label + 1);
    out += '\n';
  }
  return out;
}

std::string state_to_json(const EnsembleState& state) {
  std::string out = "{\n  \"d\": " + std::to_string(state.d);
  out += ",\n  \"n\": " + std::to_string(state.n);
  const auto block = [&](const std::vector<double>& rows) {
    std::string text = "[";
    for (int i = 0; i < state.n; ++i) {
      text += (i == 0) ? "[" : ",[";
      for (int k = 0; k < state.d; ++k) {
        if (k > 0) text += ",";
        text += detail::json_number(rows[static_cast<std::size_t>(i) * state.d + k]);
      }
      text += "]";
    }
    text += "]";
    return text;
  };
  out += ",\n  \"positions\": " + block(state.x);
  out += ",\n  \"t\": " + detail::json_number(state.t);
  out += ",\n  \"velocities\": " + block(state.v);
  out += "\n}\n";
  return out;
}

EnsembleState state_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("state JSON parse error: ") + e.what());
  }
  EnsembleState s = make_state(j.at("n").get<int>(), j.at("d").get<int>());
  s.t = j.at("t").get<double>();
  const auto& xs = j.at("positions");
  const auto& vs = j.at("velocities");
  if (static_cast<int>(xs.size()) != s.n || static_cast<int>(vs.size()) != s.n) {
    throw std::invalid_argument("state JSON: row count does not match n");
  }
  for (int i = 0; i < s.n; ++i) {
    if (static_cast<int>(xs.at(i).size()) != s.d || static_cast<int>(vs.at(i).size()) != s.d) {
      throw std::invalid_argument("state JSON: row length does not match d");
    }
    for (int k = 0; k < s.d; ++k) {
      s.x[static_cast<std::size_t>(i) * s.d + k] = xs.at(i).at(k).get<double>();
      s.v[static_cast<std::size_t>(i) * s.d + k] = vs.at(i).at(k).get<double>();
    }
  }
  return s;
}

}  // namespace flocksim
