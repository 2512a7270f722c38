#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flocksim/graph_library.hpp"
#include "flocksim/matrix.hpp"
#include "flocksim/switching.hpp"
#include "flocksim/weight.hpp"

namespace flocksim {

/// Positions and velocities of n agents in d dimensions at time t, stored
/// row-major (agent index major).
struct EnsembleState {
  double t = 0.0;
  int n = 0;
  int d = 0;
  std::vector<double> x;  // n*d
  std::vector<double> v;  // n*d

  double* position(int i) { return x.data() + static_cast<std::size_t>(i) * d; }
  const double* position(int i) const { return x.data() + static_cast<std::size_t>(i) * d; }
  double* velocity(int i) { return v.data() + static_cast<std::size_t>(i) * d; }
  const double* velocity(int i) const { return v.data() + static_cast<std::size_t>(i) * d; }

  bool all_finite() const;
};

EnsembleState make_state(int n, int d);

/// Uniform initial conditions: every position coordinate in
/// [position_lo, position_hi), every velocity coordinate in
/// [velocity_lo, velocity_hi), drawn from one SplitMix64 stream (positions
/// first, then velocities, agent-major).
EnsembleState sample_state_in_boxes(int n, int d, double position_lo, double position_hi,
                                    double velocity_lo, double velocity_hi,
                                    std::uint64_t seed);

/// Largest pairwise Euclidean distance over n rows of length d.
double diameter(const std::vector<double>& rows, int n, int d);

double position_diameter(const EnsembleState& s);
double velocity_diameter(const EnsembleState& s);

/// Graph Laplacian L = D - A of library graph k (0-based) at the given
/// positions: a_ij = chi_ij * phi(|x_i - x_j|), d_i = sum_j a_ij.  Row sums
/// vanish by construction.
DenseMatrix assemble_laplacian(const GraphLibrary& lib, int k, const EnsembleState& state,
                               const CommunicationWeight& w);

/// One sampled point of a trajectory plus the bookkeeping the analysis
/// needs: values at every switching instant covered, the running position
/// diameter supremum, and the final state.
struct TrajectoryRecord {
  std::vector<double> sample_times;
  std::vector<double> dx_series;
  std::vector<double> dv_series;

  // Entries for every switching instant t_l inside [start, t_end]
  // (including the start when it coincides with one).
  std::vector<long long> switch_indices;
  std::vector<double> switch_times;
  std::vector<double> dx_at_switch;
  std::vector<double> dv_at_switch;

  EnsembleState final_state;
  double sup_dx = 0.0;
  long long step_count = 0;
};

/// Velocity-coupling state-transition matrix: V(t2) = phi * V(t1) along the
/// realized trajectory.
struct TransitionMatrix {
  double t1 = 0.0;
  double t2 = 0.0;
  DenseMatrix phi;
};

/// Integrate the flocking dynamics
///   x_i' = v_i,   v_i' = (1/N) sum_j chi_ij(sigma_t) phi(|x_j - x_i|)(v_j - v_i)
/// with classical fixed-step RK4 from state0.t to t_end.  Steps are split at
/// switching instants so the active graph is constant within every step.
/// Samples are recorded every `sample_stride` steps and always at switching
/// instants and at t_end.  Throws std::invalid_argument when the schedule
/// does not cover [state0.t, t_end] and std::runtime_error when the state
/// leaves the finite range.
TrajectoryRecord integrate(const EnsembleState& state0, const SwitchingSchedule& s,
                           const GraphLibrary& lib, const CommunicationWeight& w, double dt,
                           double t_end, int sample_stride = 1);

/// Same integration, additionally carrying the transition matrix
/// d(phi)/dt = -(1/N) L(t) phi from phi(t1) = I.  Requires state0.t == t1.
std::pair<TrajectoryRecord, TransitionMatrix> integrate_with_transition(
    const EnsembleState& state0, const SwitchingSchedule& s, const GraphLibrary& lib,
    const CommunicationWeight& w, double dt, double t1, double t2, int sample_stride = 1);

/// Truncated power series sum_{m=0..order} (dt * (-L/N))^m / m! for the
/// transition matrix of a frozen generator; reference oracle for tests.
DenseMatrix frozen_transition_oracle(const DenseMatrix& laplacian, double dt, int order);

/// CSV with columns (time, DX, DV, sigma); sigma is the 1-indexed active
/// library label at the sample time (the final sample reuses the label of
/// the last covered interval).
std::string trajectory_to_csv(const TrajectoryRecord& record, const SwitchingSchedule& s);

/// Final state as JSON: {"d":..,"n":..,"positions":[[..]..],"t":..,
/// "velocities":[[..]..]}.
std::string state_to_json(const EnsembleState& state);
EnsembleState state_from_json(const std::string& text);

}  // namespace flocksim
