#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flocksim/switching.hpp"
#include "flocksim/weight.hpp"

namespace flocksim {

/// Everything the flocking certificate depends on: the communication weight
/// scale kappa and decay exponent beta, the increment support [a, b], the
/// agent count, the label probabilities, and the reciprocal-weight growth
/// exponent epsilon (which must equal beta for the algebraic family; the
/// constant family has beta = epsilon = 0).
struct TheoremParameters {
  double kappa = 1.0;
  double a = 1.0;
  double b = 1.0;
  int n_particles = 2;
  std::vector<double> probabilities;
  double epsilon = 0.0;
  double beta = 0.0;

  CommunicationWeight weight() const;
  void validate() const;  // throws std::invalid_argument on any violation
};

/// Main certification condition:
///   kappa * b * (N-1) / m < 1   and   0 <= epsilon < 1/(N-1) - kappa*b/m,
/// with m = min_k ln(1/(1-p_k)) (m = +infinity when every p_k = 1, making
/// the ratio 0).  The second inequality implies the first for epsilon >= 0;
/// both are reported with their margins.
struct ConditionCheck {
  bool holds = false;
  double ratio_main = 0.0;   // kappa*b*(N-1)/m
  double epsilon_max = 0.0;  // 1/(N-1) - kappa*b/m
  std::string failed_condition;  // empty when holds
};
ConditionCheck check_conditions(const TheoremParameters& p);

/// Tail exponent delta, picked from the admissible open interval
/// (1/(1 - kappa*b*(N-1)*c), 1/((N-1)*epsilon)): the midpoint when epsilon
/// is positive, lower endpoint + 1 when epsilon = 0 (upper endpoint
/// infinite).  Throws std::invalid_argument when the interval is empty.
double choose_delta(const TheoremParameters& p, double c);

/// Best power-law envelope of the exponential:  e^{-x} <= (delta/e)^delta
/// * x^{-delta} for x, delta > 0, with equality at x = delta.  Throws
/// std::invalid_argument for non-positive inputs.
double exp_power_tail_bound(double x, double delta);

/// Self-consistent position-diameter bound x_infinity: the smallest
/// bracketed x with
///
///   DX0 + DV0*b*(N-1)*(n + c ln(N-1))
///       + DV0*b*(N-1)*(delta/e)^delta * P(x)^{-(N-1)delta}
///         * sum_{r>=1} (n + c ln((r+1)(N-1)))
///                      * (((r+1)^{1-q} - 1)/(1-q))^{-delta}   <  x,
///
/// where q = kappa*b*(N-1)*c and P(x) = a*phi(x)*e^{-kappa*b*n}
/// *(N-1)^{-kappa*b*c}/N.  Requires delta*(1-q) > 1 (series convergence)
/// and delta*(N-1)*epsilon < 1 (sublinear growth in x).
///
/// The series does not depend on x and is summed once: terms are
/// accumulated until the closed-form integral comparison tail drops below
/// `series_tol` (or a term cap is hit, which the slowly-decaying regime
/// near delta*(1-q) = 1 does); the tail bound is then *added* to the sum.
/// Overstating the series only raises the left-hand side, so any x the
/// routine accepts satisfies the true inequality as well.
///
/// The bracket is sought by doubling from DX0 + 1 up to 2^60 and refined by
/// bisection to relative width 1e-10.  Returns an empty optional when no
/// bracket exists below the cap.
struct PositionBoundResult {
  std::optional<double> x_infinity;
  double lhs_at_x = 0.0;       // left-hand side evaluated at x_infinity
  double series_value = 0.0;   // partial sum + tail bound
  double series_tail = 0.0;    // tail bound that was added
  long long series_terms = 0;  // terms summed before truncation
};
PositionBoundResult find_xinfty(const TheoremParameters& p, double dx0, double dv0, int n,
                                double c, double delta, double series_tol = 1e-12);

/// Velocity-diameter decay envelope at block-window boundary r (window r
/// spans blocks (r-1)(N-1) .. r(N-1)-1):
///   envelope(r) = exp[ -P^{N-1} * ((r+1)^{1-q} - 1)/(1-q) ],
/// with P and q as in find_xinfty; envelope(0) = 1.  Requires q < 1.
double decay_envelope(const TheoremParameters& p, double x_infinity, int n, double c,
                      long long r);

/// Lower bound on the ergodicity coefficient of the transition matrix over
/// one block window: e^{-kappa*elapsed} * (a/N)^{N-1} * phi(x_infinity)^{N-1}.
double mu_block_lower_bound(const TheoremParameters& p, double x_infinity, double elapsed);

/// Full certification pipeline: conditions -> block parameters (n, c) ->
/// delta -> x_infinity -> spanning-probability lower bound p_n -> envelope
/// parameters.  A failed step leaves main_condition_holds false with the
/// failing condition named; nothing throws for an honest "not certifiable".
struct FlockingCertificate {
  bool main_condition_holds = false;
  std::string failed_condition;

  // Condition diagnostics.
  double ratio_main = 0.0;
  double epsilon_max = 0.0;
  double margin_main = 0.0;     // 1 - ratio_main
  double margin_epsilon = 0.0;  // epsilon_max - epsilon

  // Derived quantities (meaningful when main_condition_holds).
  int n = 0;
  double c = 0.0;
  double delta = 0.0;
  double x_infinity = 0.0;
  double p_n = 0.0;

  // Envelope parameters: envelope(r) = exp(-prefactor^{N-1} *
  // ((r+1)^{1-exponent} - 1)/(1-exponent)).
  double envelope_prefactor = 0.0;
  double envelope_exponent = 0.0;

  // Truncation diagnostics.
  double fixed_point_lhs = 0.0;
  double fixed_point_series_tail = 0.0;
  long long fixed_point_series_terms = 0;
  double p_series_tail = 0.0;
  long long p_series_terms = 0;

  TheoremParameters params;
  double dx0 = 0.0;
  double dv0 = 0.0;
};
FlockingCertificate certify(const TheoremParameters& p, double dx0, double dv0);

/// Certificate as JSON with sorted keys and 17-significant-digit floats.
std::string certificate_to_json(const FlockingCertificate& cert);

}  // namespace flocksim
