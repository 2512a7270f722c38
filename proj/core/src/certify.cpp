#include "flocksim/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "text_io.hpp"

namespace flocksim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// m = min_k ln(1/(1-p_k)), computed as -log1p(-p_k) for accuracy near
/// p_k = 0; +infinity when every label is certain.
double min_log_inverse_miss(const std::vector<double>& probabilities) {
  double m = kInf;
  for (double p : probabilities) {
    if (p < 1.0) m = std::min(m, -std::log1p(-p));
  }
  return m;
}

/// Interval-average envelope prefactor: the guaranteed per-window coupling
/// strength a*phi(x)*e^{-kappa*b*n}*(N-1)^{-kappa*b*c} / N.
double window_prefactor(const TheoremParameters& p, double x, int n, double c) {
  const double big_n = static_cast<double>(p.n_particles);
  const double phi = phi_eval(p.weight(), x);
  return p.a * phi * std::exp(-p.kappa * p.b * n) *
         std::pow(big_n - 1.0, -p.kappa * p.b * c) / big_n;
}

}  // namespace

CommunicationWeight TheoremParameters::weight() const {
  if (beta == 0.0) return CommunicationWeight::constant(kappa);
  return CommunicationWeight::algebraic(kappa, beta);
}

void TheoremParameters::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("increment lower bound a must be positive");
  if (!(b >= a)) throw std::invalid_argument("increment bounds must satisfy a <= b");
  if (!std::isfinite(b)) throw std::invalid_argument("increment upper bound b must be finite");
  if (n_particles < 2) throw std::invalid_argument("at least two particles required");
  if (probabilities.empty()) throw std::invalid_argument("probabilities must be non-empty");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("each label probability must lie in (0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("label probabilities must sum to 1");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (epsilon != beta)
    throw std::invalid_argument(
        "epsilon must equal the weight decay exponent beta (both zero for the constant family)");
}

ConditionCheck check_conditions(const TheoremParameters& p) {
  p.validate();
  ConditionCheck out;
  const double m = min_log_inverse_miss(p.probabilities);
  const double inv_m = std::isinf(m) ? 0.0 : 1.0 / m;
  const double big_n = static_cast<double>(p.n_particles);
  out.ratio_main = p.kappa * p.b * (big_n - 1.0) * inv_m;
  out.epsilon_max = 1.0 / (big_n - 1.0) - p.kappa * p.b * inv_m;
  if (!(out.ratio_main < 1.0)) {
    out.holds = false;
    out.failed_condition = "kappa*b*(N-1)/m must be below 1";
  } else if (!(p.epsilon < out.epsilon_max)) {
    out.holds = false;
    out.failed_condition = "epsilon must be below 1/(N-1) - kappa*b/m";
  } else {
    out.holds = true;
  }
  return out;
}

double choose_delta(const TheoremParameters& p, double c) {
  p.validate();
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  const double big_n = static_cast<double>(p.n_particles);
  const double q = p.kappa * p.b * (big_n - 1.0) * c;
  if (!(q < 1.0))
    throw std::invalid_argument("kappa*b*(N-1)*c must be below 1 for a tail exponent to exist");
  const double lower = 1.0 / (1.0 - q);
  if (p.epsilon == 0.0) return lower + 1.0;
  const double upper = 1.0 / ((big_n - 1.0) * p.epsilon);
  if (!(lower < upper))
    throw std::invalid_argument("empty admissible interval for the tail exponent delta");
  return 0.5 * (lower + upper);
}

double exp_power_tail_bound(double x, double delta) {
  if (!(x > 0.0)) throw std::invalid_argument("x must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  // (delta/e)^delta * x^{-delta}, evaluated in log space to dodge overflow.
  return std::exp(delta * (std::log(delta) - 1.0 - std::log(x)));
}

PositionBoundResult find_xinfty(const TheoremParameters& p, double dx0, double dv0, int n,
                                double c, double delta, double series_tol) {
  p.validate();
  if (!(dx0 >= 0.0) || !std::isfinite(dx0))
    throw std::invalid_argument("initial position diameter must be finite and non-negative");
  if (!(dv0 >= 0.0) || !std::isfinite(dv0))
    throw std::invalid_argument("initial velocity diameter must be finite and non-negative");
  if (n < 1) throw std::invalid_argument("block base length n must be at least 1");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(series_tol > 0.0)) throw std::invalid_argument("series tolerance must be positive");

  PositionBoundResult out;
  if (dv0 == 0.0) {
    // Equal velocities: the position diameter never moves, any bound above
    // dx0 is self-consistent.
    out.x_infinity = dx0 + 1.0;
    out.lhs_at_x = dx0;
    return out;
  }

  const double big_n = static_cast<double>(p.n_particles);
  const double q = p.kappa * p.b * (big_n - 1.0) * c;
  if (!(q < 1.0)) throw std::invalid_argument("kappa*b*(N-1)*c must be below 1");
  const double s = delta * (1.0 - q);
  if (!(s > 1.0))
    throw std::invalid_argument(
        "window series diverges: delta*(1 - kappa*b*(N-1)*c) must exceed 1");
  if (!(delta * (big_n - 1.0) * p.epsilon < 1.0))
    throw std::invalid_argument(
        "sublinear growth requires delta*(N-1)*epsilon below 1");

  // Window-duration series sum_{r>=1} A_r * B_r with
  //   A_r = n + c*ln((r+1)(N-1)),
  //   B_r = (((r+1)^{1-q} - 1)/(1-q))^{-delta};
  // it does not involve x, so it is summed once.  Terms are added until the
  // closed-form comparison tail falls below series_tol (or the cap), then
  // the tail is added so the stored value can only overstate the true sum.
  const double a0 = n + c * std::log(big_n - 1.0);
  const auto tail_bound = [&](long long last_r) {
    const double u = static_cast<double>(last_r) + 1.0;
    // For r > last_r:  B_r <= (1-q)^delta * (1 - u^{-(1-q)})^{-delta} *
    // (r+1)^{-s}, and the remaining sum of (A0 + c*ln(r+1))*(r+1)^{-s} is
    // bounded by the integral from u to infinity:
    //   u^{1-s} * [ (A0 + c*ln u)/(s-1) + c/(s-1)^2 ].
    const double head = std::pow(1.0 - q, delta) *
                        std::pow(1.0 - std::pow(u, -(1.0 - q)), -delta);
    const double integral =
        std::pow(u, 1.0 - s) *
        ((a0 + c * std::log(u)) / (s - 1.0) + c / ((s - 1.0) * (s - 1.0)));
    return head * integral;
  };

  constexpr long long kTermCap = 300000;
  double partial = 0.0;
  double prev_term = kInf;
  long long terms = 0;
  double tail = kInf;
  for (long long r = 1; r <= kTermCap; ++r) {
    const double rp1 = static_cast<double>(r) + 1.0;
    const double a_r = n + c * std::log(rp1 * (big_n - 1.0));
    const double b_r = std::pow((std::pow(rp1, 1.0 - q) - 1.0) / (1.0 - q), -delta);
    const double term = a_r * b_r;
    partial += term;
    terms = r;
    // The integral comparison needs the summand to be decreasing past the
    // truncation point; wait for that before trusting the tail bound.
    if (r >= 16 && term < prev_term) {
      tail = tail_bound(r);
      if (tail <= series_tol) break;
    }
    prev_term = term;
  }
  if (std::isinf(tail)) tail = tail_bound(terms);
  const double series = partial + tail;
  out.series_value = series;
  out.series_tail = tail;
  out.series_terms = terms;

  // Left-hand side of the self-consistency inequality at candidate bound x.
  const double base =
      dx0 + dv0 * p.b * (big_n - 1.0) * (n + c * std::log(big_n - 1.0));
  const double log_coeff =
      std::log(dv0 * p.b * (big_n - 1.0)) + delta * (std::log(delta) - 1.0) +
      std::log(series);
  const auto lhs = [&](double x) {
    // dv0*b*(N-1) * (delta/e)^delta * P(x)^{-(N-1)*delta} * series, with the
    // product assembled in log space; exp overflows to +inf harmlessly.
    const double log_p = std::log(window_prefactor(p, x, n, c));
    return base + std::exp(log_coeff - (big_n - 1.0) * delta * log_p);
  };

  constexpr double kSearchCap = 1152921504606846976.0;  // 2^60
  double hi = dx0 + 1.0;
  double lo = 0.0;
  bool bracketed = false;
  while (hi <= kSearchCap) {
    if (lhs(hi) < hi) {
      bracketed = true;
      break;
    }
    lo = hi;
    hi *= 2.0;
  }
  if (!bracketed) {
    out.lhs_at_x = lhs(kSearchCap);
    return out;  // x_infinity left empty: no self-consistent bound in range
  }
  while ((hi - lo) / hi > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) < mid) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.x_infinity = hi;
  out.lhs_at_x = lhs(hi);
  return out;
}

double decay_envelope(const TheoremParameters& p, double x_infinity, int n, double c,
                      long long r) {
  p.validate();
  if (!(x_infinity >= 0.0)) throw std::invalid_argument("x_infinity must be non-negative");
  if (n < 1) throw std::invalid_argument("block base length n must be at least 1");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (r < 0) throw std::invalid_argument("window index must be non-negative");
  if (r == 0) return 1.0;
  const double big_n = static_cast<double>(p.n_particles);
  const double q = p.kappa * p.b * (big_n - 1.0) * c;
  if (!(q < 1.0)) throw std::invalid_argument("kappa*b*(N-1)*c must be below 1");
  const double prefactor = window_prefactor(p, x_infinity, n, c);
  const double growth =
      (std::pow(static_cast<double>(r) + 1.0, 1.0 - q) - 1.0) / (1.0 - q);
  return std::exp(-std::pow(prefactor, big_n - 1.0) * growth);
}

double mu_block_lower_bound(const TheoremParameters& p, double x_infinity, double elapsed) {
  p.validate();
  if (!(x_infinity >= 0.0)) throw std::invalid_argument("x_infinity must be non-negative");
  if (!(elapsed >= 0.0)) throw std::invalid_argument("elapsed time must be non-negative");
  const double big_n = static_cast<double>(p.n_particles);
  const double phi = phi_eval(p.weight(), x_infinity);
  return std::exp(-p.kappa * elapsed) *
         std::pow(p.a * phi / big_n, big_n - 1.0);
}

FlockingCertificate certify(const TheoremParameters& p, double dx0, double dv0) {
  p.validate();
  if (!(dx0 >= 0.0) || !std::isfinite(dx0))
    throw std::invalid_argument("initial position diameter must be finite and non-negative");
  if (!(dv0 >= 0.0) || !std::isfinite(dv0))
    throw std::invalid_argument("initial velocity diameter must be finite and non-negative");

  FlockingCertificate cert;
  cert.params = p;
  cert.dx0 = dx0;
  cert.dv0 = dv0;

  const ConditionCheck cond = check_conditions(p);
  cert.ratio_main = cond.ratio_main;
  cert.epsilon_max = cond.epsilon_max;
  cert.margin_main = 1.0 - cond.ratio_main;
  cert.margin_epsilon = cond.epsilon_max - p.epsilon;
  if (!cond.holds) {
    cert.failed_condition = cond.failed_condition;
    return cert;
  }

  const BlockParameters bp =
      choose_block_parameters(p.kappa, p.b, p.n_particles, p.probabilities, p.epsilon);
  cert.n = bp.n;
  cert.c = bp.c;
  cert.delta = choose_delta(p, bp.c);

  const PositionBoundResult pos = find_xinfty(p, dx0, dv0, bp.n, bp.c, cert.delta);
  cert.fixed_point_lhs = pos.lhs_at_x;
  cert.fixed_point_series_tail = pos.series_tail;
  cert.fixed_point_series_terms = pos.series_terms;
  if (!pos.x_infinity) {
    cert.failed_condition = "no self-consistent position bound below the search cap";
    return cert;
  }
  cert.x_infinity = *pos.x_infinity;

  const SpanningProbabilityBound sp =
      spanning_probability_lower_bound_detailed(p.probabilities, bp.n, bp.c);
  cert.p_n = sp.value;
  cert.p_series_tail = sp.series_tail;
  cert.p_series_terms = sp.series_terms;

  cert.envelope_prefactor = window_prefactor(p, cert.x_infinity, bp.n, bp.c);
  cert.envelope_exponent =
      p.kappa * p.b * (static_cast<double>(p.n_particles) - 1.0) * bp.c;
  cert.main_condition_holds = true;
  return cert;
}

std::string certificate_to_json(const FlockingCertificate& cert) {
  using detail::json_number;
  using detail::json_string;
  std::ostringstream os;
  os << "{\n";
  os << "  \"c\": " << json_number(cert.c) << ",\n";
  os << "  \"delta\": " << json_number(cert.delta) << ",\n";
  os << "  \"dv0\": " << json_number(cert.dv0) << ",\n";
  os << "  \"dx0\": " << json_number(cert.dx0) << ",\n";
  os << "  \"envelope_exponent\": " << json_number(cert.envelope_exponent) << ",\n";
  os << "  \"envelope_prefactor\": " << json_number(cert.envelope_prefactor) << ",\n";
  os << "  \"epsilon_max\": " << json_number(cert.epsilon_max) << ",\n";
  os << "  \"failed_condition\": " << json_string(cert.failed_condition) << ",\n";
  os << "  \"fixed_point_lhs\": " << json_number(cert.fixed_point_lhs) << ",\n";
  os << "  \"fixed_point_series_tail\": " << json_number(cert.fixed_point_series_tail)
     << ",\n";
  os << "  \"fixed_point_series_terms\": " << cert.fixed_point_series_terms << ",\n";
  os << "  \"main_condition_holds\": " << (cert.main_condition_holds ? "true" : "false")
     << ",\n";
  os << "  \"margin_epsilon\": " << json_number(cert.margin_epsilon) << ",\n";
  os << "  \"margin_main\": " << json_number(cert.margin_main) << ",\n";
  os << "  \"n\": " << cert.n << ",\n";
  os << "  \"p_n\": " << json_number(cert.p_n) << ",\n";
  os << "  \"p_series_tail\": " << json_number(cert.p_series_tail) << ",\n";
  os << "  \"p_series_terms\": " << cert.p_series_terms << ",\n";
  os << "  \"parameters\": {\n";
  os << "    \"a\": " << json_number(cert.params.a) << ",\n";
  os << "    \"b\": " << json_number(cert.params.b) << ",\n";
  os << "    \"beta\": " << json_number(cert.params.beta) << ",\n";
  os << "    \"epsilon\": " << json_number(cert.params.epsilon) << ",\n";
  os << "    \"kappa\": " << json_number(cert.params.kappa) << ",\n";
  os << "    \"n_particles\": " << cert.params.n_particles << ",\n";
  os << "    \"probabilities\": [";
  for (std::size_t i = 0; i < cert.params.probabilities.size(); ++i) {
    if (i) os << ", ";
    os << json_number(cert.params.probabilities[i]);
  }
  os << "]\n";
  os << "  },\n";
  os << "  \"ratio_main\": " << json_number(cert.ratio_main) << ",\n";
  os << "  \"x_infinity\": " << json_number(cert.x_infinity) << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace flocksim
