#pragma once

namespace flocksim {

/// Communication weight phi(r): how strongly two agents at distance r
/// influence each other.  Two families are provided:
///
///  - constant:   phi(r) = kappa                      (decay exponent 0)
///  - algebraic:  phi(r) = kappa / (1 + r^2)^(beta/2) (decay exponent beta)
///
/// Both are bounded by phi(0) = kappa, non-increasing, and Lipschitz (the
/// algebraic family with constant kappa*beta/2).
struct CommunicationWeight {
  enum class Kind { Constant, Algebraic };

  Kind kind = Kind::Constant;
  double kappa = 1.0;
  double beta = 0.0;

  static CommunicationWeight constant(double kappa);
  static CommunicationWeight algebraic(double kappa, double beta);

  /// Reciprocal growth exponent: 1/phi(r) = O(r^epsilon).
  double decay_exponent() const { return kind == Kind::Constant ? 0.0 : beta; }
};

/// Evaluate phi at distance r >= 0.  Throws std::invalid_argument for
/// negative r.
double phi_eval(const CommunicationWeight& w, double r);

}  // namespace flocksim
