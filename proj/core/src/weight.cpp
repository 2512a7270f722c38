#include "flocksim/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace flocksim {

CommunicationWeight CommunicationWeight::constant(double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("CommunicationWeight: kappa must be positive");
  return CommunicationWeight{Kind::Constant, kappa, 0.0};
}

CommunicationWeight CommunicationWeight::algebraic(double kappa, double beta) {
  if (!(kappa > 0.0)) throw std::invalid_argument("CommunicationWeight: kappa must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("CommunicationWeight: beta must be nonnegative");
  return CommunicationWeight{Kind::Algebraic, kappa, beta};
}

double phi_eval(const CommunicationWeight& w, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("phi_eval: distance must be nonnegative");
  if (w.kind == CommunicationWeight::Kind::Constant || w.beta == 0.0) return w.kappa;
  return w.kappa * std::pow(1.0 + r * r, -0.5 * w.beta);
}

}  // namespace flocksim
