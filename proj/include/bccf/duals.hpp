#pragma once

// Succinct dual certificates for the reduced cheating problems. A dual is
// stored by its terminal variables only; the intermediate w_j / z_j are the
// partial values of the backward induction and are recomputed when needed.

#include <string>
#include <vector>

#include "bccf/core.hpp"

namespace bccf {

class InfeasibleDualError : public BccfError {
 public:
  using BccfError::BccfError;
};

struct BobDual {
  Outcome outcome = Outcome::Zero;
  std::vector<double> v0, v1;  // over B

  const std::vector<double>& v(int a) const { return a == 0 ? v0 : v1; }
};

struct AliceDual {
  Outcome outcome = Outcome::Zero;
  std::vector<double> z;  // z_{n+1} over A x B, x * |B| + y
};

struct DualFeasibility {
  bool feasible = false;
  double max_violation = 0.0;
  std::string worst_constraint;
};

// Bob: for each a, sum over supp(beta_t(a)) of beta/v_a <= 1 + eps, v_a >= 0.
DualFeasibility check_feasibility(const BccfProtocol& proto, const BobDual& dual,
                                  double eps = kEpsFeas);
// Alice: for each a and y in supp(beta_t(a)),
// sum over supp(alpha_a) of (beta_{t(a),y} alpha_{a,x} / 2) / z_{x,y} <= 1 + eps.
DualFeasibility check_feasibility(const BccfProtocol& proto, const AliceDual& dual,
                                  double eps = kEpsFeas);

/// The LMO coefficients the dual bound is the maximum of: (1/2) sum_a alpha_a (x) v_a.
std::vector<double> bob_dual_coefficients(const BccfProtocol& proto, const BobDual& dual);

/// Upper bounds on the matching cheating probabilities. Throw
/// InfeasibleDualError (naming the worst constraint) on infeasible input.
double eval_dual_bob(const BccfProtocol& proto, const BobDual& dual);
double eval_dual_alice(const BccfProtocol& proto, const AliceDual& dual);

/// Bob's w_1..w_n: w[j] is indexed by bob_decision_space(j+1) and the bound
/// is the sum of w[0] over x_1.
std::vector<std::vector<double>> bob_dual_levels(const BccfProtocol& proto, const BobDual& dual);
/// Alice's z_1..z_{n+1}: z[j] is indexed by history_space(j); z[0][0] is the bound.
std::vector<std::vector<double>> alice_dual_levels(const BccfProtocol& proto, const AliceDual& dual);

}  // namespace bccf
