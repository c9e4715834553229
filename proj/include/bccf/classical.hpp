#pragma once

// Classical BCCF cheating probabilities. The classical problems are linear
// over the same polytopes, so a deterministic strategy is optimal and the
// backward-induction LMO solves them exactly.

#include <array>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bccf/core.hpp"
#include "bccf/duals.hpp"
#include "bccf/polytopes.hpp"

namespace bccf {

using Rational = boost::multiprecision::cpp_rational;

class TheoremViolation : public BccfError {
 public:
  using BccfError::BccfError;
};

struct ClassicalResult {
  double prob = 0.0;
  DeterministicStrategy strategy;
};

/// c_{x,y} = 1/2 sum_a alpha_{a,x} [y in supp beta_t(a)]
std::vector<double> classical_bob_coefficients(const BccfProtocol& proto, Outcome outcome);
/// c_{a,x,y} = 1/2 beta_{t(a),y} [x in supp alpha_a]
std::vector<double> classical_alice_coefficients(const BccfProtocol& proto, Outcome outcome);

ClassicalResult classical_cheat(const BccfProtocol& proto, Party party, Outcome outcome);

/// Same optimum in exact arithmetic. Every double converts to a rational
/// exactly, so dyadic inputs (1/2, 1/4, ...) give exact golden values.
Rational classical_cheat_exact(const BccfProtocol& proto, Party party, Outcome outcome);
std::vector<Rational> classical_bob_coefficients_exact(const BccfProtocol& proto, Outcome outcome);
std::vector<Rational> classical_alice_coefficients_exact(const BccfProtocol& proto, Outcome outcome);

/// 1/2 + 1/2 Delta(beta0, beta1)
double alice_info_bound(const BccfProtocol& proto);
/// 1/2 + 1/2 Delta of the first-message marginals of alpha0 and alpha1.
double bob_firstmsg_bound(const BccfProtocol& proto);

struct ClassicalProfile {
  // [party][outcome], party 0 = Alice, 1 = Bob
  std::array<std::array<double, 2>, 2> probs{};
  Party perfect_cheater = Party::Bob;
  double bias = 0.0;

  double alice(int c) const { return probs[0][c]; }
  double bob(int c) const { return probs[1][c]; }
};

/// All four classical values. Throws TheoremViolation unless exactly one
/// party cheats perfectly (value 1 within `eps`).
ClassicalProfile classical_security_profile(const BccfProtocol& proto, double eps = 1e-9);

/// Dual certificates matching the classical optimum: v_a = indicator of
/// supp(beta_t(a)); z_{x,y} = 1/2 max over {a : x in supp alpha_a} of beta_{t(a),y}.
BobDual classical_bob_dual(const BccfProtocol& proto, Outcome outcome);
AliceDual classical_alice_dual(const BccfProtocol& proto, Outcome outcome);

}  // namespace bccf
