#pragma once

// Reduced quantum cheating problems, solved by conditional gradient over the
// cheating polytopes and certified with succinct duals.
//
// Bob:   max over P_B of 1/2 sum_a F((alpha_a (x) I)^T p_n, beta_t(a))
// Alice: max over P_A of 1/2 sum_{a,y} beta_{t(a),y} F(s^{(a,y)}, alpha_a)
//
// Both objectives are concave and positively homogeneous, so the linear
// bound <grad f(x), v> maximized over the polytope equals f(x) plus the
// Frank-Wolfe gap, and the duals built below evaluate to exactly that bound
// (up to the gradient floor).

#include <cstdint>
#include <string>
#include <vector>

#include "bccf/core.hpp"
#include "bccf/duals.hpp"
#include "bccf/polytopes.hpp"

namespace bccf {

inline constexpr double kGradFloor = 1e-14;

struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> gradient;
};

/// p_n in xy layout.
double bob_objective(const BccfProtocol& proto, Outcome outcome, std::span<const double> p);
ObjectiveEval bob_objective_grad(const BccfProtocol& proto, Outcome outcome, std::span<const double> p);
/// s in axy layout.
double alice_objective(const BccfProtocol& proto, Outcome outcome, std::span<const double> s);
ObjectiveEval alice_objective_grad(const BccfProtocol& proto, Outcome outcome, std::span<const double> s);

/// v_{a,y} = lambda_a sqrt(beta_y / q_{a,y}) on supp(beta_t(a)), lambda_a = sum_y sqrt(beta_y q_{a,y}),
/// with q floored at kGradFloor. Feasible by construction.
BobDual bob_dual_from_primal(const BccfProtocol& proto, Outcome outcome, std::span<const double> p);
/// Per (a, y) the analogous multiplier on the slice s^{(a,y)}, combined with an entrywise max over a.
AliceDual alice_dual_from_primal(const BccfProtocol& proto, Outcome outcome, std::span<const double> s);

// Corrective: every new vertex is followed by an exact re-optimization over
// the convex hull of the active vertices (simplicial decomposition).
// Barrier: log-barrier path following over all of Alice's levels; Bob falls
// back to Corrective. Auto picks Barrier for Alice and Corrective for Bob.
enum class FwVariant { Vanilla, Away, Pairwise, Corrective, Barrier, Auto };

const char* to_string(FwVariant v);

struct SolveOptions {
  int max_iter = 5000;
  double gap_tol = 1e-6;
  std::uint64_t seed = 0;
  FwVariant variant = FwVariant::Auto;
  int dual_every = 10;  // iterations between certificate evaluations
};

struct QuantumResult {
  Party party = Party::Bob;
  Outcome outcome = Outcome::Zero;
  double value = 0.0;       // primal value of `primal`
  double dual_value = 0.0;  // bound certified by the stored dual
  double gap = 0.0;         // dual_value - value
  int iterations = 0;  // outer iterations, or Newton steps for the barrier
  bool converged = false;
  std::vector<double> primal;  // terminal array: p_n (xy) for Bob, s (axy) for Alice
  BobDual bob_dual;            // set when party == Bob
  AliceDual alice_dual;        // set when party == Alice
};

QuantumResult solve_quantum(const BccfProtocol& proto, Party party, Outcome outcome,
                            const SolveOptions& opts = {});

}  // namespace bccf
