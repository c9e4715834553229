#pragma once

// Log-barrier path following for Alice's reduced problem, over all levels of
// her cheating polytope. Internal to the quantum solver.

#include <functional>
#include <span>
#include <vector>

#include "bccf/core.hpp"

namespace bccf::detail {

struct BarrierTrace {
  std::vector<double> s;  // last feasible point handed to the callback (axy)
  int newton_steps = 0;
  bool stopped = false;  // the callback accepted a point
};

/// Follows the central path from the barycenter. After each centering the
/// current point, made exactly feasible, goes to `accept`; returning true
/// ends the run. `max_steps` bounds the total number of Newton steps.
BarrierTrace alice_barrier_path(const BccfProtocol& proto, Outcome outcome, int max_steps,
                                const std::function<bool(std::span<const double>)>& accept);

/// Rebuilds an exactly feasible Alice point (levels and final array) from
/// nonnegative, approximately consistent values by renormalizing every
/// node's children top-down. Returns the final array in axy layout.
std::vector<double> alice_repair(const BccfProtocol& proto, const std::vector<std::vector<double>>& levels,
                                 std::span<const double> s);

}  // namespace bccf::detail
