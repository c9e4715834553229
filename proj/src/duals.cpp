#include "bccf/duals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bccf/polytopes.hpp"

namespace bccf {

namespace {

void record(DualFeasibility& f, double violation, const std::string& label) {
  if (violation > f.max_violation) {
    f.max_violation = violation;
    f.worst_constraint = label;
  }
}

void require_feasible(const DualFeasibility& f, const char* who) {
  if (!f.feasible) {
    std::ostringstream os;
    os << who << ": infeasible dual, worst constraint " << f.worst_constraint << " (violation "
       << f.max_violation << ")";
    throw InfeasibleDualError(os.str());
  }
}

}  // namespace

DualFeasibility check_feasibility(const BccfProtocol& proto, const BobDual& dual, double eps) {
  const std::size_t nb = proto.bob_size();
  if (dual.v0.size() != nb || dual.v1.size() != nb) throw DimensionError("Bob dual vectors must have |B| entries");
  DualFeasibility f;
  const double inf = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 2; ++a) {
    const auto& v = dual.v(a);
    const auto& beta = proto.beta(target_bit(a, dual.outcome));
    double sum = 0.0;
    for (std::size_t y = 0; y < nb; ++y) {
      if (v[y] < -kEpsZero) record(f, -v[y], "v" + std::to_string(a) + "[" + std::to_string(y) + "] >= 0");
      if (!beta.in_support(y)) continue;
      sum += v[y] > 0.0 ? beta[y] / v[y] : inf;
    }
    record(f, sum - 1.0, "sum beta/v" + std::to_string(a) + " <= 1");
  }
  f.feasible = f.max_violation <= eps;
  return f;
}

DualFeasibility check_feasibility(const BccfProtocol& proto, const AliceDual& dual, double eps) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  if (dual.z.size() != na * nb) throw DimensionError("Alice dual must have |A||B| entries");
  DualFeasibility f;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dual.z.size(); ++i)
    if (dual.z[i] < -kEpsZero) record(f, -dual.z[i], "z[" + std::to_string(i) + "] >= 0");
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, dual.outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (!beta.in_support(y)) continue;
      double sum = 0.0;
      for (std::size_t x = 0; x < na; ++x) {
        if (!alpha.in_support(x)) continue;
        const double z = dual.z[x * nb + y];
        sum += z > 0.0 ? 0.5 * beta[y] * alpha[x] / z : inf;
      }
      record(f, sum - 1.0, "a=" + std::to_string(a) + " y=" + std::to_string(y));
    }
  }
  f.feasible = f.max_violation <= eps;
  return f;
}

std::vector<double> bob_dual_coefficients(const BccfProtocol& proto, const BobDual& dual) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<double> c(na * nb, 0.0);
  for (int a = 0; a < 2; ++a)
    for (std::size_t x = 0; x < na; ++x)
      for (std::size_t y = 0; y < nb; ++y) c[x * nb + y] += 0.5 * proto.alpha(a)[x] * dual.v(a)[y];
  return c;
}

double eval_dual_bob(const BccfProtocol& proto, const BobDual& dual) {
  require_feasible(check_feasibility(proto, dual), "eval_dual_bob");
  return lmo_bob(proto, bob_dual_coefficients(proto, dual)).value;
}

double eval_dual_alice(const BccfProtocol& proto, const AliceDual& dual) {
  require_feasible(check_feasibility(proto, dual), "eval_dual_alice");
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  // z does not depend on the revealed bit, so the final max over a is trivial.
  std::vector<double> c(2 * na * nb);
  std::copy(dual.z.begin(), dual.z.end(), c.begin());
  std::copy(dual.z.begin(), dual.z.end(), c.begin() + static_cast<std::ptrdiff_t>(na * nb));
  return lmo_alice(proto, c).value;
}

std::vector<std::vector<double>> bob_dual_levels(const BccfProtocol& proto, const BobDual& dual) {
  const std::size_t n = proto.rounds(), na = proto.alice_size(), nb = proto.bob_size();
  const auto c = bob_dual_coefficients(proto, dual);
  std::vector<double> f(na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) f[proto.interleave(x, y)] = c[x * nb + y];

  std::vector<std::vector<double>> w(n);
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t by = proto.bob_dims()[j];
    std::vector<double> level(f.size() / by);
    for (std::size_t i = 0; i < level.size(); ++i)
      level[i] = *std::max_element(f.begin() + static_cast<std::ptrdiff_t>(i * by),
                                   f.begin() + static_cast<std::ptrdiff_t>((i + 1) * by));
    const std::size_t ax = proto.alice_dims()[j];
    f.assign(level.size() / ax, 0.0);
    for (std::size_t i = 0; i < level.size(); ++i) f[i / ax] += level[i];
    w[j] = std::move(level);
  }
  return w;
}

std::vector<std::vector<double>> alice_dual_levels(const BccfProtocol& proto, const AliceDual& dual) {
  const std::size_t n = proto.rounds(), na = proto.alice_size(), nb = proto.bob_size();
  std::vector<std::vector<double>> z(n + 1);
  z[n].assign(na * nb, 0.0);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) z[n][proto.interleave(x, y)] = dual.z.at(x * nb + y);
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t by = proto.bob_dims()[j], ax = proto.alice_dims()[j];
    const auto& next = z[j + 1];
    std::vector<double> summed(next.size() / by, 0.0);
    for (std::size_t i = 0; i < next.size(); ++i) summed[i / by] += next[i];
    std::vector<double> level(summed.size() / ax);
    for (std::size_t i = 0; i < level.size(); ++i)
      level[i] = *std::max_element(summed.begin() + static_cast<std::ptrdiff_t>(i * ax),
                                   summed.begin() + static_cast<std::ptrdiff_t>((i + 1) * ax));
    z[j] = std::move(level);
  }
  return z;
}

}  // namespace bccf
