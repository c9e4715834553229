#pragma once

// Bob's and Alice's cheating polytopes.
//
// Layouts:
//   * Bob level j (p_j) is indexed by the interleaved history A1 x B1 x ... x Aj x Bj.
//   * Alice level j (s_j) is indexed by A1 x B1 x ... x B_{j-1} x Aj.
//   * Bob's terminal array p_n is also exposed in "xy" layout: x * |B| + y.
//   * Alice's final array s is in "axy" layout: (a * |A| + x) * |B| + y.
// The objectives only read the terminal arrays; the earlier levels are
// marginals of the terminal one and are rebuilt on demand.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bccf/core.hpp"

namespace bccf {

class TooLargeError : public BccfError {
 public:
  using BccfError::BccfError;
};

struct BobCheatVars {
  std::vector<std::vector<double>> levels;  // levels[j] is p_{j+1}
};

struct AliceCheatVars {
  std::vector<std::vector<double>> levels;  // levels[j] is s_{j+1}
  std::vector<double> s;                    // final, axy layout
};

/// A Boolean vertex of a cheating polytope described by the cheater's choices.
///
/// Bob: choices[j][h] = y_{j+1} for h in bob_decision_space(j+1).
/// Alice: choices[j][h] = x_{j+1} for h in alice_decision_space(j+1), and
/// final_bit[h] = a for every complete history h in history_space(n).
struct DeterministicStrategy {
  Party party = Party::Bob;
  std::vector<std::vector<std::uint32_t>> choices;
  std::vector<std::uint8_t> final_bit;

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

struct MembershipReport {
  bool member = false;
  double max_violation = 0.0;
  std::string worst_constraint;
};

MembershipReport membership(const BccfProtocol& proto, const BobCheatVars& vars,
                            double eps = kEpsFeas);
MembershipReport membership(const BccfProtocol& proto, const AliceCheatVars& vars,
                            double eps = kEpsFeas);

BobCheatVars bob_strategy_point(const BccfProtocol& proto, const DeterministicStrategy& strat);
AliceCheatVars alice_strategy_point(const BccfProtocol& proto, const DeterministicStrategy& strat);

/// Terminal array p_n of a Bob point in xy layout.
std::vector<double> bob_terminal(const BccfProtocol& proto, const BobCheatVars& vars);
/// Rebuilds the full chain from a terminal array in xy layout.
BobCheatVars bob_chain_from_terminal(const BccfProtocol& proto, std::span<const double> p_xy);
AliceCheatVars alice_chain_from_terminal(const BccfProtocol& proto, std::span<const double> s_axy);

/// Strictly positive interior points used to start the solvers: Bob answers
/// uniformly, Alice sends uniform messages and reveals a uniform bit.
std::vector<double> bob_barycenter(const BccfProtocol& proto);
std::vector<double> alice_barycenter(const BccfProtocol& proto);

/// Honest play with committed bit `b` (Bob) or `a` (Alice), as terminal arrays.
std::vector<double> bob_honest_terminal(const BccfProtocol& proto, int b);
std::vector<double> alice_honest_terminal(const BccfProtocol& proto, int a);

template <class T>
struct LmoResult {
  T value{};
  DeterministicStrategy strategy;
  std::vector<double> vertex;  // terminal Boolean array (xy for Bob, axy for Alice)
};

/// max over P_B of <c, p_n> for c in xy layout:
/// sum_{x1} max_{y1} ... sum_{xn} max_{yn} c_{x,y}; ties go to the smallest y.
template <class T>
LmoResult<T> lmo_bob_t(const BccfProtocol& proto, std::span<const T> c);

/// max over P_A of <c, s> for c in axy layout:
/// max_{x1} sum_{y1} ... max_{xn} sum_{yn} max_a c_{a,x,y}; ties go to the smallest index.
template <class T>
LmoResult<T> lmo_alice_t(const BccfProtocol& proto, std::span<const T> c);

LmoResult<double> lmo_bob(const BccfProtocol& proto, std::span<const double> c);
LmoResult<double> lmo_alice(const BccfProtocol& proto, std::span<const double> c);

/// Exhaustive, duplicate-free enumeration of the deterministic strategies of one party.
class StrategyEnumerator {
 public:
  static constexpr double kDefaultGuard = 1e6;

  /// Throws TooLargeError when the number of strategies exceeds `guard`.
  StrategyEnumerator(const BccfProtocol& proto, Party party, double guard = kDefaultGuard);

  /// Closed-form count: product over decision points of their fan-out.
  std::uint64_t count() const { return count_; }
  std::optional<DeterministicStrategy> next();

  static double strategy_count(const BccfProtocol& proto, Party party);

 private:
  DeterministicStrategy assemble() const;

  Party party_;
  std::vector<std::size_t> level_sizes_;  // decision points per level
  std::vector<std::uint32_t> radices_;    // one per slot
  std::vector<std::uint32_t> digits_;
  std::size_t final_slots_ = 0;
  std::uint64_t count_ = 0;
  bool done_ = false;
};

// ---------------------------------------------------------------------------

template <class T>
LmoResult<T> lmo_bob_t(const BccfProtocol& proto, std::span<const T> c) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size(), n = proto.rounds();
  if (c.size() != na * nb) throw DimensionError("lmo_bob: coefficient array must have |A||B| entries");
  std::vector<T> f(na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) f[proto.interleave(x, y)] = c[x * nb + y];

  LmoResult<T> out;
  out.strategy.party = Party::Bob;
  out.strategy.choices.resize(n);
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t by = proto.bob_dims()[j], ax = proto.alice_dims()[j];
    std::vector<T> g(f.size() / by);
    auto& choice = out.strategy.choices[j];
    choice.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < by; ++k)
        if (f[i * by + k] > f[i * by + best]) best = k;
      g[i] = f[i * by + best];
      choice[i] = static_cast<std::uint32_t>(best);
    }
    std::vector<T> s(g.size() / ax, T(0));
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t k = 0; k < ax; ++k) s[i] += g[i * ax + k];
    f = std::move(s);
  }
  out.value = f[0];
  out.vertex = bob_terminal(proto, bob_strategy_point(proto, out.strategy));
  return out;
}

template <class T>
LmoResult<T> lmo_alice_t(const BccfProtocol& proto, std::span<const T> c) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size(), n = proto.rounds();
  if (c.size() != 2 * na * nb) {
    throw DimensionError("lmo_alice: coefficient array must have 2|A||B| entries");
  }
  LmoResult<T> out;
  out.strategy.party = Party::Alice;
  out.strategy.choices.resize(n);
  out.strategy.final_bit.assign(na * nb, 0);
  std::vector<T> f(na * nb);
  for (std::size_t x = 0; x < na; ++x) {
    for (std::size_t y = 0; y < nb; ++y) {
      const std::size_t h = proto.interleave(x, y);
      const T& c0 = c[x * nb + y];
      const T& c1 = c[(na + x) * nb + y];
      const bool one = c1 > c0;
      f[h] = one ? c1 : c0;
      out.strategy.final_bit[h] = one ? 1 : 0;
    }
  }
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t by = proto.bob_dims()[j], ax = proto.alice_dims()[j];
    std::vector<T> s(f.size() / by, T(0));
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t k = 0; k < by; ++k) s[i] += f[i * by + k];
    std::vector<T> g(s.size() / ax);
    auto& choice = out.strategy.choices[j];
    choice.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < ax; ++k)
        if (s[i * ax + k] > s[i * ax + best]) best = k;
      g[i] = s[i * ax + best];
      choice[i] = static_cast<std::uint32_t>(best);
    }
    f = std::move(g);
  }
  out.value = f[0];
  out.vertex = alice_strategy_point(proto, out.strategy).s;
  return out;
}

}  // namespace bccf
