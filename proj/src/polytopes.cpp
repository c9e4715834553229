#include "bccf/polytopes.hpp"

#include <cmath>
#include <sstream>

namespace bccf {

namespace {

class ViolationTracker {
 public:
  void observe(double violation, const auto& describe) {
    if (violation > worst_) {
      worst_ = violation;
      label_ = describe();
    }
  }
  MembershipReport report(double eps) const { return {worst_ <= eps, worst_, label_}; }

 private:
  double worst_ = 0.0;
  std::string label_;
};

std::string at(const char* what, std::size_t level, std::size_t index) {
  std::ostringstream os;
  os << what << " level " << level << " index " << index;
  return os.str();
}

void check_size(const std::vector<double>& v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) +
                         " entries, got " + std::to_string(v.size()));
  }
}

void check_nonnegative(const std::vector<double>& v, std::size_t level, ViolationTracker& t) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0) t.observe(-v[i], [&] { return at("nonnegativity", level, i); });
}

}  // namespace

MembershipReport membership(const BccfProtocol& proto, const BobCheatVars& vars, double eps) {
  const std::size_t n = proto.rounds();
  if (vars.levels.size() != n) throw DimensionError("Bob point must have one array per round");
  for (std::size_t j = 0; j < n; ++j)
    check_size(vars.levels[j], proto.history_space(j + 1).size(), "Bob level");

  ViolationTracker t;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& p = vars.levels[j];
    check_nonnegative(p, j + 1, t);
    const std::size_t ax = proto.alice_dims()[j], by = proto.bob_dims()[j];
    const std::size_t prev = j == 0 ? 1 : vars.levels[j - 1].size();
    for (std::size_t h = 0; h < prev; ++h) {
      const double rhs = j == 0 ? 1.0 : vars.levels[j - 1][h];
      for (std::size_t x = 0; x < ax; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < by; ++y) sum += p[(h * ax + x) * by + y];
        t.observe(std::abs(sum - rhs), [&] { return at("marginal", j + 1, h * ax + x); });
      }
    }
  }
  return t.report(eps);
}

MembershipReport membership(const BccfProtocol& proto, const AliceCheatVars& vars, double eps) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  if (vars.levels.size() != n) throw DimensionError("Alice point must have one array per round");
  for (std::size_t j = 0; j < n; ++j)
    check_size(vars.levels[j], proto.bob_decision_space(j + 1).size(), "Alice level");
  check_size(vars.s, 2 * na * nb, "Alice final array");

  ViolationTracker t;
  {
    double sum = 0.0;
    for (double v : vars.levels[0]) sum += v;
    t.observe(std::abs(sum - 1.0), [] { return std::string("marginal level 1"); });
  }
  for (std::size_t j = 0; j < n; ++j) check_nonnegative(vars.levels[j], j + 1, t);
  check_nonnegative(vars.s, n + 1, t);

  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t ax = proto.alice_dims()[j], by_prev = proto.bob_dims()[j - 1];
    const std::size_t hist = proto.history_space(j).size();
    for (std::size_t h = 0; h < hist; ++h) {
      double sum = 0.0;
      for (std::size_t x = 0; x < ax; ++x) sum += vars.levels[j][h * ax + x];
      const double rhs = vars.levels[j - 1][h / by_prev];
      t.observe(std::abs(sum - rhs), [&] { return at("marginal", j + 1, h); });
    }
  }
  const std::size_t by_last = proto.bob_dims()[n - 1];
  for (std::size_t h = 0; h < na * nb; ++h) {
    const auto [x, y] = proto.deinterleave(h);
    const double sum = vars.s[x * nb + y] + vars.s[(na + x) * nb + y];
    const double rhs = vars.levels[n - 1][h / by_last];
    t.observe(std::abs(sum - rhs), [&] { return at("marginal", n + 1, h); });
  }
  return t.report(eps);
}

BobCheatVars bob_strategy_point(const BccfProtocol& proto, const DeterministicStrategy& strat) {
  const std::size_t n = proto.rounds();
  if (strat.party != Party::Bob || strat.choices.size() != n) {
    throw DimensionError("not a Bob strategy for this protocol");
  }
  BobCheatVars out;
  std::vector<double> prev{1.0};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t ax = proto.alice_dims()[j], by = proto.bob_dims()[j];
    if (strat.choices[j].size() != prev.size() * ax) throw DimensionError("strategy level size mismatch");
    std::vector<double> p(prev.size() * ax * by, 0.0);
    for (std::size_t h = 0; h < prev.size(); ++h) {
      for (std::size_t x = 0; x < ax; ++x) {
        const std::uint32_t y = strat.choices[j][h * ax + x];
        if (y >= by) throw IndexError("strategy answer out of range");
        p[(h * ax + x) * by + y] = prev[h];
      }
    }
    out.levels.push_back(p);
    prev = std::move(p);
  }
  return out;
}

AliceCheatVars alice_strategy_point(const BccfProtocol& proto, const DeterministicStrategy& strat) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  if (strat.party != Party::Alice || strat.choices.size() != n || strat.final_bit.size() != na * nb) {
    throw DimensionError("not an Alice strategy for this protocol");
  }
  AliceCheatVars out;
  // `prev` is indexed by the history space of j complete rounds.
  std::vector<double> prev{1.0};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t ax = proto.alice_dims()[j], by = proto.bob_dims()[j];
    if (strat.choices[j].size() != prev.size()) throw DimensionError("strategy level size mismatch");
    std::vector<double> s(prev.size() * ax, 0.0);
    for (std::size_t h = 0; h < prev.size(); ++h) {
      const std::uint32_t x = strat.choices[j][h];
      if (x >= ax) throw IndexError("strategy message out of range");
      s[h * ax + x] = prev[h];
    }
    std::vector<double> next(s.size() * by);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = s[i / by];
    out.levels.push_back(std::move(s));
    prev = std::move(next);
  }
  out.s.assign(2 * na * nb, 0.0);
  for (std::size_t h = 0; h < na * nb; ++h) {
    const auto [x, y] = proto.deinterleave(h);
    const int a = strat.final_bit[h];
    out.s[(a * na + x) * nb + y] = prev[h];
  }
  return out;
}

std::vector<double> bob_terminal(const BccfProtocol& proto, const BobCheatVars& vars) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  const auto& last = vars.levels.at(proto.rounds() - 1);
  check_size(last, na * nb, "Bob terminal level");
  std::vector<double> out(na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) out[x * nb + y] = last[proto.interleave(x, y)];
  return out;
}

BobCheatVars bob_chain_from_terminal(const BccfProtocol& proto, std::span<const double> p_xy) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  if (p_xy.size() != na * nb) throw DimensionError("Bob terminal array must have |A||B| entries");
  BobCheatVars out;
  out.levels.resize(n);
  auto& last = out.levels[n - 1];
  last.assign(na * nb, 0.0);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) last[proto.interleave(x, y)] = p_xy[x * nb + y];
  for (std::size_t j = n - 1; j > 0; --j) {
    const std::size_t ax = proto.alice_dims()[j], by = proto.bob_dims()[j];
    const auto& cur = out.levels[j];
    std::vector<double> prev(cur.size() / (ax * by), 0.0);
    for (std::size_t h = 0; h < prev.size(); ++h)
      for (std::size_t y = 0; y < by; ++y) prev[h] += cur[(h * ax) * by + y];
    out.levels[j - 1] = std::move(prev);
  }
  return out;
}

AliceCheatVars alice_chain_from_terminal(const BccfProtocol& proto, std::span<const double> s_axy) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  if (s_axy.size() != 2 * na * nb) throw DimensionError("Alice final array must have 2|A||B| entries");
  AliceCheatVars out;
  out.s.assign(s_axy.begin(), s_axy.end());
  out.levels.resize(n);
  const std::size_t by_last = proto.bob_dims()[n - 1];
  std::vector<double> last(na * nb / by_last, 0.0);
  for (std::size_t h = 0; h < last.size(); ++h) {
    const auto [x, y] = proto.deinterleave(h * by_last);
    last[h] = s_axy[x * nb + y] + s_axy[(na + x) * nb + y];
  }
  out.levels[n - 1] = std::move(last);
  for (std::size_t j = n - 1; j > 0; --j) {
    const std::size_t ax = proto.alice_dims()[j], by_prev = proto.bob_dims()[j - 1];
    const auto& cur = out.levels[j];
    std::vector<double> prev(cur.size() / (ax * by_prev), 0.0);
    for (std::size_t h = 0; h < prev.size(); ++h)
      for (std::size_t x = 0; x < ax; ++x) prev[h] += cur[(h * by_prev) * ax + x];
    out.levels[j - 1] = std::move(prev);
  }
  return out;
}

std::vector<double> bob_barycenter(const BccfProtocol& proto) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  return std::vector<double>(na * nb, 1.0 / static_cast<double>(nb));
}

std::vector<double> alice_barycenter(const BccfProtocol& proto) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  return std::vector<double>(2 * na * nb, 0.5 / static_cast<double>(na));
}

std::vector<double> bob_honest_terminal(const BccfProtocol& proto, int b) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<double> p(na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) p[x * nb + y] = proto.beta(b)[y];
  return p;
}

std::vector<double> alice_honest_terminal(const BccfProtocol& proto, int a) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<double> s(2 * na * nb, 0.0);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) s[(a * na + x) * nb + y] = proto.alpha(a)[x];
  return s;
}

LmoResult<double> lmo_bob(const BccfProtocol& proto, std::span<const double> c) {
  return lmo_bob_t<double>(proto, c);
}

LmoResult<double> lmo_alice(const BccfProtocol& proto, std::span<const double> c) {
  return lmo_alice_t<double>(proto, c);
}

// ---------------------------------------------------------------------------
// StrategyEnumerator

double StrategyEnumerator::strategy_count(const BccfProtocol& proto, Party party) {
  double log_count = 0.0;
  for (std::size_t j = 0; j < proto.rounds(); ++j) {
    if (party == Party::Bob) {
      log_count += static_cast<double>(proto.bob_decision_space(j + 1).size()) *
                   std::log(static_cast<double>(proto.bob_dims()[j]));
    } else {
      log_count += static_cast<double>(proto.alice_decision_space(j + 1).size()) *
                   std::log(static_cast<double>(proto.alice_dims()[j]));
    }
  }
  if (party == Party::Alice) {
    log_count += static_cast<double>(proto.alice_size() * proto.bob_size()) * std::log(2.0);
  }
  return std::exp(log_count);
}

StrategyEnumerator::StrategyEnumerator(const BccfProtocol& proto, Party party, double guard)
    : party_(party) {
  const double estimate = strategy_count(proto, party);
  if (estimate > guard * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "too large for enumeration: about " << estimate << " " << to_string(party)
       << " strategies exceed the guard of " << guard;
    throw TooLargeError(os.str());
  }
  count_ = 1;
  for (std::size_t j = 0; j < proto.rounds(); ++j) {
    const std::size_t slots = party == Party::Bob ? proto.bob_decision_space(j + 1).size()
                                                  : proto.alice_decision_space(j + 1).size();
    const auto radix = static_cast<std::uint32_t>(party == Party::Bob ? proto.bob_dims()[j]
                                                                     : proto.alice_dims()[j]);
    level_sizes_.push_back(slots);
    for (std::size_t i = 0; i < slots; ++i) {
      radices_.push_back(radix);
      count_ *= radix;
    }
  }
  if (party == Party::Alice) {
    final_slots_ = proto.alice_size() * proto.bob_size();
    for (std::size_t i = 0; i < final_slots_; ++i) {
      radices_.push_back(2);
      count_ *= 2;
    }
  }
  digits_.assign(radices_.size(), 0);
}

DeterministicStrategy StrategyEnumerator::assemble() const {
  DeterministicStrategy s;
  s.party = party_;
  std::size_t pos = 0;
  for (std::size_t size : level_sizes_) {
    s.choices.emplace_back(digits_.begin() + pos, digits_.begin() + pos + size);
    pos += size;
  }
  for (std::size_t i = 0; i < final_slots_; ++i) s.final_bit.push_back(static_cast<std::uint8_t>(digits_[pos + i]));
  return s;
}

std::optional<DeterministicStrategy> StrategyEnumerator::next() {
  if (done_) return std::nullopt;
  DeterministicStrategy current = assemble();
  std::size_t k = digits_.size();
  while (k > 0) {
    --k;
    if (++digits_[k] < radices_[k]) break;
    digits_[k] = 0;
    if (k == 0) done_ = true;
  }
  if (digits_.empty()) done_ = true;
  return current;
}

}  // namespace bccf
