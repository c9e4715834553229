#include "bccf/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bccf {

namespace {

template <class T>
std::vector<T> bob_coeffs(const BccfProtocol& proto, Outcome outcome) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<T> c(na * nb, T(0));
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t x = 0; x < na; ++x)
      for (std::size_t y = 0; y < nb; ++y)
        if (beta.in_support(y)) c[x * nb + y] += T(alpha[x]) / 2;
  }
  return c;
}

template <class T>
std::vector<T> alice_coeffs(const BccfProtocol& proto, Outcome outcome) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<T> c(2 * na * nb, T(0));
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t x = 0; x < na; ++x) {
      if (!alpha.in_support(x)) continue;
      for (std::size_t y = 0; y < nb; ++y) c[(a * na + x) * nb + y] = T(beta[y]) / 2;
    }
  }
  return c;
}

}  // namespace

std::vector<double> classical_bob_coefficients(const BccfProtocol& proto, Outcome outcome) {
  return bob_coeffs<double>(proto, outcome);
}

std::vector<double> classical_alice_coefficients(const BccfProtocol& proto, Outcome outcome) {
  return alice_coeffs<double>(proto, outcome);
}

std::vector<Rational> classical_bob_coefficients_exact(const BccfProtocol& proto, Outcome outcome) {
  return bob_coeffs<Rational>(proto, outcome);
}

std::vector<Rational> classical_alice_coefficients_exact(const BccfProtocol& proto, Outcome outcome) {
  return alice_coeffs<Rational>(proto, outcome);
}

ClassicalResult classical_cheat(const BccfProtocol& proto, Party party, Outcome outcome) {
  if (party == Party::Bob) {
    auto r = lmo_bob(proto, classical_bob_coefficients(proto, outcome));
    return {r.value, std::move(r.strategy)};
  }
  auto r = lmo_alice(proto, classical_alice_coefficients(proto, outcome));
  return {r.value, std::move(r.strategy)};
}

Rational classical_cheat_exact(const BccfProtocol& proto, Party party, Outcome outcome) {
  if (party == Party::Bob) {
    const auto c = classical_bob_coefficients_exact(proto, outcome);
    return lmo_bob_t<Rational>(proto, std::span<const Rational>(c)).value;
  }
  const auto c = classical_alice_coefficients_exact(proto, outcome);
  return lmo_alice_t<Rational>(proto, std::span<const Rational>(c)).value;
}

double alice_info_bound(const BccfProtocol& proto) {
  return 0.5 + 0.5 * trace_distance(proto.beta(0), proto.beta(1));
}

double bob_firstmsg_bound(const BccfProtocol& proto) {
  const auto m0 = prefix_marginal(proto.alpha(0).values(), proto.alice_space(), 1);
  const auto m1 = prefix_marginal(proto.alpha(1).values(), proto.alice_space(), 1);
  return 0.5 + 0.5 * trace_distance(m0, m1);
}

ClassicalProfile classical_security_profile(const BccfProtocol& proto, double eps) {
  ClassicalProfile p;
  for (int c = 0; c < 2; ++c) {
    p.probs[0][c] = classical_cheat(proto, Party::Alice, outcome_from_int(c)).prob;
    p.probs[1][c] = classical_cheat(proto, Party::Bob, outcome_from_int(c)).prob;
  }
  const bool alice = std::max(p.alice(0), p.alice(1)) >= 1.0 - eps;
  const bool bob = std::max(p.bob(0), p.bob(1)) >= 1.0 - eps;
  if (alice == bob) {
    std::ostringstream os;
    os.precision(17);
    os << "classical profile has " << (alice ? "two" : "no") << " perfect cheaters: Alice ("
       << p.alice(0) << ", " << p.alice(1) << "), Bob (" << p.bob(0) << ", " << p.bob(1) << ")";
    throw TheoremViolation(os.str());
  }
  p.perfect_cheater = alice ? Party::Alice : Party::Bob;
  double top = 0.0;
  for (const auto& row : p.probs) top = std::max({top, row[0], row[1]});
  p.bias = top - 0.5;
  return p;
}

BobDual classical_bob_dual(const BccfProtocol& proto, Outcome outcome) {
  BobDual d;
  d.outcome = outcome;
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, outcome));
    std::vector<double> v(proto.bob_size(), 0.0);
    for (std::size_t y : beta.support()) v[y] = 1.0;
    (a == 0 ? d.v0 : d.v1) = std::move(v);
  }
  return d;
}

AliceDual classical_alice_dual(const BccfProtocol& proto, Outcome outcome) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  AliceDual d;
  d.outcome = outcome;
  d.z.assign(na * nb, 0.0);
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t x : proto.alpha(a).support())
      for (std::size_t y = 0; y < nb; ++y) d.z[x * nb + y] = std::max(d.z[x * nb + y], 0.5 * beta[y]);
  }
  return d;
}

}  // namespace bccf
