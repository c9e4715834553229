#include <cmath>

#include "bccf/core.hpp"
#include "doctest.h"

using namespace bccf;

TEST_CASE("index space encodes row-major with the first digit most significant") {
  IndexSpace s({2, 3, 2});
  CHECK(s.size() == 12);
  const std::vector<std::size_t> d{1, 2, 0};
  CHECK(s.encode(d) == 1 * 6 + 2 * 2 + 0);
  CHECK(s.decode(7) == std::vector<std::size_t>{1, 0, 1});
  CHECK(s.suffix_size(1) == 6);
  CHECK(s.prefix(2).size() == 6);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.encode(s.decode(i)) == i);
}

TEST_CASE("prob dist validation") {
  CHECK_THROWS_AS(ProbDist({0.5, 0.4}), NormalizationError);
  CHECK_THROWS_AS(ProbDist({-0.1, 1.1}), DomainError);
  CHECK_NOTHROW(ProbDist({0.5, 0.5 + 1e-11}));
  const auto u = ProbDist::uniform(4);
  CHECK(u[2] == doctest::Approx(0.25));
  const auto pm = ProbDist::point_mass(3, 1);
  CHECK(pm.support() == std::vector<std::size_t>{1});
}

TEST_CASE("protocol dimension checks") {
  CHECK_THROWS_AS(BccfProtocol({2}, {3}, ProbDist({1, 0}), ProbDist({1, 0}), ProbDist({1, 0}), ProbDist({0, 1})),
                  DimensionError);
  CHECK_THROWS_AS(BccfProtocol({2}, {2, 1}, ProbDist({1, 0}), ProbDist({1, 0, 0}), ProbDist({1, 0}), ProbDist({0, 1})),
                  DimensionError);
}

TEST_CASE("interleaving round trips") {
  BccfProtocol p({2, 2}, {3, 2}, ProbDist::uniform(4), ProbDist::uniform(4), ProbDist::uniform(6),
                 ProbDist::uniform(6));
  CHECK(p.history_space(2).size() == 24);
  CHECK(p.bob_decision_space(2).size() == 2 * 3 * 2);
  CHECK(p.alice_decision_space(2).size() == 2 * 3);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 6; ++y) {
      const auto [x2, y2] = p.deinterleave(p.interleave(x, y));
      CHECK(x2 == x);
      CHECK(y2 == y);
    }
  // history digits are x1 y1 x2 y2
  CHECK(p.interleave(1 * 2 + 0, 2 * 2 + 1) == ((1 * 3 + 2) * 2 + 0) * 2 + 1);
}

TEST_CASE("fidelity and trace distance") {
  const std::vector<double> a{1, 0}, b{0.5, 0.5};
  CHECK(fidelity(a, b) == doctest::Approx(0.5));
  CHECK(fidelity(b, b) == doctest::Approx(1.0));
  CHECK(trace_distance(ProbDist({0.5, 0.5, 0}), ProbDist({0.5, 0, 0.5})) == doctest::Approx(0.5));
  // F(p, q) = (sum sqrt(p q))^2, by hand
  const std::vector<double> p{0.2, 0.3, 0.5}, q{0.6, 0.1, 0.3};
  const double s = std::sqrt(0.12) + std::sqrt(0.03) + std::sqrt(0.15);
  CHECK(fidelity(p, q) == doctest::Approx(s * s).epsilon(1e-14));
  // unnormalized arguments are allowed
  const std::vector<double> half{0.1, 0.15, 0.25};
  CHECK(fidelity(half, q) == doctest::Approx(0.5 * s * s).epsilon(1e-14));
}

TEST_CASE("max-sum identity") {
  const auto m = maxsum_identity_check(ProbDist({0.5, 0.5, 0}), ProbDist({0.5, 0, 0.5}));
  CHECK(m.lhs == doctest::Approx(1.5));
  CHECK(m.rhs == doctest::Approx(1.5));
  const auto r = maxsum_identity_check(ProbDist({0.1, 0.2, 0.7}), ProbDist({0.4, 0.4, 0.2}));
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-15));
}

TEST_CASE("honest run and prefix tables") {
  BccfProtocol p({2, 2}, {2, 1}, ProbDist({0.1, 0.2, 0.3, 0.4}), ProbDist({0.4, 0.3, 0.2, 0.1}), ProbDist({0.5, 0.5}),
                 ProbDist({1, 0}));
  const auto h = honest_outcome_distribution(p);
  CHECK(h.p0 == doctest::Approx(0.5));
  CHECK(h.p1 == doctest::Approx(0.5));
  CHECK(h.p_abort == doctest::Approx(0.0));
  const auto t = honest_alice_prefix_table(p);
  REQUIRE(t.size() == 3);
  CHECK(t[0][0] == doctest::Approx(1.0));
  CHECK(t[1][0] == doctest::Approx(0.5 * (0.3 + 0.7)));
  CHECK(t[2][3] == doctest::Approx(0.25));
  PartialString z{PartialString::Role::AlicePrefix, {1}};
  CHECK(honest_prefix_prob(p, z) == doctest::Approx(0.5));
  const std::vector<double> d{0.1, 0.2, 0.3, 0.4};
  CHECK(prefix_marginal(d, IndexSpace({2, 2}), 1) == std::vector<double>{0.1 + 0.2, 0.3 + 0.4});
}

TEST_CASE("swapping betas") {
  BccfProtocol p({2}, {3}, ProbDist({1, 0}), ProbDist({1, 0}), ProbDist({0.5, 0.5, 0}), ProbDist({0.5, 0, 0.5}));
  const auto s = p.with_swapped_betas();
  CHECK(s.beta(0) == p.beta(1));
  CHECK(s.beta(1) == p.beta(0));
  CHECK(s.with_swapped_betas() == p);
  CHECK(target_bit(0, Outcome::Zero) == 0);
  CHECK(target_bit(0, Outcome::One) == 1);
}
