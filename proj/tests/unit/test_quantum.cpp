#include <cmath>
#include <random>

#include "bccf/io.hpp"
#include "bccf/quantum.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace bccf;

TEST_CASE("three-quarters protocol: all four values are 3/4") {
  const auto p = three_quarters_protocol();
  for (Party party : {Party::Alice, Party::Bob})
    for (int c = 0; c < 2; ++c) {
      const auto r = solve_quantum(p, party, outcome_from_int(c));
      CHECK(r.converged);
      CHECK(r.value == doctest::Approx(0.75).epsilon(1e-6));
      CHECK(r.gap <= 1e-6);
      CHECK(r.gap >= -1e-9);
    }
}

TEST_CASE("honest play by hand") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = oracle::random_protocol(rng, 1 + trial % 3, 3);
    const double fb = fidelity(p.beta(0), p.beta(1));
    for (int c = 0; c < 2; ++c)
      for (int b = 0; b < 2; ++b) {
        // both a compare against the committed beta_b: 1/2 (F(b, b) + F(b, other))
        CHECK(bob_objective(p, outcome_from_int(c), bob_honest_terminal(p, b)) ==
              doctest::Approx(0.5 * (1 + fb)).epsilon(1e-12));
        CHECK(alice_objective(p, outcome_from_int(c), alice_honest_terminal(p, b)) ==
              doctest::Approx(0.5).epsilon(1e-12));
      }
  }
}

TEST_CASE("n = 1, 2x2 against grid search") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = oracle::random_protocol_dims(rng, {2}, {2});
    for (int c = 0; c < 2; ++c) {
      CHECK(solve_quantum(p, Party::Bob, outcome_from_int(c)).value ==
            doctest::Approx(oracle::quantum_grid_bob(p, c)).epsilon(1e-3));
      CHECK(solve_quantum(p, Party::Alice, outcome_from_int(c)).value ==
            doctest::Approx(oracle::quantum_grid_alice(p, c)).epsilon(1e-3));
    }
  }
}

TEST_CASE("gradients match central differences") {
  std::mt19937_64 rng(23);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_protocol(rng, 1 + trial % 3, 3);
    const auto oc = outcome_from_int(trial % 2);
    for (Party party : {Party::Bob, Party::Alice}) {
      auto x = party == Party::Bob ? oracle::random_bob_interior(rng, p) : oracle::random_alice_interior(rng, p);
      const auto g = party == Party::Bob ? bob_objective_grad(p, oc, x) : alice_objective_grad(p, oc, x);
      auto f = [&](const std::vector<double>& y) {
        return party == Party::Bob ? bob_objective(p, oc, y) : alice_objective(p, oc, y);
      };
      CHECK(g.value == doctest::Approx(f(x)).epsilon(1e-14));
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = f(x);
        x[i] = keep - h;
        const double down = f(x);
        x[i] = keep;
        CHECK(std::abs(g.gradient[i] - (up - down) / (2 * h)) <= 1e-5 * std::max(1.0, std::abs(g.gradient[i])));
      }
    }
  }
}

TEST_CASE("certificates: feasible, re-evaluate to the reported bound, weak duality") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    const auto p = oracle::random_protocol(rng, 1 + trial % 3, 3);
    for (int c = 0; c < 2; ++c) {
      const auto oc = outcome_from_int(c);
      const auto rb = solve_quantum(p, Party::Bob, oc);
      CHECK(check_feasibility(p, rb.bob_dual).feasible);
      CHECK(eval_dual_bob(p, rb.bob_dual) == doctest::Approx(rb.dual_value).epsilon(1e-12));
      CHECK(rb.dual_value - rb.value >= -1e-9);
      CHECK(bob_objective(p, oc, rb.primal) == doctest::Approx(rb.value).epsilon(1e-12));
      const auto ra = solve_quantum(p, Party::Alice, oc);
      CHECK(check_feasibility(p, ra.alice_dual).feasible);
      CHECK(eval_dual_alice(p, ra.alice_dual) == doctest::Approx(ra.dual_value).epsilon(1e-12));
      CHECK(ra.dual_value - ra.value >= -1e-9);
      CHECK(alice_objective(p, oc, ra.primal) == doctest::Approx(ra.value).epsilon(1e-12));
      CHECK(membership(p, alice_chain_from_terminal(p, ra.primal)).member);
      CHECK(membership(p, bob_chain_from_terminal(p, rb.primal)).member);
    }
  }
}

TEST_CASE("swapping the betas swaps the outcomes") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = oracle::random_protocol(rng, 1 + trial % 3, 3);
    const auto s = p.with_swapped_betas();
    for (Party party : {Party::Alice, Party::Bob})
      for (int c = 0; c < 2; ++c)
        CHECK(solve_quantum(p, party, outcome_from_int(c)).value ==
              doctest::Approx(solve_quantum(s, party, outcome_from_int(1 - c)).value).epsilon(2e-6));
  }
}

TEST_CASE("every variant returns a valid certificate") {
  std::mt19937_64 rng(71);
  const auto p = oracle::random_protocol(rng, 2, 2, 0.0);
  for (auto v : {FwVariant::Vanilla, FwVariant::Away, FwVariant::Pairwise, FwVariant::Corrective, FwVariant::Barrier,
                 FwVariant::Auto}) {
    SolveOptions o;
    o.variant = v;
    o.max_iter = 300;
    for (Party party : {Party::Alice, Party::Bob}) {
      const auto r = solve_quantum(p, party, Outcome::One, o);
      CHECK_MESSAGE(r.gap >= -1e-9, to_string(v));
      CHECK(r.converged == (r.gap <= o.gap_tol));
      if (v == FwVariant::Corrective || v == FwVariant::Barrier || v == FwVariant::Auto) CHECK(r.converged);
    }
  }
}

TEST_CASE("the seed does not change the result") {
  std::mt19937_64 rng(83);
  const auto p = oracle::random_protocol(rng, 2, 2);
  SolveOptions a, b;
  a.seed = 1;
  b.seed = 12345;
  const auto ra = solve_quantum(p, Party::Alice, Outcome::Zero, a);
  const auto rb = solve_quantum(p, Party::Alice, Outcome::Zero, b);
  CHECK(ra.value == rb.value);
  CHECK(ra.primal == rb.primal);
}
