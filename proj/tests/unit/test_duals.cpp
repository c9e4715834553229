#include "bccf/duals.hpp"
#include "bccf/io.hpp"
#include "doctest.h"

using namespace bccf;

namespace {

BobDual listed_v() {
  BobDual v;
  v.outcome = Outcome::One;
  v.v0 = {0.75, 0.0, 1.5};
  v.v1 = {0.75, 1.5, 0.0};
  return v;
}

AliceDual listed_z() {
  AliceDual z;
  z.outcome = Outcome::Zero;
  z.z = {0.25, 0.25, 0.25, 0.0, 0.0, 0.0};
  return z;
}

}  // namespace

TEST_CASE("listed three-quarters duals") {
  const auto p = three_quarters_protocol();
  const auto v = listed_v();
  CHECK(check_feasibility(p, v).feasible);
  CHECK(eval_dual_bob(p, v) == doctest::Approx(0.75).epsilon(1e-15));
  const auto w = bob_dual_levels(p, v);
  REQUIRE(w.size() == 1);
  CHECK(w[0][0] == doctest::Approx(0.75));
  CHECK(w[0][1] == doctest::Approx(0.0));

  const auto z = listed_z();
  CHECK(check_feasibility(p, z).feasible);
  CHECK(eval_dual_alice(p, z) == doctest::Approx(0.75).epsilon(1e-15));
  const auto zl = alice_dual_levels(p, z);
  REQUIRE(zl.size() == 2);
  CHECK(zl[0][0] == doctest::Approx(0.75));
}

TEST_CASE("bob feasibility by hand") {
  // towards 0, v_0 answers beta0 = [1/2, 1/2, 0] and v_1 answers beta1 = [1/2, 0, 1/2]
  const auto p = three_quarters_protocol();
  BobDual v;
  v.outcome = Outcome::Zero;
  v.v0 = {1.0, 1.0, 0.0};
  v.v1 = {1.0, 0.0, 1.0};
  CHECK(check_feasibility(p, v).feasible);
  v.v0 = {0.9, 1.0, 0.0};
  const auto f = check_feasibility(p, v);
  CHECK_FALSE(f.feasible);
  CHECK(f.max_violation == doctest::Approx(0.5 / 0.9 + 0.5 - 1.0));
  CHECK_THROWS_AS(eval_dual_bob(p, v), InfeasibleDualError);
}

TEST_CASE("alice feasibility by hand") {
  const auto p = three_quarters_protocol();
  auto z = listed_z();
  z.z[0] = 0.2;  // a = 0, y = 0: (1/2 * 1 / 2) / 0.2 > 1
  CHECK_FALSE(check_feasibility(p, z).feasible);
  CHECK_THROWS_AS(eval_dual_alice(p, z), InfeasibleDualError);
  z.z[0] = -0.1;
  CHECK_FALSE(check_feasibility(p, z).feasible);
}

TEST_CASE("raising a feasible dual keeps it feasible and raises the bound") {
  const auto p = three_quarters_protocol();
  auto v = listed_v();
  const double before = eval_dual_bob(p, v);
  for (auto& e : v.v0) e += 0.1;
  CHECK(check_feasibility(p, v).feasible);
  CHECK(eval_dual_bob(p, v) >= before);
  auto z = listed_z();
  const double zb = eval_dual_alice(p, z);
  for (auto& e : z.z) e *= 1.2;
  CHECK(eval_dual_alice(p, z) == doctest::Approx(1.2 * zb));
}
