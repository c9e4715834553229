#include <cmath>
#include <filesystem>
#include <random>

#include "bccf/analysis.hpp"
#include "bccf/io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support/oracles.hpp"

using namespace bccf;

TEST_CASE("protocol json round trip") {
  const auto p = three_quarters_protocol();
  CHECK(protocol_from_json(protocol_to_json(p)) == p);
  const auto tmp = std::filesystem::temp_directory_path() / "bccf_roundtrip.json";
  save_text(tmp, protocol_to_json(p, -1));
  CHECK(load_protocol(tmp) == p);
  std::filesystem::remove(tmp);
}

TEST_CASE("protocol json errors are typed") {
  const std::string ok = R"({"alice_dims":[2],"bob_dims":[3],"alpha0":[1,0],"alpha1":[1,0],)";
  CHECK_THROWS_AS(protocol_from_json("{"), ParseError);
  CHECK_THROWS_AS(protocol_from_json("[1, 2]"), ParseError);
  CHECK_THROWS_AS(protocol_from_json(ok + R"("beta0":[0.5,0.5,0]})"), ParseError);  // beta1 missing
  CHECK_THROWS_AS(protocol_from_json(ok + R"("beta0":[0.5,0.5,0],"beta1":"x"})"), ParseError);
  CHECK_THROWS_AS(protocol_from_json(ok + R"("beta0":[0.5,0.4,0],"beta1":[0.5,0,0.5]})"), NormalizationError);
  CHECK_THROWS_AS(protocol_from_json(ok + R"("beta0":[0.5,0.5],"beta1":[0.5,0,0.5]})"), DimensionError);
  CHECK_THROWS_AS(protocol_from_json(ok + R"("beta0":[1.5,-0.5,0],"beta1":[0.5,0,0.5]})"), DomainError);
  CHECK_THROWS_AS(load_protocol("/nonexistent/protocol.json"), IoError);
}

TEST_CASE("quantum result json") {
  const auto r = solve_quantum(three_quarters_protocol(), Party::Bob, Outcome::One);
  const auto j = nlohmann::json::parse(quantum_result_json(r));
  CHECK(j["party"] == "bob");
  CHECK(j["outcome"] == 1);
  CHECK(j["converged"] == true);
  CHECK(j["dual_certificate"]["v0"].size() == 3);
}

TEST_CASE("three-quarters report") {
  const auto r = bias_report(three_quarters_protocol());
  REQUIRE(r.quantum);
  CHECK(r.converged);
  CHECK(r.quantum_bias == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.corollary_check);
  REQUIRE(r.kitaev);
  CHECK(r.kitaev->prod0 == doctest::Approx(0.5625).epsilon(1e-6));
  CHECK(r.kitaev->pass);
  REQUIRE(r.saturation);
  CHECK_FALSE(r.saturation->saturated);
  CHECK(r.info_bound_check);
  REQUIRE(r.perfect_cheaters.size() == 1);
  CHECK(r.perfect_cheaters[0] == Party::Bob);
  CHECK(r.classical_bias == doctest::Approx(0.5));

  const auto j = nlohmann::json::parse(bias_report_json(r));
  CHECK(j["quantum"]["values"]["alice0"].get<double>() == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(j["classical"]["perfect_cheaters"][0] == "bob");
  CHECK(bias_report_text(r).find("classical perfect cheater: bob") != std::string::npos);
}

TEST_CASE("report modes") {
  const auto p = three_quarters_protocol();
  const auto c = bias_report(p, {}, ReportMode::Classical);
  CHECK_FALSE(c.quantum);
  CHECK(c.classical[1][0] == 1.0);
  const auto j = nlohmann::json::parse(bias_report_json(c));
  CHECK_FALSE(j.contains("quantum"));
  const auto q = bias_report(p, {}, ReportMode::Quantum);
  CHECK(q.quantum);
  CHECK(nlohmann::json::parse(bias_report_json(q)).contains("classical") == false);
}

TEST_CASE("equal betas: Bob cheats perfectly") {
  BccfProtocol p({2}, {2}, ProbDist({0.3, 0.7}), ProbDist({0.6, 0.4}), ProbDist({0.5, 0.5}), ProbDist({0.5, 0.5}));
  const auto r = bias_report(p);
  CHECK(r.quantum_bias == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("saturation: equal full-support betas, orthogonal alphas") {
  BccfProtocol p({2}, {3}, ProbDist({1, 0}), ProbDist({0, 1}), ProbDist({0.2, 0.3, 0.5}), ProbDist({0.2, 0.3, 0.5}));
  const auto q = solve_profile(p);
  const auto k = kitaev_check(q);
  CHECK(k.prod0 == doctest::Approx(0.5).epsilon(1e-6));
  const auto s = saturation_probe(p, q);
  CHECK(s.saturated);
  CHECK(s.classical_match);
}

TEST_CASE("kitaev check refuses unconverged profiles") {
  QuantumProfile q;
  for (auto& row : q.results)
    for (auto& r : row) r.gap = 1e-3;
  CHECK_THROWS_AS(kitaev_check(q), NonConvergenceError);
}

TEST_CASE("analysis on random protocols") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = oracle::random_protocol(rng, 1 + trial % 3, 3);
    const auto r = bias_report(p);
    CHECK(r.converged);
    REQUIRE(r.kitaev);
    CHECK(r.kitaev->pass);
    CHECK(r.corollary_check);
    CHECK(r.info_bound_check);
    CHECK(r.perfect_cheaters.size() == 1);
  }
}
