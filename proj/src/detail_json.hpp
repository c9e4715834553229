#pragma once

#include "bccf/quantum.hpp"
#include "json.hpp"

namespace bccf::detail {

inline nlohmann::ordered_json result_to_json(const QuantumResult& r) {
  nlohmann::ordered_json j;
  j["party"] = to_string(r.party);
  j["outcome"] = to_int(r.outcome);
  j["primal_value"] = r.value;
  j["dual_value"] = r.dual_value;
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  if (r.party == Party::Bob)
    j["dual_certificate"] = {{"v0", r.bob_dual.v0}, {"v1", r.bob_dual.v1}};
  else
    j["dual_certificate"] = {{"z", r.alice_dual.z}};
  return j;
}

}  // namespace bccf::detail
