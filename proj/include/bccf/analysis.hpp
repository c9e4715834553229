#pragma once

// Theorem checks over the four cheating values of a protocol, and the
// combined report.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bccf/classical.hpp"
#include "bccf/core.hpp"
#include "bccf/quantum.hpp"

namespace bccf {

class NonConvergenceError : public BccfError {
 public:
  using BccfError::BccfError;
};

struct QuantumProfile {
  // [party][outcome], party 0 = Alice, 1 = Bob
  std::array<std::array<QuantumResult, 2>, 2> results;

  const QuantumResult& alice(int c) const { return results[0][c]; }
  const QuantumResult& bob(int c) const { return results[1][c]; }
  bool converged(double gap_tol) const;
};

/// The four solves, run concurrently.
QuantumProfile solve_profile(const BccfProtocol& proto, const SolveOptions& opts = {});

struct KitaevCheck {
  double prod0 = 0.0, prod1 = 0.0;                // from dual values
  double prod0_primal = 0.0, prod1_primal = 0.0;  // from primal values
  bool pass = false;                              // both dual products >= 1/2 - 1e-6
};

/// Throws NonConvergenceError when any gap exceeds gap_tol.
KitaevCheck kitaev_check(const QuantumProfile& q, double gap_tol = 1e-6);

struct SaturationProbe {
  bool saturated = false;        // both dual products within 1e-4 of 1/2
  bool classical_match = false;  // every quantum value within 1e-4 of the classical one
  double max_deviation = 0.0;
};

SaturationProbe saturation_probe(const BccfProtocol& proto, const QuantumProfile& q);

enum class ReportMode { Quantum, Classical, Both };

struct BiasReport {
  ReportMode mode = ReportMode::Both;
  double gap_tol = 1e-6;
  HonestOutcome honest{};

  // quantum part (mode Quantum or Both)
  std::optional<QuantumProfile> quantum;
  bool converged = true;
  double quantum_max = 0.0;  // max primal value
  double quantum_bias = 0.0;
  bool corollary_check = false;  // quantum_max >= 1/sqrt(2) - 1e-6
  std::optional<KitaevCheck> kitaev;
  std::optional<SaturationProbe> saturation;
  double alice_info_bound = 0.0;
  bool info_bound_check = false;  // both Alice values <= alice_info_bound + 1e-6

  // classical part (mode Classical or Both)
  std::array<std::array<double, 2>, 2> classical{};  // [party][outcome] like QuantumProfile
  double classical_bias = 0.0;
  std::vector<Party> perfect_cheaters;  // value 1 within 1e-9
};

/// Solver non-convergence does not throw: `converged` is false and the
/// theorem checks that need converged values are left empty.
BiasReport bias_report(const BccfProtocol& proto, const SolveOptions& opts = {}, ReportMode mode = ReportMode::Both);

std::string bias_report_json(const BiasReport& r, int indent = 2);
/// Plain-text summary, one fact per line.
std::string bias_report_text(const BiasReport& r);

}  // namespace bccf
