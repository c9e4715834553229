#include "bccf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "detail_json.hpp"

namespace bccf {

bool QuantumProfile::converged(double gap_tol) const {
  for (const auto& row : results)
    for (const auto& r : row)
      if (!(r.gap <= gap_tol)) return false;
  return true;
}

QuantumProfile solve_profile(const BccfProtocol& proto, const SolveOptions& opts) {
  std::array<std::array<std::future<QuantumResult>, 2>, 2> jobs;
  for (int p = 0; p < 2; ++p)
    for (int c = 0; c < 2; ++c)
      jobs[p][c] = std::async(std::launch::async, [&proto, &opts, p, c] {
        return solve_quantum(proto, p == 0 ? Party::Alice : Party::Bob, outcome_from_int(c), opts);
      });
  QuantumProfile q;
  for (int p = 0; p < 2; ++p)
    for (int c = 0; c < 2; ++c) q.results[p][c] = jobs[p][c].get();
  return q;
}

KitaevCheck kitaev_check(const QuantumProfile& q, double gap_tol) {
  if (!q.converged(gap_tol)) {
    std::ostringstream os;
    os << "kitaev_check needs converged solves; gaps:";
    for (const auto& row : q.results)
      for (const auto& r : row) os << ' ' << r.gap;
    throw NonConvergenceError(os.str());
  }
  KitaevCheck k;
  k.prod0 = q.alice(0).dual_value * q.bob(0).dual_value;
  k.prod1 = q.alice(1).dual_value * q.bob(1).dual_value;
  k.prod0_primal = q.alice(0).value * q.bob(0).value;
  k.prod1_primal = q.alice(1).value * q.bob(1).value;
  k.pass = k.prod0 >= 0.5 - 1e-6 && k.prod1 >= 0.5 - 1e-6;
  return k;
}

SaturationProbe saturation_probe(const BccfProtocol& proto, const QuantumProfile& q) {
  SaturationProbe s;
  const double p0 = q.alice(0).dual_value * q.bob(0).dual_value;
  const double p1 = q.alice(1).dual_value * q.bob(1).dual_value;
  s.saturated = std::abs(p0 - 0.5) <= 1e-4 && std::abs(p1 - 0.5) <= 1e-4;
  for (int p = 0; p < 2; ++p)
    for (int c = 0; c < 2; ++c) {
      const double cl = classical_cheat(proto, p == 0 ? Party::Alice : Party::Bob, outcome_from_int(c)).prob;
      s.max_deviation = std::max(s.max_deviation, std::abs(q.results[p][c].value - cl));
    }
  s.classical_match = s.max_deviation <= 1e-4;
  return s;
}

BiasReport bias_report(const BccfProtocol& proto, const SolveOptions& opts, ReportMode mode) {
  BiasReport r;
  r.mode = mode;
  r.gap_tol = opts.gap_tol;
  r.honest = honest_outcome_distribution(proto);
  if (mode != ReportMode::Quantum) {
    for (int p = 0; p < 2; ++p)
      for (int c = 0; c < 2; ++c)
        r.classical[p][c] = classical_cheat(proto, p == 0 ? Party::Alice : Party::Bob, outcome_from_int(c)).prob;
    double top = 0.0;
    for (int p = 0; p < 2; ++p) {
      top = std::max({top, r.classical[p][0], r.classical[p][1]});
      if (std::max(r.classical[p][0], r.classical[p][1]) >= 1.0 - 1e-9)
        r.perfect_cheaters.push_back(p == 0 ? Party::Alice : Party::Bob);
    }
    r.classical_bias = top - 0.5;
  }
  if (mode != ReportMode::Classical) {
    r.quantum = solve_profile(proto, opts);
    const auto& q = *r.quantum;
    r.converged = q.converged(opts.gap_tol);
    for (const auto& row : q.results)
      for (const auto& res : row) r.quantum_max = std::max(r.quantum_max, res.value);
    r.quantum_bias = r.quantum_max - 0.5;
    r.corollary_check = r.quantum_max >= 1.0 / std::sqrt(2.0) - 1e-6;
    r.alice_info_bound = alice_info_bound(proto);
    r.info_bound_check = std::max(q.alice(0).value, q.alice(1).value) <= r.alice_info_bound + 1e-6;
    if (r.converged) {
      r.kitaev = kitaev_check(q, opts.gap_tol);
      r.saturation = saturation_probe(proto, q);
    }
  }
  return r;
}

namespace {

const char* mode_name(ReportMode m) {
  switch (m) {
    case ReportMode::Quantum: return "quantum";
    case ReportMode::Classical: return "classical";
    case ReportMode::Both: return "both";
  }
  return "?";
}

}  // namespace

std::string bias_report_json(const BiasReport& r, int indent) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(r.mode);
  j["honest"] = {{"p0", r.honest.p0}, {"p1", r.honest.p1}, {"p_abort", r.honest.p_abort}};
  if (r.quantum) {
    const auto& q = *r.quantum;
    nlohmann::ordered_json qj;
    qj["values"] = {{"alice0", q.alice(0).value}, {"alice1", q.alice(1).value},
                    {"bob0", q.bob(0).value},     {"bob1", q.bob(1).value}};
    qj["bounds"] = {{"alice0", q.alice(0).dual_value}, {"alice1", q.alice(1).dual_value},
                    {"bob0", q.bob(0).dual_value},     {"bob1", q.bob(1).dual_value}};
    qj["converged"] = r.converged;
    qj["bias"] = r.quantum_bias;
    qj["max_value"] = r.quantum_max;
    qj["corollary_check"] = r.corollary_check;
    qj["alice_info_bound"] = r.alice_info_bound;
    qj["info_bound_check"] = r.info_bound_check;
    if (r.kitaev)
      qj["kitaev"] = {{"prod0", r.kitaev->prod0},
                      {"prod1", r.kitaev->prod1},
                      {"prod0_primal", r.kitaev->prod0_primal},
                      {"prod1_primal", r.kitaev->prod1_primal},
                      {"pass", r.kitaev->pass}};
    else
      qj["kitaev"] = nullptr;
    if (r.saturation)
      qj["saturation"] = {{"saturated", r.saturation->saturated},
                          {"classical_match", r.saturation->classical_match},
                          {"max_deviation", r.saturation->max_deviation}};
    else
      qj["saturation"] = nullptr;
    auto solves = nlohmann::ordered_json::array();
    for (const auto& row : q.results)
      for (const auto& res : row) solves.push_back(detail::result_to_json(res));
    qj["solves"] = std::move(solves);
    j["quantum"] = std::move(qj);
  }
  if (r.mode != ReportMode::Quantum) {
    nlohmann::ordered_json cj;
    cj["values"] = {{"alice0", r.classical[0][0]}, {"alice1", r.classical[0][1]},
                    {"bob0", r.classical[1][0]},   {"bob1", r.classical[1][1]}};
    cj["bias"] = r.classical_bias;
    auto pc = nlohmann::ordered_json::array();
    for (auto p : r.perfect_cheaters) pc.push_back(to_string(p));
    cj["perfect_cheaters"] = std::move(pc);
    cj["exactly_one_perfect_cheater"] = r.perfect_cheaters.size() == 1;
    j["classical"] = std::move(cj);
  }
  return j.dump(indent);
}

std::string bias_report_text(const BiasReport& r) {
  std::ostringstream os;
  char buf[200];
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    os << buf << '\n';
  };
  line("honest outcome: p0=%.6f p1=%.6f abort=%.6f", r.honest.p0, r.honest.p1, r.honest.p_abort);
  if (r.quantum) {
    const auto& q = *r.quantum;
    for (int p = 0; p < 2; ++p)
      for (int c = 0; c < 2; ++c) {
        const auto& res = q.results[p][c];
        line("quantum %-5s -> %d: %.9f (bound %.9f, gap %.2e%s)", p == 0 ? "Alice" : "Bob", c, res.value,
             res.dual_value, res.gap, res.gap <= r.gap_tol ? "" : ", NOT CONVERGED");
      }
    line("quantum bias: %.9f", r.quantum_bias);
    line("max quantum value %.9f >= 1/sqrt(2): %s", r.quantum_max, r.corollary_check ? "yes" : "no");
    if (r.kitaev) {
      line("kitaev products (bounds): %.9f %.9f -> %s", r.kitaev->prod0, r.kitaev->prod1,
           r.kitaev->pass ? "pass" : "FAIL");
      line("kitaev products (values): %.9f %.9f", r.kitaev->prod0_primal, r.kitaev->prod1_primal);
    }
    if (r.saturation)
      line("saturated: %s, matches classical: %s", r.saturation->saturated ? "yes" : "no",
           r.saturation->classical_match ? "yes" : "no");
    line("alice information bound %.9f holds: %s", r.alice_info_bound, r.info_bound_check ? "yes" : "no");
  }
  if (r.mode != ReportMode::Quantum) {
    for (int p = 0; p < 2; ++p)
      for (int c = 0; c < 2; ++c)
        line("classical %-5s -> %d: %.9f", p == 0 ? "Alice" : "Bob", c, r.classical[p][c]);
    line("classical bias: %.9f", r.classical_bias);
    std::string who;
    for (auto p : r.perfect_cheaters) who += std::string(who.empty() ? "" : ", ") + to_string(p);
    line("classical perfect cheater: %s", who.empty() ? "none" : who.c_str());
  }
  return os.str();
}

}  // namespace bccf
