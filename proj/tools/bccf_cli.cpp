// bccf: validate | analyze | pointgame | demo
//
// exit codes: 0 ok, 1 i/o, 2 normalization, 3 dimension, 4 solver did not
// converge, 5 point-game validation, 6 parse, 7 demo mismatch

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bccf/analysis.hpp"
#include "bccf/classical.hpp"
#include "bccf/io.hpp"
#include "bccf/pointgame.hpp"
#include "bccf/quantum.hpp"

using namespace bccf;

namespace {

enum Exit : int { kOk = 0, kIo = 1, kNorm = 2, kDim = 3, kNoConv = 4, kGame = 5, kParse = 6, kDemo = 7 };

int fail(int code, const std::string& kind, const std::string& msg) {
  std::cerr << "error (" << kind << "): " << msg << '\n';
  return code;
}

// Runs f, mapping library errors to exit codes.
template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what());
  } catch (const ParseError& e) {
    return fail(kParse, "parse", e.what());
  } catch (const NormalizationError& e) {
    return fail(kNorm, "normalization", e.what());
  } catch (const DomainError& e) {
    return fail(kNorm, "normalization", e.what());
  } catch (const DimensionError& e) {
    return fail(kDim, "dimension", e.what());
  } catch (const PointGameError& e) {
    return fail(kGame, "point game", e.what());
  } catch (const InfeasibleDualError& e) {
    return fail(kGame, "point game", e.what());
  } catch (const NonConvergenceError& e) {
    return fail(kNoConv, "convergence", e.what());
  }
}

int cmd_validate(const std::string& path) {
  return guarded([&]() -> int {
    const auto proto = load_protocol(path);
    std::cout << protocol_to_json(proto) << '\n';
    return kOk;
  });
}

int cmd_analyze(const std::string& path, const std::string& mode, const std::string& json_out, std::uint64_t seed) {
  return guarded([&]() -> int {
    const auto proto = load_protocol(path);
    SolveOptions opts;
    opts.seed = seed;
    const ReportMode m = mode == "quantum" ? ReportMode::Quantum
                         : mode == "classical" ? ReportMode::Classical
                                               : ReportMode::Both;
    const auto report = bias_report(proto, opts, m);
    std::cout << bias_report_text(report);
    if (!json_out.empty()) save_text(json_out, bias_report_json(report));
    if (!report.converged) return fail(kNoConv, "convergence", "a quantum solve stopped above the gap tolerance");
    return kOk;
  });
}

void print_game(const std::string& name, const PointGame& g) {
  const auto c = compact_view(g);
  std::printf("%s %s game: %zu transitions (%zu in the literal schedule), final [%.9f, %.9f]\n", name.c_str(),
              to_string(g.kind), c.moves.size(), g.moves.size(), g.zeta_b, g.zeta_a);
  for (std::size_t i = 0; i < c.moves.size(); ++i)
    std::printf("  %zu. %s %s (%s)\n", i + 1, to_string(c.moves[i].axis), to_string(c.moves[i].kind),
                c.moves[i].label.c_str());
}

// Replays the game; on failure reports the transition index.
bool check_game(const std::string& name, const PointGame& g, double want_b, double want_a) {
  const auto chk = verify_game(g);
  if (!chk.ok) {
    std::cerr << "error (point game): " << name << " transition " << chk.bad_transition << ": " << chk.message << '\n';
    return false;
  }
  if (std::abs(g.zeta_b - want_b) > 1e-6 || std::abs(g.zeta_a - want_a) > 1e-6) {
    std::fprintf(stderr, "error (point game): %s final [%.9f, %.9f] differs from the dual values [%.9f, %.9f]\n",
                 name.c_str(), g.zeta_b, g.zeta_a, want_b, want_a);
    return false;
  }
  if (g.kind == GameKind::Classical && !classical_final_point_theorem(g)) {
    std::cerr << "error (point game): " << name << " classical game ends below 1 in both coordinates\n";
    return false;
  }
  return true;
}

struct Duals {
  BobDual bob[2];
  AliceDual alice[2];
  double bob_value[2]{}, alice_value[2]{};
};

int cmd_pointgame(const std::string& path, const std::string& variant, bool pair, const std::string& svg_dir,
                  const std::string& json_out, bool full) {
  return guarded([&]() -> int {
    const auto proto = load_protocol(path);
    const bool classical = variant == "classical";
    Duals d;
    for (int c : {0, 1}) {
      // the single game needs Bob towards 1 and Alice towards 0
      const bool need_bob = pair || c == 1, need_alice = pair || c == 0;
      const Outcome oc = outcome_from_int(c);
      if (classical) {
        d.bob[c] = classical_bob_dual(proto, oc);
        d.alice[c] = classical_alice_dual(proto, oc);
        continue;
      }
      if (need_bob) {
        const auto r = solve_quantum(proto, Party::Bob, oc);
        if (!r.converged) return fail(kNoConv, "convergence", "Bob's solve did not reach the gap tolerance");
        d.bob[c] = r.bob_dual;
      }
      if (need_alice) {
        const auto r = solve_quantum(proto, Party::Alice, oc);
        if (!r.converged) return fail(kNoConv, "convergence", "Alice's solve did not reach the gap tolerance");
        d.alice[c] = r.alice_dual;
      }
    }
    auto bob_eval = [&](int c) {
      // eval_dual_bob rejects a classical dual only if it is infeasible for the quantum constraints too
      return eval_dual_bob(proto, d.bob[c]);
    };
    auto alice_eval = [&](int c) { return eval_dual_alice(proto, d.alice[c]); };

    const GameKind kind = classical ? GameKind::Classical : GameKind::Quantum;
    std::vector<std::pair<std::string, PointGame>> games;
    std::string json;
    if (pair) {
      auto gp = build_game_pair(proto, d.bob[0], d.bob[1], d.alice[0], d.alice[1], kind);
      if (!check_game("first", gp.first, bob_eval(1), alice_eval(0)) ||
          !check_game("second", gp.second, bob_eval(0), alice_eval(1)))
        return kGame;
      std::printf("pair final point [zeta_B0, zeta_B1, zeta_A0, zeta_A1] = [%.9f, %.9f, %.9f, %.9f]\n", gp.zeta_b0,
                  gp.zeta_b1, gp.zeta_a0, gp.zeta_a1);
      games.emplace_back("first", std::move(gp.first));
      games.emplace_back("second", std::move(gp.second));
    } else {
      auto g = classical ? build_classical_game(proto, d.bob[1], d.alice[0])
                         : build_quantum_game(proto, d.bob[1], d.alice[0]);
      if (!check_game("game", g, bob_eval(1), alice_eval(0))) return kGame;
      games.emplace_back("game", std::move(g));
    }
    for (const auto& [name, g] : games) print_game(name, g);

    if (!json_out.empty()) {
      auto dump = [&](const PointGame& g) { return point_game_json(full ? g : compact_view(g)); };
      if (games.size() == 1) {
        save_text(json_out, dump(games[0].second));
      } else {
        std::string text = "{\n\"first\": " + dump(games[0].second) + ",\n\"second\": " + dump(games[1].second) + "\n}";
        save_text(json_out, text);
      }
    }
    if (!svg_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(svg_dir, ec);
      if (ec) throw IoError("cannot create " + svg_dir);
      for (const auto& [name, g] : games)
        save_text(std::filesystem::path(svg_dir) / (name + ".svg"), point_game_svg(g));
    }
    return kOk;
  });
}

int cmd_demo(const std::string& name) {
  if (name != "three-quarters") return fail(kParse, "usage", "unknown demo '" + name + "' (known: three-quarters)");
  return guarded([&]() -> int {
    const auto proto = three_quarters_protocol();
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const std::string& what) {
      std::printf("%-60s %s\n", what.c_str(), ok ? "ok" : "MISMATCH");
      if (!ok) bad.push_back(what);
    };
    auto near = [](double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol; };

    const auto report = bias_report(proto);
    const auto& q = *report.quantum;
    for (int p = 0; p < 2; ++p)
      for (int c = 0; c < 2; ++c) {
        const auto& r = q.results[p][c];
        char what[96];
        std::snprintf(what, sizeof what, "quantum %s -> %d = 0.75 (got %.9f, gap %.1e)", p == 0 ? "Alice" : "Bob", c,
                      r.value, r.gap);
        expect(near(r.value, 0.75) && r.gap <= 1e-6, what);
      }
    expect(near(report.classical[1][0], 1.0, 1e-12) && near(report.classical[1][1], 1.0, 1e-12),
           "classical Bob = (1, 1)");
    expect(near(report.classical[0][0], 0.75, 1e-12) && near(report.classical[0][1], 0.75, 1e-12),
           "classical Alice = (0.75, 0.75)");
    expect(report.perfect_cheaters.size() == 1 && report.perfect_cheaters[0] == Party::Bob,
           "classical perfect cheater is Bob alone");
    expect(report.kitaev && near(report.kitaev->prod0, 0.5625) && near(report.kitaev->prod1, 0.5625) &&
               report.kitaev->pass,
           "kitaev products 0.5625 >= 0.5");
    expect(report.corollary_check, "max quantum value >= 1/sqrt(2)");

    // the listed duals
    BobDual v;
    v.outcome = Outcome::One;
    v.v0 = {0.75, 0.0, 1.5};
    v.v1 = {0.75, 1.5, 0.0};
    AliceDual z;
    z.outcome = Outcome::Zero;
    z.z = {0.25, 0.25, 0.25, 0.0, 0.0, 0.0};
    const auto w = bob_dual_levels(proto, v);
    expect(near(w[0][0], 0.75, 1e-15) && near(w[0][1], 0.0, 1e-15), "w1 = [3/4, 0]");
    expect(near(eval_dual_bob(proto, v), 0.75, 1e-15), "listed v0, v1 evaluate to 3/4");
    expect(near(alice_dual_levels(proto, z)[0][0], 0.75, 1e-15), "listed z gives z1 = 3/4");
    expect(near(eval_dual_bob(proto, q.bob(1).bob_dual), 0.75) && near(eval_dual_alice(proto, q.alice(0).alice_dual), 0.75),
           "solver duals evaluate like the listed ones");

    const auto listed = build_quantum_game(proto, v, z);
    const auto compact = compact_view(listed);
    const std::vector<std::pair<MoveKind, Axis>> schedule = {
        {MoveKind::Split, Axis::Horizontal}, {MoveKind::Raise, Axis::Horizontal}, {MoveKind::Merge, Axis::Vertical},
        {MoveKind::Raise, Axis::Vertical},   {MoveKind::Merge, Axis::Horizontal}, {MoveKind::Merge, Axis::Vertical}};
    bool same = compact.moves.size() == schedule.size();
    for (std::size_t i = 0; same && i < schedule.size(); ++i)
      same = compact.moves[i].kind == schedule[i].first && compact.moves[i].axis == schedule[i].second;
    expect(verify_game(listed).ok, "point game from the listed duals validates");
    expect(same, "six transitions: H split, H raise, V merge, V raise, H merge, V merge");
    expect(near(listed.zeta_b, 0.75, 1e-12) && near(listed.zeta_a, 0.75, 1e-12), "final point [3/4, 3/4]");

    const auto solved = build_quantum_game(proto, q.bob(1).bob_dual, q.alice(0).alice_dual);
    expect(verify_game(solved).ok && near(solved.zeta_b, 0.75) && near(solved.zeta_a, 0.75),
           "point game from solver duals validates, final [3/4, 3/4]");

    const auto cg = build_classical_game(proto, classical_bob_dual(proto, Outcome::One),
                                         classical_alice_dual(proto, Outcome::Zero));
    expect(verify_game(cg).ok && near(cg.zeta_b, 1.0, 1e-12) && near(cg.zeta_a, 0.75, 1e-12),
           "classical point game final [1, 3/4]");
    expect(classical_final_point_theorem(cg), "classical final point has a coordinate >= 1");

    if (!bad.empty()) {
      std::cerr << "error (demo): " << bad.size() << " golden value(s) differ\n";
      for (const auto& b : bad) std::cerr << "  " << b << '\n';
      return kDemo;
    }
    std::printf("all checks passed\n");
    return kOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cheating probabilities, dual certificates and point games for BCCF coin-flipping protocols"};
  app.require_subcommand(1);

  std::string path, mode = "both", json_out, variant = "quantum", svg_dir, demo_name;
  std::uint64_t seed = 0;
  bool pair = false, full = false;

  auto* validate = app.add_subcommand("validate", "Check a protocol file and print it normalized");
  validate->add_option("path", path, "protocol JSON")->required();

  auto* analyze = app.add_subcommand("analyze", "Quantum and classical cheating probabilities with theorem checks");
  analyze->add_option("path", path, "protocol JSON")->required();
  analyze->add_option("--mode", mode, "quantum, classical or both")
      ->check(CLI::IsMember({"quantum", "classical", "both"}));
  analyze->add_option("--json", json_out, "write the report here");
  analyze->add_option("--seed", seed, "recorded for reproducibility; the solvers are deterministic");

  auto* pointgame = app.add_subcommand("pointgame", "Build and validate point games from dual certificates");
  pointgame->add_option("path", path, "protocol JSON")->required();
  pointgame->add_option("--variant", variant, "quantum or classical")->check(CLI::IsMember({"quantum", "classical"}));
  pointgame->add_flag("--pair", pair, "build the game pair (both orientations)");
  pointgame->add_option("--svg", svg_dir, "directory for SVG figures");
  pointgame->add_option("--json", json_out, "write the game(s) here");
  pointgame->add_flag("--full", full, "export the literal schedule instead of the compact view");

  auto* demo = app.add_subcommand("demo", "Run a built-in example end to end");
  demo->add_option("name", demo_name, "three-quarters")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  if (*validate) return cmd_validate(path);
  if (*analyze) return cmd_analyze(path, mode, json_out, seed);
  if (*pointgame) return cmd_pointgame(path, variant, pair, svg_dir, json_out, full);
  return cmd_demo(demo_name);
}
