#pragma once

// Point games built from dual certificates.
//
// A point is weight * [x, y] with x the Bob coordinate and y the Alice one,
// the order of the final point [zeta_B, zeta_A]. A game is a list of
// configurations and one Move per transition. A Move applies one kind of
// basic move, on one axis, to disjoint groups of points; points outside every
// group must reappear unchanged and in order.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bccf/core.hpp"
#include "bccf/duals.hpp"

namespace bccf {

inline constexpr double kEpsPg = 1e-9;

class PointGameError : public BccfError {
 public:
  using BccfError::BccfError;
};

struct WeightedPoint {
  double w = 0.0;
  double x = 0.0;  // Bob
  double y = 0.0;  // Alice

  friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
};

using Configuration = std::vector<WeightedPoint>;

/// Merges points at the same coordinates (within tol), drops weights at or
/// below kEpsZero, sorts by (x, y).
Configuration canonicalize(const Configuration& c, double tol = 1e-12);
bool same_configuration(const Configuration& a, const Configuration& b, double tol = 1e-12);
double total_weight(const Configuration& c);

enum class MoveKind { Raise, Merge, Split, ProbSplit, ProbMerge, Align };
enum class Axis { Horizontal, Vertical };

const char* to_string(MoveKind k);
const char* to_string(Axis a);

struct MoveGroup {
  std::vector<std::size_t> from;  // indices into the configuration before
  std::vector<std::size_t> to;    // indices into the configuration after
};

struct Move {
  MoveKind kind = MoveKind::Raise;
  Axis axis = Axis::Horizontal;
  std::string label;
  std::vector<MoveGroup> groups;  // empty in a compact view
};

struct MoveCheck {
  bool ok = true;
  double violation = 0.0;
  std::string message;
};

/// Rule check of one transition. Zero-weight points carry no rule. Throws
/// PointGameError for structural problems (bad or repeated indices,
/// mismatched untouched points, wrong group shape for the kind).
MoveCheck verify_move(const Configuration& before, const Configuration& after, const Move& mv,
                      double eps = kEpsPg);

enum class GameKind { Quantum, Classical };
const char* to_string(GameKind k);

struct PointGame {
  GameKind kind = GameKind::Quantum;
  std::vector<Configuration> configurations;
  std::vector<Move> moves;  // moves[i] takes configurations[i] to configurations[i + 1]
  double zeta_b = 0.0;
  double zeta_a = 0.0;
  bool compact = false;
};

struct GameCheck {
  bool ok = true;
  std::ptrdiff_t bad_transition = -1;  // first failing transition, -1 for start/end problems
  std::string message;
};

/// Replays every transition. Also checks the start ½[1,0] + ½[0,1], a
/// single final point at (zeta_b, zeta_a), conservation of weight, and for
/// classical games that every split is a probability split.
GameCheck verify_game(const PointGame& pg, double eps = kEpsPg);

/// The literal schedule: probability splitting, the split on v, raises, the
/// split on z_{n+1}, probability splitting, merges then raises, and per level
/// "merge, then align". Bob's dual must be for outcome 1 and Alice's for
/// outcome 0; both are checked for feasibility first (InfeasibleDualError).
PointGame build_quantum_game(const BccfProtocol& proto, const BobDual& bob1, const AliceDual& alice0);

/// Same schedule with every split replaced by a probability split followed
/// by a raise. Feasibility is checked against the classical constraints
/// v_{a,y} >= 1 and z_{x,y} >= beta_{t(a),y}/2 on the relevant supports.
PointGame build_classical_game(const BccfProtocol& proto, const BobDual& bob1, const AliceDual& alice0);

/// Canonical configurations with identity transitions removed.
PointGame compact_view(const PointGame& pg);

struct GamePair {
  PointGame first;   // on (beta0, beta1): final [zeta_B1, zeta_A0]
  PointGame second;  // on (beta1, beta0): final [zeta_B0, zeta_A1]
  double zeta_b0 = 0.0, zeta_b1 = 0.0, zeta_a0 = 0.0, zeta_a1 = 0.0;
};

/// Duals are for the original protocol, one per (party, outcome).
GamePair build_game_pair(const BccfProtocol& proto, const BobDual& bob0, const BobDual& bob1,
                         const AliceDual& alice0, const AliceDual& alice1, GameKind kind = GameKind::Quantum);

/// max(zeta_B, zeta_A) >= 1 - 1e-9 for a classical game. Refuses (throws
/// PointGameError) a quantum, compact or non-validating game.
bool classical_final_point_theorem(const PointGame& pg);

std::string point_game_json(const PointGame& pg, int indent = 2);
std::string point_game_svg(const PointGame& pg);

}  // namespace bccf
