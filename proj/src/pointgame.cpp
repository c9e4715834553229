#include "bccf/pointgame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace bccf {

namespace {

double safe_div(double a, double b) { return b > 0.0 ? a / b : 0.0; }

bool close(double a, double b, double eps) {
  return std::abs(a - b) <= eps * std::max({1.0, std::abs(a), std::abs(b)});
}

double axis_coord(const WeightedPoint& p, Axis ax) { return ax == Axis::Horizontal ? p.x : p.y; }
double other_coord(const WeightedPoint& p, Axis ax) { return ax == Axis::Horizontal ? p.y : p.x; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string describe(const WeightedPoint& p) { return fmt(p.w) + "[" + fmt(p.x) + ", " + fmt(p.y) + "]"; }

}  // namespace

const char* to_string(MoveKind k) {
  switch (k) {
    case MoveKind::Raise: return "raise";
    case MoveKind::Merge: return "merge";
    case MoveKind::Split: return "split";
    case MoveKind::ProbSplit: return "prob_split";
    case MoveKind::ProbMerge: return "prob_merge";
    case MoveKind::Align: return "align";
  }
  return "?";
}

const char* to_string(Axis a) { return a == Axis::Horizontal ? "horizontal" : "vertical"; }

const char* to_string(GameKind k) { return k == GameKind::Quantum ? "quantum" : "classical"; }

Configuration canonicalize(const Configuration& c, double tol) {
  Configuration pts;
  for (const auto& p : c)
    if (p.w > kEpsZero) pts.push_back(p);
  std::sort(pts.begin(), pts.end(), [](const WeightedPoint& a, const WeightedPoint& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  Configuration out;
  for (const auto& p : pts) {
    auto hit = std::find_if(out.begin(), out.end(), [&](const WeightedPoint& q) {
      return close(q.x, p.x, tol) && close(q.y, p.y, tol);
    });
    if (hit == out.end())
      out.push_back(p);
    else
      hit->w += p.w;
  }
  return out;
}

bool same_configuration(const Configuration& a, const Configuration& b, double tol) {
  const auto ca = canonicalize(a, tol), cb = canonicalize(b, tol);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!close(ca[i].w, cb[i].w, tol) || !close(ca[i].x, cb[i].x, tol) || !close(ca[i].y, cb[i].y, tol))
      return false;
  return true;
}

double total_weight(const Configuration& c) {
  double s = 0.0;
  for (const auto& p : c) s += p.w;
  return s;
}

MoveCheck verify_move(const Configuration& before, const Configuration& after, const Move& mv, double eps) {
  std::vector<char> used_from(before.size(), 0), used_to(after.size(), 0);
  for (std::size_t g = 0; g < mv.groups.size(); ++g) {
    const auto& grp = mv.groups[g];
    for (auto i : grp.from) {
      if (i >= before.size() || used_from[i]) throw PointGameError("group " + std::to_string(g) + ": bad source index");
      used_from[i] = 1;
    }
    for (auto i : grp.to) {
      if (i >= after.size() || used_to[i]) throw PointGameError("group " + std::to_string(g) + ": bad target index");
      used_to[i] = 1;
    }
    const std::size_t nf = grp.from.size(), nt = grp.to.size();
    bool shape = nf >= 1 && nt >= 1;
    switch (mv.kind) {
      case MoveKind::Raise: shape = shape && nf == 1 && nt == 1; break;
      case MoveKind::Merge:
      case MoveKind::ProbMerge: shape = shape && nt == 1; break;
      case MoveKind::Split:
      case MoveKind::ProbSplit: shape = shape && nf == 1; break;
      case MoveKind::Align: shape = shape && nf == nt; break;
    }
    if (!shape) throw PointGameError("group " + std::to_string(g) + ": wrong shape for a " + to_string(mv.kind));
  }

  MoveCheck res;
  auto fail = [&](double viol, const std::string& msg) {
    if (res.ok || viol > res.violation) {
      res.violation = std::max(res.violation, viol);
      if (res.ok) res.message = msg;
    }
    res.ok = false;
  };

  std::vector<std::size_t> rest_from, rest_to;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (!used_from[i]) rest_from.push_back(i);
  for (std::size_t i = 0; i < after.size(); ++i)
    if (!used_to[i]) rest_to.push_back(i);
  if (rest_from.size() != rest_to.size()) throw PointGameError("untouched point counts differ");
  for (std::size_t k = 0; k < rest_from.size(); ++k) {
    const auto& p = before[rest_from[k]];
    const auto& q = after[rest_to[k]];
    if (!(close(p.w, q.w, eps) && close(p.x, q.x, eps) && close(p.y, q.y, eps)))
      fail(std::max({std::abs(p.w - q.w), std::abs(p.x - q.x), std::abs(p.y - q.y)}),
           "untouched point " + describe(p) + " became " + describe(q));
  }

  const Axis ax = mv.axis;
  for (std::size_t g = 0; g < mv.groups.size(); ++g) {
    const auto& grp = mv.groups[g];
    const std::string where = "group " + std::to_string(g) + ": ";
    double wf = 0.0, wt = 0.0;
    for (auto i : grp.from) wf += before[i].w;
    for (auto i : grp.to) wt += after[i].w;
    if (!close(wf, wt, eps)) fail(std::abs(wf - wt), where + "weight " + fmt(wf) + " -> " + fmt(wt));

    // the fixed coordinate, over points that carry weight
    bool have = false;
    double other = 0.0;
    auto same_other = [&](const WeightedPoint& p) {
      if (p.w <= kEpsZero) return;
      if (!have) {
        other = other_coord(p, ax);
        have = true;
      } else if (!close(other_coord(p, ax), other, eps)) {
        fail(std::abs(other_coord(p, ax) - other), where + "points differ in the fixed coordinate");
      }
    };
    if (mv.kind == MoveKind::Align) {
      for (std::size_t k = 0; k < grp.from.size(); ++k) {
        const auto& p = before[grp.from[k]];
        const auto& q = after[grp.to[k]];
        if (p.w > kEpsZero && !close(other_coord(p, ax), other_coord(q, ax), eps))
          fail(std::abs(other_coord(p, ax) - other_coord(q, ax)), where + "align moved the fixed coordinate");
      }
    } else {
      for (auto i : grp.from) same_other(before[i]);
      for (auto i : grp.to) same_other(after[i]);
    }

    switch (mv.kind) {
      case MoveKind::Raise: {
        const auto& p = before[grp.from[0]];
        const auto& q = after[grp.to[0]];
        if (p.w > kEpsZero && axis_coord(q, ax) < axis_coord(p, ax) - eps * std::max(1.0, axis_coord(p, ax)))
          fail(axis_coord(p, ax) - axis_coord(q, ax), where + "raise lowers " + describe(p) + " to " + describe(q));
        break;
      }
      case MoveKind::Merge: {
        if (wf <= kEpsZero) break;
        double m = 0.0;
        for (auto i : grp.from) m += before[i].w * axis_coord(before[i], ax);
        m /= wf;
        const double t = axis_coord(after[grp.to[0]], ax);
        if (!close(m, t, eps)) fail(std::abs(m - t), where + "merge target " + fmt(t) + " is not the mean " + fmt(m));
        break;
      }
      case MoveKind::ProbMerge: {
        const double t = axis_coord(after[grp.to[0]], ax);
        for (auto i : grp.from)
          if (before[i].w > kEpsZero && !close(axis_coord(before[i], ax), t, eps))
            fail(std::abs(axis_coord(before[i], ax) - t), where + "probability merge of distinct points");
        break;
      }
      case MoveKind::Split: {
        const auto& src = before[grp.from[0]];
        if (src.w <= kEpsZero) break;
        double inv = 0.0;
        bool zero_target = false;
        for (auto i : grp.to) {
          if (after[i].w <= kEpsZero) continue;
          const double c = axis_coord(after[i], ax);
          if (c <= 0.0)
            zero_target = true;
          else
            inv += after[i].w / c;
        }
        if (zero_target) {
          fail(axis_coord(src, ax), where + "split onto a zero coordinate");
          break;
        }
        const double hm = wt / inv;
        if (axis_coord(src, ax) > hm + eps * std::max(1.0, hm))
          fail(axis_coord(src, ax) - hm, where + "source " + fmt(axis_coord(src, ax)) + " above harmonic mean " + fmt(hm));
        break;
      }
      case MoveKind::ProbSplit: {
        const double s = axis_coord(before[grp.from[0]], ax);
        for (auto i : grp.to)
          if (after[i].w > kEpsZero && !close(axis_coord(after[i], ax), s, eps))
            fail(std::abs(axis_coord(after[i], ax) - s), where + "probability split moved a point");
        break;
      }
      case MoveKind::Align: {
        double top = 0.0, target = 0.0;
        bool any = false;
        for (std::size_t k = 0; k < grp.from.size(); ++k) {
          const auto& p = before[grp.from[k]];
          const auto& q = after[grp.to[k]];
          if (!close(p.w, q.w, eps)) fail(std::abs(p.w - q.w), where + "align changed a weight");
          if (p.w <= kEpsZero) continue;
          top = std::max(top, axis_coord(p, ax));
          if (!any) {
            target = axis_coord(q, ax);
            any = true;
          } else if (!close(axis_coord(q, ax), target, eps)) {
            fail(std::abs(axis_coord(q, ax) - target), where + "aligned points disagree");
          }
        }
        if (any && target < top - eps * std::max(1.0, top))
          fail(top - target, where + "align target " + fmt(target) + " below " + fmt(top));
        break;
      }
    }
  }
  return res;
}

GameCheck verify_game(const PointGame& pg, double eps) {
  if (pg.compact) throw PointGameError("a compact view has no move groups to replay");
  if (pg.configurations.size() != pg.moves.size() + 1)
    throw PointGameError("a game needs one more configuration than moves");
  GameCheck res;
  auto bad = [&](std::ptrdiff_t at, std::string msg) {
    res.ok = false;
    res.bad_transition = at;
    res.message = std::move(msg);
    return res;
  };
  if (!same_configuration(pg.configurations.front(), {{0.5, 1.0, 0.0}, {0.5, 0.0, 1.0}}, eps))
    return bad(-1, "first configuration is not 1/2[1,0] + 1/2[0,1]");
  for (std::size_t i = 0; i < pg.configurations.size(); ++i)
    if (!close(total_weight(pg.configurations[i]), 1.0, eps))
      return bad(i == 0 ? -1 : static_cast<std::ptrdiff_t>(i - 1),
                 "configuration " + std::to_string(i) + " has total weight " + fmt(total_weight(pg.configurations[i])));
  for (std::size_t i = 0; i < pg.moves.size(); ++i) {
    const auto& mv = pg.moves[i];
    const auto& before = pg.configurations[i];
    const auto& after = pg.configurations[i + 1];
    const auto chk = verify_move(before, after, mv, eps);
    if (!chk.ok) return bad(static_cast<std::ptrdiff_t>(i), mv.label + ": " + chk.message);
    if (pg.kind == GameKind::Classical && mv.kind == MoveKind::Split) {
      for (const auto& grp : mv.groups) {
        const auto& src = before[grp.from[0]];
        if (src.w <= kEpsZero) continue;
        for (auto t : grp.to)
          if (after[t].w > kEpsZero && !close(axis_coord(after[t], mv.axis), axis_coord(src, mv.axis), eps))
            return bad(static_cast<std::ptrdiff_t>(i), mv.label + ": nontrivial split in a classical game");
      }
    }
  }
  const auto last = canonicalize(pg.configurations.back());
  if (last.size() != 1) return bad(-1, "last configuration has " + std::to_string(last.size()) + " points");
  if (!close(last[0].x, pg.zeta_b, eps) || !close(last[0].y, pg.zeta_a, eps))
    return bad(-1, "last point " + describe(last[0]) + " differs from the recorded final point");
  return res;
}

namespace {

class Builder {
 public:
  Builder(GameKind kind, Configuration start) {
    pg_.kind = kind;
    pg_.configurations.push_back(std::move(start));
  }
  const Configuration& current() const { return pg_.configurations.back(); }
  void step(MoveKind k, Axis ax, std::string label, std::vector<MoveGroup> groups, Configuration next) {
    pg_.moves.push_back({k, ax, std::move(label), std::move(groups)});
    pg_.configurations.push_back(std::move(next));
  }
  PointGame finish() {
    const auto& last = current();
    double w = 0.0, x = 0.0, y = 0.0;
    for (const auto& p : last) {
      w += p.w;
      x += p.w * p.x;
      y += p.w * p.y;
    }
    pg_.zeta_b = safe_div(x, w);
    pg_.zeta_a = safe_div(y, w);
    return std::move(pg_);
  }

 private:
  PointGame pg_;
};

// Splits on `axis` from the current configuration: each group's source goes
// to the listed targets. Quantum games do it in one move; classical ones
// probability-split onto the source coordinate and then raise.
void split_step(Builder& b, bool classical, Axis ax, const std::string& label, const std::vector<MoveGroup>& groups,
                const Configuration& next) {
  if (!classical) {
    b.step(MoveKind::Split, ax, label, groups, next);
    return;
  }
  Configuration mid = next;
  std::vector<MoveGroup> raises;
  for (const auto& g : groups) {
    const auto& src = b.current()[g.from[0]];
    for (auto t : g.to) {
      (ax == Axis::Horizontal ? mid[t].x : mid[t].y) = axis_coord(src, ax);
      raises.push_back({{t}, {t}});
    }
  }
  b.step(MoveKind::ProbSplit, ax, label + " (probability part)", groups, mid);
  b.step(MoveKind::Raise, ax, label + " (raises)", raises, next);
}

// Merges on `ax` of the points sharing i / radix into index i / radix.
Configuration merge_groups(const Configuration& cur, std::size_t radix, Axis ax, std::vector<MoveGroup>& groups) {
  Configuration out(cur.size() / radix);
  groups.assign(out.size(), {});
  for (std::size_t g = 0; g < out.size(); ++g) {
    double w = 0.0, m = 0.0;
    WeightedPoint rep = cur[g * radix];
    for (std::size_t k = 0; k < radix; ++k) {
      const auto& p = cur[g * radix + k];
      groups[g].from.push_back(g * radix + k);
      w += p.w;
      m += p.w * axis_coord(p, ax);
      if (p.w > kEpsZero) rep = p;
    }
    groups[g].to.push_back(g);
    WeightedPoint q = rep;
    q.w = w;
    (ax == Axis::Horizontal ? q.x : q.y) = safe_div(m, w);
    out[g] = q;
  }
  return out;
}

// Digits of a prefix of the interleaved history, split into Alice's and
// Bob's flat prefix indices.
std::pair<std::size_t, std::size_t> split_prefix(const std::vector<std::size_t>& dims, std::size_t len,
                                                 std::size_t idx) {
  std::vector<std::size_t> digits(len);
  for (std::size_t d = len; d-- > 0;) {
    digits[d] = idx % dims[d];
    idx /= dims[d];
  }
  std::size_t ix = 0, iy = 0;
  for (std::size_t d = 0; d < len; ++d) {
    if (d % 2 == 0)
      ix = ix * dims[d] + digits[d];
    else
      iy = iy * dims[d] + digits[d];
  }
  return {ix, iy};
}

void check_classical_duals(const BccfProtocol& proto, const BobDual& bob, const AliceDual& alice) {
  const std::size_t nb = proto.bob_size();
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, Outcome::One));
    for (std::size_t y : beta.support())
      if (bob.v(a)[y] < 1.0 - kEpsFeas)
        throw InfeasibleDualError("classical Bob dual: v_" + std::to_string(a) + "[" + std::to_string(y) + "] < 1");
  }
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, Outcome::Zero));
    for (std::size_t x : proto.alpha(a).support())
      for (std::size_t y : beta.support())
        if (alice.z[x * nb + y] < 0.5 * beta[y] - kEpsFeas)
          throw InfeasibleDualError("classical Alice dual: z[" + std::to_string(x) + "," + std::to_string(y) +
                                    "] < beta/2");
  }
}

PointGame build_game(const BccfProtocol& proto, const BobDual& bob1, const AliceDual& alice0, GameKind kind) {
  if (bob1.outcome != Outcome::One) throw PointGameError("the game needs Bob's dual for outcome 1");
  if (alice0.outcome != Outcome::Zero) throw PointGameError("the game needs Alice's dual for outcome 0");
  const std::size_t n = proto.rounds(), na = proto.alice_size(), nb = proto.bob_size();
  if (bob1.v0.size() != nb || bob1.v1.size() != nb) throw DimensionError("Bob dual must have |B| entries per bit");
  if (alice0.z.size() != na * nb) throw DimensionError("Alice dual must have |A||B| entries");
  const bool classical = kind == GameKind::Classical;
  if (classical) {
    check_classical_duals(proto, bob1, alice0);
  } else {
    for (const auto& chk : {check_feasibility(proto, bob1), check_feasibility(proto, alice0)})
      if (!chk.feasible) throw InfeasibleDualError("infeasible dual: " + chk.worst_constraint);
  }

  const auto pa_tab = honest_alice_prefix_table(proto);
  const auto pb_tab = honest_bob_prefix_table(proto);
  const auto& pb = pb_tab[n];
  const auto w = bob_dual_levels(proto, bob1);
  const auto z = alice_dual_levels(proto, alice0);
  auto al = [&](int a, std::size_t x) { return proto.alpha(a)[x]; };
  auto be = [&](int b, std::size_t y) { return proto.beta(b)[y]; };
  auto v = [&](int a, std::size_t y) { return bob1.v(a)[y]; };

  Builder b(kind, {{0.5, 1.0, 0.0}, {0.5, 0.0, 1.0}});

  // probability splitting
  {
    Configuration next;
    std::vector<MoveGroup> groups(2);
    for (int a = 0; a < 2; ++a) {
      next.push_back({0.25, 1.0, 0.0});
      groups[0].to.push_back(next.size() - 1);
    }
    for (int a = 0; a < 2; ++a)
      for (std::size_t y = 0; y < nb; ++y) {
        next.push_back({0.25 * be(a, y), 0.0, 1.0});
        groups[1].to.push_back(next.size() - 1);
      }
    groups[0].from = {0};
    groups[1].from = {1};
    b.step(MoveKind::ProbSplit, Axis::Horizontal, "prob. splitting", groups, next);
  }
  const std::size_t off = 2 * nb;  // start of Alice's block once Bob's is split
  // horizontal split on v
  {
    Configuration next;
    std::vector<MoveGroup> groups(2);
    for (int a = 0; a < 2; ++a) {
      groups[a].from = {static_cast<std::size_t>(a)};
      for (std::size_t y = 0; y < nb; ++y) {
        next.push_back({0.25 * be(1 - a, y), v(a, y), 0.0});
        groups[a].to.push_back(next.size() - 1);
      }
    }
    for (std::size_t i = 2; i < b.current().size(); ++i) next.push_back(b.current()[i]);
    split_step(b, classical, Axis::Horizontal, "point splitting on v", groups, next);
  }
  // raises
  {
    Configuration next = b.current();
    std::vector<MoveGroup> groups;
    for (int a = 0; a < 2; ++a)
      for (std::size_t y = 0; y < nb; ++y) {
        const std::size_t i = off + a * nb + y;
        next[i].x = v(a, y);
        groups.push_back({{i}, {i}});
      }
    b.step(MoveKind::Raise, Axis::Horizontal, "point raises", groups, next);
  }
  // vertical split on z_{n+1}
  {
    Configuration next(b.current().begin(), b.current().begin() + static_cast<std::ptrdiff_t>(off));
    std::vector<MoveGroup> groups;
    for (int a = 0; a < 2; ++a)
      for (std::size_t y = 0; y < nb; ++y) {
        MoveGroup g{{off + a * nb + y}, {}};
        for (std::size_t x = 0; x < na; ++x) {
          const double target = be(a, y) > 0.0 ? 2.0 * alice0.z[x * nb + y] / be(a, y) : 1.0;
          next.push_back({0.25 * be(a, y) * al(a, x), v(a, y), target});
          g.to.push_back(next.size() - 1);
        }
        groups.push_back(std::move(g));
      }
    split_step(b, classical, Axis::Vertical, "point splitting on z", groups, next);
  }
  // probability splitting of Bob's block, indices (a, y, x)
  const std::size_t off2 = 2 * nb * na;
  {
    Configuration next;
    std::vector<MoveGroup> groups;
    for (int a = 0; a < 2; ++a)
      for (std::size_t y = 0; y < nb; ++y) {
        MoveGroup g{{a * nb + y}, {}};
        for (std::size_t x = 0; x < na; ++x) {
          next.push_back({0.25 * be(1 - a, y) * al(a, x), v(a, y), 0.0});
          g.to.push_back(next.size() - 1);
        }
        groups.push_back(std::move(g));
      }
    for (std::size_t i = off; i < b.current().size(); ++i) next.push_back(b.current()[i]);
    b.step(MoveKind::ProbSplit, Axis::Horizontal, "prob. splitting", groups, next);
  }
  // merges, then raises to z_{n+1}/p(y); result indexed (a, x, y)
  {
    const auto& cur = b.current();
    Configuration next(2 * na * nb);
    std::vector<MoveGroup> groups;
    for (int a = 0; a < 2; ++a)
      for (std::size_t y = 0; y < nb; ++y)
        for (std::size_t x = 0; x < na; ++x) {
          const std::size_t k = (a * nb + y) * na + x;
          const auto& p = cur[k];
          const auto& q = cur[off2 + k];
          const std::size_t t = (a * na + x) * nb + y;
          next[t] = {p.w + q.w, v(a, y), safe_div(p.w * p.y + q.w * q.y, p.w + q.w)};
          groups.push_back({{k, off2 + k}, {t}});
        }
    b.step(MoveKind::Merge, Axis::Vertical, "merges", groups, next);

    Configuration raised = next;
    std::vector<MoveGroup> raises;
    for (std::size_t t = 0; t < raised.size(); ++t) {
      const std::size_t x = (t / nb) % na, y = t % nb;
      raised[t].y = safe_div(alice0.z[x * nb + y], pb[y]);
      raises.push_back({{t}, {t}});
    }
    b.step(MoveKind::Raise, Axis::Vertical, "raises to z/p(y)", raises, raised);
  }
  // merge a; points now indexed by the interleaved history
  {
    const auto& cur = b.current();
    Configuration next(na * nb);
    std::vector<MoveGroup> groups(na * nb);
    for (std::size_t x = 0; x < na; ++x)
      for (std::size_t y = 0; y < nb; ++y) {
        const std::size_t h = proto.interleave(x, y);
        const auto& p = cur[(0 * na + x) * nb + y];
        const auto& q = cur[(1 * na + x) * nb + y];
        const double wt = p.w + q.w;
        next[h] = {wt, safe_div(p.w * p.x + q.w * q.x, wt), p.w > kEpsZero ? p.y : q.y};
        groups[h] = {{(0 * na + x) * nb + y, (1 * na + x) * nb + y}, {h}};
      }
    b.step(MoveKind::Merge, Axis::Horizontal, "merge a", groups, next);
  }

  const auto hist = proto.history_space(n);
  const auto& dims = hist.dims();
  auto align = [&](std::size_t len, std::size_t radix, Axis ax, const std::vector<double>& level,
                   const std::vector<double>& prob, bool alice_digits, const std::string& label) {
    // points indexed by a prefix of length len; group i / radix lies in a prefix of length len - 1
    Configuration next = b.current();
    std::vector<MoveGroup> groups(next.size() / radix);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::size_t g = i / radix;
      const auto [ix, iy] = split_prefix(dims, len - 1, g);
      const double target = safe_div(level[g], prob[alice_digits ? ix : iy]);
      (ax == Axis::Horizontal ? next[i].x : next[i].y) = target;
      groups[g].from.push_back(i);
      groups[g].to.push_back(i);
    }
    b.step(MoveKind::Align, ax, label, groups, next);
  };

  align(2 * n, dims[2 * n - 1], Axis::Horizontal, w[n - 1], pa_tab[n], true, "align y" + std::to_string(n));
  for (std::size_t len = 2 * n; len >= 1; --len) {
    const std::size_t d = len - 1;
    const std::size_t j = d / 2 + 1;  // round of the digit being removed
    std::vector<MoveGroup> groups;
    if (d % 2 == 1) {
      auto next = merge_groups(b.current(), dims[d], Axis::Vertical, groups);
      b.step(MoveKind::Merge, Axis::Vertical, "merge y" + std::to_string(j), std::move(groups), std::move(next));
      align(len - 1, dims[d - 1], Axis::Vertical, z[j - 1], pb_tab[j - 1], false, "align x" + std::to_string(j));
    } else {
      auto next = merge_groups(b.current(), dims[d], Axis::Horizontal, groups);
      b.step(MoveKind::Merge, Axis::Horizontal, "merge x" + std::to_string(j), std::move(groups), std::move(next));
      if (j >= 2)
        align(len - 1, dims[d - 1], Axis::Horizontal, w[j - 2], pa_tab[j - 1], true,
              "align y" + std::to_string(j - 1));
    }
  }
  return b.finish();
}

}  // namespace

PointGame build_quantum_game(const BccfProtocol& proto, const BobDual& bob1, const AliceDual& alice0) {
  return build_game(proto, bob1, alice0, GameKind::Quantum);
}

PointGame build_classical_game(const BccfProtocol& proto, const BobDual& bob1, const AliceDual& alice0) {
  return build_game(proto, bob1, alice0, GameKind::Classical);
}

PointGame compact_view(const PointGame& pg) {
  PointGame out;
  out.kind = pg.kind;
  out.zeta_b = pg.zeta_b;
  out.zeta_a = pg.zeta_a;
  out.compact = true;
  if (pg.configurations.empty()) return out;
  // solver duals are only accurate to ~1e-12, so identity is judged at kEpsPg
  out.configurations.push_back(canonicalize(pg.configurations.front(), kEpsPg));
  for (std::size_t i = 0; i < pg.moves.size(); ++i) {
    auto next = canonicalize(pg.configurations[i + 1], kEpsPg);
    if (same_configuration(out.configurations.back(), next, kEpsPg)) continue;
    const auto& mv = pg.moves[i];
    out.moves.push_back({mv.kind, mv.axis, mv.label, {}});
    out.configurations.push_back(std::move(next));
  }
  return out;
}

GamePair build_game_pair(const BccfProtocol& proto, const BobDual& bob0, const BobDual& bob1,
                         const AliceDual& alice0, const AliceDual& alice1, GameKind kind) {
  if (bob0.outcome != Outcome::Zero || bob1.outcome != Outcome::One || alice0.outcome != Outcome::Zero ||
      alice1.outcome != Outcome::One)
    throw PointGameError("pair needs Bob and Alice duals for outcomes 0 and 1, in that order");
  GamePair pair;
  pair.first = build_game(proto, bob1, alice0, kind);
  // on swapped betas, forcing 1 against beta' is forcing 0 against beta, and vice versa
  BobDual b = bob0;
  b.outcome = Outcome::One;
  AliceDual a = alice1;
  a.outcome = Outcome::Zero;
  pair.second = build_game(proto.with_swapped_betas(), b, a, kind);
  pair.zeta_b1 = pair.first.zeta_b;
  pair.zeta_a0 = pair.first.zeta_a;
  pair.zeta_b0 = pair.second.zeta_b;
  pair.zeta_a1 = pair.second.zeta_a;
  return pair;
}

bool classical_final_point_theorem(const PointGame& pg) {
  if (pg.kind != GameKind::Classical) throw PointGameError("not a classical game");
  const auto chk = verify_game(pg);
  if (!chk.ok) throw PointGameError("refusing an invalid game: " + chk.message);
  return std::max(pg.zeta_b, pg.zeta_a) >= 1.0 - 1e-9;
}

std::string point_game_json(const PointGame& pg, int indent) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(pg.kind);
  j["compact"] = pg.compact;
  auto& cfgs = j["configurations"] = nlohmann::ordered_json::array();
  for (const auto& c : pg.configurations) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : c) arr.push_back({{"w", p.w}, {"x", p.x}, {"y", p.y}});
    cfgs.push_back(std::move(arr));
  }
  auto& moves = j["moves"] = nlohmann::ordered_json::array();
  for (const auto& m : pg.moves) {
    nlohmann::ordered_json mj{{"kind", to_string(m.kind)}, {"axis", to_string(m.axis)}, {"label", m.label}};
    if (!m.groups.empty()) {
      auto gs = nlohmann::ordered_json::array();
      for (const auto& g : m.groups) gs.push_back({{"from", g.from}, {"to", g.to}});
      mj["groups"] = std::move(gs);
    }
    moves.push_back(std::move(mj));
  }
  j["final"] = {pg.zeta_b, pg.zeta_a};
  return j.dump(indent);
}

std::string point_game_svg(const PointGame& pg) {
  const PointGame view = pg.compact ? pg : compact_view(pg);
  double top = 1.0;
  for (const auto& c : view.configurations)
    for (const auto& p : c) top = std::max({top, p.x, p.y});

  constexpr double panel = 220, margin = 34, rmax = 16;
  const std::size_t count = view.configurations.size();
  const std::size_t cols = std::min<std::size_t>(4, std::max<std::size_t>(count, 1));
  const std::size_t rows = (count + cols - 1) / cols;
  const double width = cols * panel, height = rows * panel;
  const double span = panel - 2 * margin;

  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "font-family=\"sans-serif\" font-size=\"10\">\n",
                width, height);
  os << buf;
  for (std::size_t k = 0; k < count; ++k) {
    const double ox = (k % cols) * panel + margin, oy = (k / cols) * panel + margin;
    const std::string title =
        k == 0 ? "start" : std::to_string(k) + ": " + view.moves[k - 1].label + " (" + to_string(view.moves[k - 1].axis) + ")";
    std::snprintf(buf, sizeof buf, "<g>\n<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", ox - margin + 6, oy - 16,
                  title.c_str());
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ox, oy + span, ox + span, oy + span, ox, oy, ox, oy + span);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\">0</text><text x=\"%.1f\" y=\"%.1f\">%.3g</text>"
                  "<text x=\"%.1f\" y=\"%.1f\">%.3g</text>\n",
                  ox - 10, oy + span + 12, ox + span - 8, oy + span + 12, top, ox - 30, oy + 4, top);
    os << buf;
    for (const auto& p : view.configurations[k]) {
      const double cx = ox + span * p.x / top, cy = oy + span - span * p.y / top;
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"steelblue\" fill-opacity=\"0.7\">"
                    "<title>%.6g [%.6g, %.6g]</title></circle>\n",
                    cx, cy, rmax * std::sqrt(p.w), p.w, p.x, p.y);
      os << buf;
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bccf
