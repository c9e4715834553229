#include "bccf/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "barrier.hpp"

namespace bccf {

namespace {

void expect_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(n) + " entries, got " +
                         std::to_string(v.size()));
  }
}

// q_a = (alpha_a (x) I)^T p
std::vector<double> bob_marginal(const BccfProtocol& proto, int a, std::span<const double> p) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<double> q(nb, 0.0);
  for (std::size_t x = 0; x < na; ++x) {
    const double w = proto.alpha(a)[x];
    if (w == 0.0) continue;
    for (std::size_t y = 0; y < nb; ++y) q[y] += w * p[x * nb + y];
  }
  return q;
}

double root_overlap(std::span<const double> p, std::span<const double> q) {
  double r = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r += std::sqrt(std::max(p[i], 0.0) * std::max(q[i], 0.0));
  return r;
}

}  // namespace

const char* to_string(FwVariant v) {
  switch (v) {
    case FwVariant::Vanilla: return "vanilla";
    case FwVariant::Away: return "away";
    case FwVariant::Pairwise: return "pairwise";
    case FwVariant::Corrective: return "corrective";
    case FwVariant::Barrier: return "barrier";
    case FwVariant::Auto: return "auto";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// objectives

double bob_objective(const BccfProtocol& proto, Outcome outcome, std::span<const double> p) {
  expect_size(p, proto.alice_size() * proto.bob_size(), "bob_objective");
  double f = 0.0;
  for (int a = 0; a < 2; ++a) {
    const auto q = bob_marginal(proto, a, p);
    const double r = root_overlap(q, proto.beta(target_bit(a, outcome)).values());
    f += 0.5 * r * r;
  }
  return f;
}

ObjectiveEval bob_objective_grad(const BccfProtocol& proto, Outcome outcome, std::span<const double> p) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  expect_size(p, na * nb, "bob_objective");
  ObjectiveEval out;
  out.gradient.assign(na * nb, 0.0);
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, outcome));
    const auto q = bob_marginal(proto, a, p);
    const double r = root_overlap(q, beta.values());
    out.value += 0.5 * r * r;
    // d/dp_{x,y} of r^2/2 is r * alpha_{a,x} * sqrt(beta_y / q_y) / 2
    std::vector<double> dy(nb, 0.0);
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      dy[y] = 0.5 * r * std::sqrt(beta[y] / std::max(q[y], kGradFloor));
    }
    for (std::size_t x = 0; x < na; ++x) {
      const double w = proto.alpha(a)[x];
      if (w == 0.0) continue;
      for (std::size_t y = 0; y < nb; ++y) out.gradient[x * nb + y] += w * dy[y];
    }
  }
  return out;
}

double alice_objective(const BccfProtocol& proto, Outcome outcome, std::span<const double> s) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  expect_size(s, 2 * na * nb, "alice_objective");
  double f = 0.0;
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      double r = 0.0;
      for (std::size_t x = 0; x < na; ++x) r += std::sqrt(alpha[x] * std::max(s[(a * na + x) * nb + y], 0.0));
      f += 0.5 * beta[y] * r * r;
    }
  }
  return f;
}

namespace {

constexpr double kEmptySlice = 1e-9;

// Per slice (a, y), a block g with sum_x 1/2 beta_y alpha_x / g_x <= 1, in axy
// layout. That set is the superdifferential of the slice term at 0, so any
// such g is a valid certificate, and on a slice whose entries are all below
// `empty_tol` it is also a supergradient. Nonempty slices get the gradient.
// Empty ones copy the other bit's block when it qualifies (only max_a g
// reaches the dual), else the cheapest shift of it. With `share`, nonempty
// slices are also replaced by the other block when that is admissible.
std::vector<double> alice_supergradient(const BccfProtocol& proto, Outcome outcome, std::span<const double> s,
                                        double empty_tol, bool share) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<double> g(2 * na * nb, 0.0);
  std::vector<char> empty(2 * nb, 0);
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      double r_floored = 0.0, top = 0.0;
      for (std::size_t x = 0; x < na; ++x) {
        if (alpha[x] == 0.0) continue;
        const double v = std::max(s[(a * na + x) * nb + y], 0.0);
        r_floored += std::sqrt(alpha[x] * std::max(v, kGradFloor));
        top = std::max(top, v);
      }
      empty[a * nb + y] = top <= empty_tol;
      for (std::size_t x = 0; x < na; ++x) {
        if (alpha[x] == 0.0) continue;
        const std::size_t i = (a * na + x) * nb + y;
        g[i] = 0.5 * beta[y] * r_floored * std::sqrt(alpha[x] / std::max(s[i], kGradFloor));
      }
    }
  }

  // empty slices first, so that sharing never copies a floored block
  for (int pass = 0; pass < (share ? 2 : 1); ++pass) {
    for (int a = 0; a < 2; ++a) {
      const auto& alpha = proto.alpha(a);
      const auto& beta = proto.beta(target_bit(a, outcome));
      const auto& beta_other = proto.beta(target_bit(1 - a, outcome));
      for (std::size_t y = 0; y < nb; ++y) {
        if (beta[y] == 0.0 || beta_other[y] == 0.0) continue;
        const double c = 0.5 * beta[y];
        auto other = [&](std::size_t x) { return g[((1 - a) * na + x) * nb + y]; };
        auto load = [&](double tau) {
          double sum = 0.0;
          for (std::size_t x = 0; x < na; ++x) {
            if (alpha[x] == 0.0) continue;
            const double z = other(x) + tau * c;
            if (z <= 0.0) return std::numeric_limits<double>::infinity();
            sum += c * alpha[x] / z;
          }
          return sum;
        };
        if (static_cast<bool>(empty[a * nb + y]) == (pass == 1)) continue;
        double tau = 0.0;
        if (load(0.0) > 1.0) {
          if (!empty[a * nb + y]) continue;
          // load(1) <= 1 always; bisect for the smallest admissible shift
          double lo = 0.0, hi = 1.0;
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (load(mid) > 1.0 ? lo : hi) = mid;
          }
          tau = hi;
        }
        for (std::size_t x = 0; x < na; ++x)
          if (alpha[x] != 0.0) g[(a * na + x) * nb + y] = other(x) + tau * c;
      }
    }
  }
  return g;
}

// The gradient with every empty slice set to the constant 1/2 beta_y, the
// classical coefficient: worth moving mass into a slice when that beats
// what the other bit earns there.
std::vector<double> alice_flat_direction(const BccfProtocol& proto, Outcome outcome, std::span<const double> s,
                                         std::vector<double> g) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      double top = 0.0;
      for (std::size_t x = 0; x < na; ++x)
        if (alpha[x] != 0.0) top = std::max(top, s[(a * na + x) * nb + y]);
      if (beta[y] == 0.0 || top > kEmptySlice) continue;
      for (std::size_t x = 0; x < na; ++x)
        if (alpha[x] != 0.0) g[(a * na + x) * nb + y] = 0.5 * beta[y];
    }
  }
  return g;
}

// Points of the polytope that reveal a instead of 1 - a on every history
// ending in y, one for each empty slice (a, y) that the gradient on the other
// side says is worth opening. Opening it pays off only when several x move at
// once, which no single vertex does.
std::vector<std::vector<double>> alice_flip_points(const BccfProtocol& proto, Outcome outcome,
                                                   std::span<const double> s) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  const auto g = alice_objective_grad(proto, outcome, s).gradient;
  std::vector<std::vector<double>> out;
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      double top = 0.0, moved = 0.0, load = 0.0;
      for (std::size_t x = 0; x < na; ++x) {
        if (alpha[x] == 0.0) continue;
        top = std::max(top, s[(a * na + x) * nb + y]);
        const double other = g[((1 - a) * na + x) * nb + y];
        load += other > 0.0 ? 0.5 * beta[y] * alpha[x] / other : std::numeric_limits<double>::infinity();
      }
      if (top > kEmptySlice || load <= 1.0) continue;
      std::vector<double> flipped(s.begin(), s.end());
      for (std::size_t x = 0; x < na; ++x) {
        const std::size_t i = (a * na + x) * nb + y, j = ((1 - a) * na + x) * nb + y;
        moved += flipped[j];
        flipped[i] += flipped[j];
        flipped[j] = 0.0;
      }
      if (moved > 0.0) out.push_back(std::move(flipped));
    }
  }
  return out;
}

}  // namespace

ObjectiveEval alice_objective_grad(const BccfProtocol& proto, Outcome outcome, std::span<const double> s) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  expect_size(s, 2 * na * nb, "alice_objective");
  ObjectiveEval out;
  out.gradient.assign(2 * na * nb, 0.0);
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      double r = 0.0;
      for (std::size_t x = 0; x < na; ++x) r += std::sqrt(alpha[x] * std::max(s[(a * na + x) * nb + y], 0.0));
      out.value += 0.5 * beta[y] * r * r;
      for (std::size_t x = 0; x < na; ++x) {
        if (alpha[x] == 0.0) continue;
        const std::size_t i = (a * na + x) * nb + y;
        out.gradient[i] = 0.5 * beta[y] * r * std::sqrt(alpha[x] / std::max(s[i], kGradFloor));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// duals from primal points

BobDual bob_dual_from_primal(const BccfProtocol& proto, Outcome outcome, std::span<const double> p) {
  expect_size(p, proto.alice_size() * proto.bob_size(), "bob_dual_from_primal");
  BobDual d;
  d.outcome = outcome;
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, outcome));
    auto q = bob_marginal(proto, a, p);
    double lambda = 0.0;
    for (std::size_t y = 0; y < q.size(); ++y) {
      q[y] = std::max(q[y], kGradFloor);
      if (beta.in_support(y)) lambda += std::sqrt(beta[y] * q[y]);
    }
    std::vector<double> v(q.size(), 0.0);
    for (std::size_t y = 0; y < q.size(); ++y)
      if (beta.in_support(y)) v[y] = lambda * std::sqrt(beta[y] / q[y]);
    (a == 0 ? d.v0 : d.v1) = std::move(v);
  }
  return d;
}

AliceDual alice_dual_from_primal(const BccfProtocol& proto, Outcome outcome, std::span<const double> s) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  expect_size(s, 2 * na * nb, "alice_dual_from_primal");
  AliceDual best;
  double best_value = std::numeric_limits<double>::infinity();
  // slices carrying almost no mass are usually empty at the optimum, so they
  // are tried both ways
  for (const double tol : {kGradFloor, kEmptySlice}) {
    const auto g = alice_supergradient(proto, outcome, s, tol, true);
    AliceDual d;
    d.outcome = outcome;
    d.z.assign(na * nb, 0.0);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t i = 0; i < na * nb; ++i) d.z[i] = std::max(d.z[i], g[a * na * nb + i]);
    const double v = eval_dual_alice(proto, d);
    if (v < best_value) best_value = v, best = std::move(d);
  }
  return best;
}

// ---------------------------------------------------------------------------
// conditional gradient

namespace {

struct Atom {
  std::vector<double> vertex;
  double weight;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// f(x) = sum_t c_t (sum_i sqrt(b_i q_i))^2 with q_i a nonnegative linear
// function of x. Both objectives have this form; the corrective solver works
// on it directly.
struct FidelityTerm {
  double c = 0.0;
  std::vector<double> b;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;  // q_i = sum coeff * x[idx]
};

std::vector<FidelityTerm> bob_terms(const BccfProtocol& proto, Outcome outcome) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<FidelityTerm> terms;
  for (int a = 0; a < 2; ++a) {
    const auto& beta = proto.beta(target_bit(a, outcome));
    FidelityTerm t;
    t.c = 0.5;
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      t.b.push_back(beta[y]);
      auto& row = t.rows.emplace_back();
      for (std::size_t x = 0; x < na; ++x)
        if (proto.alpha(a)[x] != 0.0) row.emplace_back(x * nb + y, proto.alpha(a)[x]);
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

std::vector<FidelityTerm> alice_terms(const BccfProtocol& proto, Outcome outcome) {
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<FidelityTerm> terms;
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      FidelityTerm t;
      t.c = 0.5 * beta[y];
      for (std::size_t x = 0; x < na; ++x) {
        if (alpha[x] == 0.0) continue;
        t.b.push_back(alpha[x]);
        t.rows.push_back({{(a * na + x) * nb + y, 1.0}});
      }
      terms.push_back(std::move(t));
    }
  }
  return terms;
}

struct Problem {
  std::vector<FidelityTerm> terms;
  std::function<double(std::span<const double>)> f;
  std::function<ObjectiveEval(std::span<const double>)> fg;
  std::function<LmoResult<double>(std::span<const double>)> lmo;
  // further valid supergradients at x whose LMO vertices the corrective
  // solver also tries (the gradient alone ignores empty slices)
  std::function<std::vector<std::vector<double>>(std::span<const double>)> extra_directions;
  // non-vertex points of the polytope worth adding to the hull at x
  std::function<std::vector<std::vector<double>>(std::span<const double>)> extra_atoms;
  // same for a dual given by a direction whose LMO value bounds the optimum;
  // optional
  std::function<double(std::span<const double>, QuantumResult&)> certify_direction;
  // builds a dual at x, stores it in the result, returns its value
  std::function<double(std::span<const double>, QuantumResult&)> certify;
};

// argmax of a concave phi on [0, hi]; the endpoint is checked explicitly so
// drop steps land exactly on it.
double line_search(const std::function<double(double)>& phi, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0, up = hi;
  double c = up - kInvPhi * (up - lo), d = lo + kInvPhi * (up - lo);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 64; ++it) {
    if (fc < fd) {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (up - lo);
      fd = phi(d);
    } else {
      up = d;
      d = c;
      fd = fc;
      c = up - kInvPhi * (up - lo);
      fc = phi(c);
    }
  }
  double best = 0.5 * (lo + up), fbest = phi(best);
  if (const double fh = phi(hi); fh >= fbest) best = hi, fbest = fh;
  if (phi(0.0) > fbest) best = 0.0;
  return best;
}

QuantumResult run_frank_wolfe(const Problem& prob, std::vector<double> x0, const SolveOptions& opts,
                              QuantumResult result) {
  std::vector<Atom> atoms{{x0, 1.0}};
  std::vector<double> x = std::move(x0);
  std::vector<double> trial(x.size());

  QuantumResult best_dual = result;
  best_dual.dual_value = prob.certify(x, best_dual);

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double fx = prob.f(x);
    if (best_dual.dual_value - fx <= opts.gap_tol) break;

    const auto g = prob.fg(x).gradient;
    const auto fw = prob.lmo(g);
    const double gx = dot(g, x);
    const double fw_gain = fw.value - gx;

    std::size_t away = 0;
    double away_gain = -1.0;
    if (opts.variant != FwVariant::Vanilla) {
      double worst = 0.0;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double gv = dot(g, atoms[k].vertex);
        if (k == 0 || gv < worst) worst = gv, away = k;
      }
      away_gain = gx - worst;
    }

    std::vector<double> dir(x.size());
    double gamma_max = 1.0;
    enum { kFw, kAway, kPair } step = kFw;
    if (opts.variant == FwVariant::Pairwise && atoms.size() > 1) {
      step = kPair;
      for (std::size_t i = 0; i < x.size(); ++i) dir[i] = fw.vertex[i] - atoms[away].vertex[i];
      gamma_max = atoms[away].weight;
    } else if (opts.variant == FwVariant::Away && atoms.size() > 1 && away_gain > fw_gain) {
      step = kAway;
      for (std::size_t i = 0; i < x.size(); ++i) dir[i] = x[i] - atoms[away].vertex[i];
      const double wa = atoms[away].weight;
      gamma_max = wa / (1.0 - wa);
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) dir[i] = fw.vertex[i] - x[i];
    }

    auto phi = [&](double gamma) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = std::max(x[i] + gamma * dir[i], 0.0);
      return prob.f(trial);
    };
    double gamma = line_search(phi, gamma_max);
    if (step != kFw && gamma == 0.0) {
      // Dropping this atom would cut a coordinate off at a square-root
      // singularity; take the plain Frank-Wolfe step instead.
      step = kFw;
      gamma_max = 1.0;
      for (std::size_t i = 0; i < x.size(); ++i) dir[i] = fw.vertex[i] - x[i];
      gamma = line_search(phi, gamma_max);
    }

    auto find_or_add = [&](const std::vector<double>& v) -> std::size_t {
      for (std::size_t k = 0; k < atoms.size(); ++k)
        if (atoms[k].vertex == v) return k;
      atoms.push_back({v, 0.0});
      return atoms.size() - 1;
    };
    if (gamma > 0.0) {
      if (step == kFw) {
        if (gamma >= 1.0) {
          atoms.assign(1, Atom{fw.vertex, 1.0});
        } else {
          for (auto& atom : atoms) atom.weight *= 1.0 - gamma;
          atoms[find_or_add(fw.vertex)].weight += gamma;
        }
      } else if (step == kAway) {
        for (auto& atom : atoms) atom.weight *= 1.0 + gamma;
        atoms[away].weight -= gamma;
        if (gamma >= gamma_max) atoms[away].weight = 0.0;
      } else {
        const std::size_t k = find_or_add(fw.vertex);
        atoms[away].weight -= gamma;
        atoms[k].weight += gamma;
        if (gamma >= gamma_max) atoms[away].weight = 0.0;
      }
      std::erase_if(atoms, [](const Atom& a) { return a.weight <= 0.0; });
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(x[i] + gamma * dir[i], 0.0);
    } else if (step == kFw) {
      // no ascent along the Frank-Wolfe direction: x is optimal up to the line search
      QuantumResult cand = result;
      cand.dual_value = prob.certify(x, cand);
      if (cand.dual_value < best_dual.dual_value) best_dual = cand;
      ++it;
      break;
    }

    if ((it + 1) % std::max(opts.dual_every, 1) == 0) {
      QuantumResult cand = result;
      cand.dual_value = prob.certify(x, cand);
      if (cand.dual_value < best_dual.dual_value) best_dual = cand;
    }
  }

  QuantumResult cand = result;
  cand.dual_value = prob.certify(x, cand);
  if (cand.dual_value < best_dual.dual_value) best_dual = cand;

  best_dual.primal = x;
  best_dual.value = prob.f(x);
  best_dual.gap = best_dual.dual_value - best_dual.value;
  best_dual.iterations = it;
  best_dual.converged = best_dual.gap <= opts.gap_tol;
  return best_dual;
}


// Maximizes f(sum_k w_k V_k) over the simplex with a log barrier on w and
// Newton steps. Q holds, per atom, the q-coordinates of every term.
class CorrectiveMaster {
 public:
  explicit CorrectiveMaster(const std::vector<FidelityTerm>& terms) : terms_(terms) {
    for (const auto& t : terms_) {
      offsets_.push_back(width_);
      width_ += t.b.size();
    }
    offsets_.push_back(width_);
  }

  // `linear` is an extra objective term, linear in the atom weights
  void add_atom(const std::vector<double>& vertex, double linear = 0.0) {
    linear_.push_back(linear);
    std::vector<double> q(width_, 0.0);
    for (std::size_t t = 0; t < terms_.size(); ++t)
      for (std::size_t i = 0; i < terms_[t].rows.size(); ++i)
        for (const auto& [idx, coeff] : terms_[t].rows[i]) q[offsets_[t] + i] += coeff * vertex[idx];
    atom_q_.push_back(std::move(q));
  }

  std::size_t size() const { return atom_q_.size(); }
  void clear() {
    atom_q_.clear();
    linear_.clear();
  }

  // Returns the optimized weights, starting from the strictly positive `w`.
  Eigen::VectorXd solve(Eigen::VectorXd w) const {
    const auto k = static_cast<Eigen::Index>(atom_q_.size());
    Eigen::MatrixXd Q(k, static_cast<Eigen::Index>(width_));
    for (Eigen::Index r = 0; r < k; ++r)
      for (std::size_t i = 0; i < width_; ++i) Q(r, static_cast<Eigen::Index>(i)) = atom_q_[r][i];
    std::vector<char> live(width_, 0);
    for (std::size_t i = 0; i < width_; ++i) live[i] = Q.col(static_cast<Eigen::Index>(i)).maxCoeff() > 0.0;
    if (k == 1) return w;
    std::vector<std::vector<Eigen::Index>> touch(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t)
      for (Eigen::Index r = 0; r < k; ++r)
        for (std::size_t col = offsets_[t]; col < offsets_[t + 1]; ++col)
          if (Q(r, static_cast<Eigen::Index>(col)) > 0.0) {
            touch[t].push_back(r);
            break;
          }

    // Newton steps live in {d : sum d = 0}. f is homogeneous, so its Hessian
    // vanishes along w and eliminating the constraint through a multiplier
    // would cancel two O(1/mu) solves; instead the heaviest weight absorbs
    // the others (basis e_i - e_p), which keeps the reduced system well posed.
    for (double mu = 1e-3; mu >= 1e-13; mu *= 0.01) {
      int newton = 0;
      for (; newton < 200; ++newton) {
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        evaluate(Q, live, touch, w, mu, &grad, &hess);
        Eigen::Index p = 0;
        w.maxCoeff(&p);
        Eigen::MatrixXd reduced(k - 1, k - 1);
        Eigen::VectorXd rhs(k - 1);
        for (Eigen::Index i = 0, ri = 0; i < k; ++i) {
          if (i == p) continue;
          rhs[ri] = grad[i] - grad[p];
          for (Eigen::Index j = 0, rj = 0; j < k; ++j) {
            if (j == p) continue;
            reduced(ri, rj++) = hess(i, j) - hess(i, p) - hess(p, j) + hess(p, p);
          }
          ++ri;
        }
        const Eigen::VectorXd y = reduced.ldlt().solve(rhs);
        Eigen::VectorXd d(k);
        for (Eigen::Index i = 0, ri = 0; i < k; ++i)
          if (i != p) d[i] = y[ri++];
        d[p] = -y.sum();
        const double decrement = grad.dot(d);
        if (!(decrement > 1e-20)) break;
        double t = 1.0;
        for (Eigen::Index r = 0; r < k; ++r)
          if (d[r] < 0.0) t = std::min(t, -0.99 * w[r] / d[r]);
        if (decrement < 1e-9) {
          // quadratic convergence region: function values no longer resolve
          // the progress, so take the damped Newton step as is
          w += t * d;
          continue;
        }
        const double phi0 = evaluate(Q, live, touch, w, mu, nullptr, nullptr);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
          const Eigen::VectorXd cand = w + t * d;
          if (evaluate(Q, live, touch, cand, mu, nullptr, nullptr) >= phi0 + 0.25 * t * decrement) {
            w = cand;
            moved = true;
            break;
          }
        }
        if (!moved) {
          break;
        }
      }
    }
    return w;
  }

 private:
  // Barrier objective f + mu sum log w; optionally its gradient and the
  // negated Hessian. Per term, with s_i = sqrt(b_i q_i), r = sum s_i,
  // e_i = Q_i / q_i and the s-weighted mean e_bar,
  //   -d2(c r^2) = c/2 r sum_i s_i (e_i - e_bar)(e_i - e_bar)^T,
  // a centered form that stays positive semidefinite in floating point even
  // when some q_i are tiny.
  double evaluate(const Eigen::MatrixXd& Q, const std::vector<char>& live,
                  const std::vector<std::vector<Eigen::Index>>& touch, const Eigen::VectorXd& w, double mu,
                  Eigen::VectorXd* grad, Eigen::MatrixXd* neg_hess) const {
    const Eigen::VectorXd q = Q.transpose() * w;
    const auto k = w.size();
    const Eigen::Map<const Eigen::VectorXd> lin(linear_.data(), k);
    double value = mu * w.array().log().sum() + lin.dot(w);
    if (grad) *grad = mu * w.cwiseInverse() + lin;
    if (neg_hess) {
      neg_hess->setZero(k, k);
      neg_hess->diagonal() = mu * w.array().square().inverse().matrix();
    }
    std::vector<std::size_t> cols;
    std::vector<double> sq;
    Eigen::MatrixXd e;
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      const auto& term = terms_[t];
      cols.clear();
      sq.clear();
      double r = 0.0;
      for (std::size_t i = 0; i < term.b.size(); ++i) {
        const std::size_t col = offsets_[t] + i;
        if (!live[col]) continue;
        const double s = std::sqrt(term.b[i] * std::max(q[static_cast<Eigen::Index>(col)], 0.0));
        r += s;
        cols.push_back(col);
        sq.push_back(s);
      }
      value += term.c * r * r;
      if (!grad) continue;
      // only atoms with mass in this term see it
      const auto& rows = touch[t];
      const auto m = static_cast<Eigen::Index>(rows.size());
      e.resize(m, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(cols[i]);
        for (Eigen::Index j = 0; j < m; ++j) e(j, static_cast<Eigen::Index>(i)) = Q(rows[j], col) / q[col];
      }
      // d(c r^2)/dw = c r sum_i s_i e_i
      const Eigen::Map<const Eigen::VectorXd> svec(sq.data(), static_cast<Eigen::Index>(sq.size()));
      const Eigen::VectorXd mean = e * svec / r;
      (*grad)(rows) += (term.c * r * r) * mean;
      if (!neg_hess) continue;
      for (std::size_t i = 0; i < cols.size(); ++i)
        e.col(static_cast<Eigen::Index>(i)) = std::sqrt(sq[i]) * (e.col(static_cast<Eigen::Index>(i)) - mean);
      (*neg_hess)(rows, rows) += (0.5 * term.c * r) * e * e.transpose();
    }
    return value;
  }

  const std::vector<FidelityTerm>& terms_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
  std::vector<std::vector<double>> atom_q_;
  std::vector<double> linear_;
};

// f_t is homogeneous, so at a point where term t carries no mass every g in
// D_t = {g >= 0 : sum_i c b_i / g_i <= 1} is a supergradient, and the choice
// matters: the gradient alone sees no ascent into an empty term even when a
// mixture of vertices has one. Kelley's method on those g, with the other
// terms linearized at x, returns the vertices that mixture needs together
// with the best direction found (its LMO value is a valid upper bound).
struct Refinement {
  std::vector<std::vector<double>> vertices;
  std::vector<double> direction;
  double bound = std::numeric_limits<double>::infinity();
};

Refinement refine_empty_terms(const Problem& prob, std::span<const double> x) {
  constexpr int kRounds = 50;
  Refinement out;
  std::vector<double> fixed(x.size(), 0.0);
  std::vector<FidelityTerm> empties;
  for (const auto& t : prob.terms) {
    std::vector<double> q(t.rows.size(), 0.0);
    double r = 0.0, top = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      for (const auto& [idx, coeff] : t.rows[i]) q[i] += coeff * x[idx];
      r += std::sqrt(t.b[i] * std::max(q[i], 0.0));
      top = std::max(top, q[i]);
    }
    if (top <= kEmptySlice) {
      empties.push_back(t);
      continue;
    }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double g = t.c * r * std::sqrt(t.b[i] / std::max(q[i], kGradFloor));
      for (const auto& [idx, coeff] : t.rows[i]) fixed[idx] += coeff * g;
    }
  }
  if (empties.empty()) return out;

  // supergradient of an empty term at the model point q; a flat one when the
  // model leaves it empty too
  auto add_term_direction = [](const FidelityTerm& t, const std::vector<double>& point, std::vector<double>& dir) {
    std::vector<double> q(t.rows.size(), 0.0);
    double r = 0.0, bsum = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      for (const auto& [idx, coeff] : t.rows[i]) q[i] += coeff * point[idx];
      r += std::sqrt(t.b[i] * std::max(q[i], 0.0));
      bsum += t.b[i];
    }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double g = r > 0.0 ? t.c * r * std::sqrt(t.b[i] / std::max(q[i], kGradFloor)) : t.c * bsum;
      for (const auto& [idx, coeff] : t.rows[i]) dir[idx] += coeff * g;
    }
  };

  CorrectiveMaster model(empties);
  std::vector<double> point(x.size(), 0.0);
  Eigen::VectorXd w;
  for (int round = 0; round < kRounds; ++round) {
    std::vector<double> dir = fixed;
    for (const auto& t : empties) add_term_direction(t, point, dir);
    auto lmo = prob.lmo(dir);
    if (lmo.value < out.bound) {
      out.bound = lmo.value;
      out.direction = dir;
    }
    if (!out.vertices.empty()) {
      double model_value = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) model_value += fixed[i] * point[i];
      for (const auto& t : empties) {
        double r = 0.0;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
          double q = 0.0;
          for (const auto& [idx, coeff] : t.rows[i]) q += coeff * point[idx];
          r += std::sqrt(t.b[i] * std::max(q, 0.0));
        }
        model_value += t.c * r * r;
      }
      if (lmo.value <= model_value + 1e-12) break;
    }
    if (std::find(out.vertices.begin(), out.vertices.end(), lmo.vertex) != out.vertices.end()) break;

    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lin += fixed[i] * lmo.vertex[i];
    model.add_atom(lmo.vertex, lin);
    out.vertices.push_back(std::move(lmo.vertex));
    const auto k = static_cast<Eigen::Index>(out.vertices.size());
    Eigen::VectorXd start(k);
    if (k == 1) {
      start[0] = 1.0;
    } else {
      start.head(k - 1) = 0.9 * w;
      start[k - 1] = 0.1;
    }
    w = model.solve(start);
    w /= w.sum();
    std::fill(point.begin(), point.end(), 0.0);
    for (Eigen::Index j = 0; j < k; ++j)
      for (std::size_t i = 0; i < point.size(); ++i) point[i] += w[j] * out.vertices[static_cast<std::size_t>(j)][i];
  }
  return out;
}

QuantumResult run_corrective(const Problem& prob, std::vector<double> x0, const SolveOptions& opts,
                             QuantumResult result) {
  CorrectiveMaster master(prob.terms);
  std::vector<std::vector<double>> atoms{x0};
  master.add_atom(x0);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  std::vector<double> x = std::move(x0);

  QuantumResult best_dual = result;
  best_dual.dual_value = prob.certify(x, best_dual);

  // A vertex the master keeps at zero weight gets pruned and may come back
  // from the LMO next round; stop once neither bound has moved for a while.
  constexpr int kStallLimit = 25;
  int stalled = 0;
  double best_f = -1.0;
  double last_dual = best_dual.dual_value;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double fx = prob.f(x);
    if (best_dual.dual_value - fx <= opts.gap_tol) break;
    if (fx > best_f + 1e-15 || best_dual.dual_value < last_dual - 1e-15) {
      stalled = 0;
      best_f = std::max(best_f, fx);
      last_dual = best_dual.dual_value;
    } else if (++stalled >= kStallLimit) {
      break;
    }
    std::vector<std::vector<double>> dirs{prob.fg(x).gradient};
    if (prob.extra_directions) {
      auto more = prob.extra_directions(x);
      dirs.insert(dirs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    std::vector<std::vector<double>> candidates;
    for (const auto& g : dirs) candidates.push_back(prob.lmo(g).vertex);
    if (prob.extra_atoms) {
      auto more = prob.extra_atoms(x);
      candidates.insert(candidates.end(), std::make_move_iterator(more.begin()),
                        std::make_move_iterator(more.end()));
    }
    // the refinement is the expensive part; run it when the cheap candidates
    // bring nothing new, and now and then to tighten the certificate
    const bool fresh = std::any_of(candidates.begin(), candidates.end(), [&](const std::vector<double>& v) {
      return std::find(atoms.begin(), atoms.end(), v) == atoms.end();
    });
    if (!fresh || it % 10 == 9) {
      auto refined = refine_empty_terms(prob, x);
      if (prob.certify_direction && !refined.direction.empty()) {
        QuantumResult cand = result;
        cand.dual_value = prob.certify_direction(refined.direction, cand);
        if (cand.dual_value < best_dual.dual_value) best_dual = cand;
      }
      for (auto& v : refined.vertices) candidates.push_back(std::move(v));
    }
    std::size_t added = 0;
    for (auto& v : candidates) {
      if (std::find(atoms.begin(), atoms.end(), v) != atoms.end()) continue;
      master.add_atom(v);
      atoms.push_back(std::move(v));
      ++added;
    }
    // no new vertex: the hull is already optimal to working precision
    if (added == 0) break;
    const auto kept_n = w.size();
    Eigen::VectorXd start(kept_n + static_cast<Eigen::Index>(added));
    start.head(kept_n) = 0.9 * w;
    start.tail(static_cast<Eigen::Index>(added)).setConstant(0.1 / static_cast<double>(added));
    w = master.solve(start);

    // prune atoms the hull optimum does not use
    std::vector<std::vector<double>> kept;
    std::vector<double> kept_w;
    for (Eigen::Index r = 0; r < w.size(); ++r) {
      if (w[r] > 1e-11) {
        kept.push_back(atoms[static_cast<std::size_t>(r)]);
        kept_w.push_back(w[r]);
      }
    }
    if (kept.size() != atoms.size()) {
      atoms = std::move(kept);
      master.clear();
      for (const auto& a : atoms) master.add_atom(a);
      w = Eigen::Map<Eigen::VectorXd>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
    }
    w /= w.sum();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t r = 0; r < atoms.size(); ++r)
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += w[static_cast<Eigen::Index>(r)] * atoms[r][i];

    QuantumResult cand = result;
    cand.dual_value = prob.certify(x, cand);
    if (cand.dual_value < best_dual.dual_value) best_dual = cand;
  }

  best_dual.primal = x;
  best_dual.value = prob.f(x);
  best_dual.gap = best_dual.dual_value - best_dual.value;
  best_dual.iterations = it;
  best_dual.converged = best_dual.gap <= opts.gap_tol;
  return best_dual;
}

}  // namespace

QuantumResult solve_quantum(const BccfProtocol& proto, Party party, Outcome outcome,
                            const SolveOptions& opts) {
  QuantumResult base;
  base.party = party;
  base.outcome = outcome;
  Problem prob;
  std::vector<double> x0;
  if (party == Party::Bob) {
    prob.terms = bob_terms(proto, outcome);
    prob.f = [&](std::span<const double> p) { return bob_objective(proto, outcome, p); };
    prob.fg = [&](std::span<const double> p) { return bob_objective_grad(proto, outcome, p); };
    prob.lmo = [&](std::span<const double> c) { return lmo_bob(proto, c); };
    prob.certify = [&](std::span<const double> p, QuantumResult& r) {
      r.bob_dual = bob_dual_from_primal(proto, outcome, p);
      return eval_dual_bob(proto, r.bob_dual);
    };
    x0 = bob_barycenter(proto);
  } else {
    prob.terms = alice_terms(proto, outcome);
    prob.f = [&](std::span<const double> s) { return alice_objective(proto, outcome, s); };
    prob.fg = [&](std::span<const double> s) { return alice_objective_grad(proto, outcome, s); };
    prob.lmo = [&](std::span<const double> c) { return lmo_alice(proto, c); };
    prob.extra_directions = [&](std::span<const double> s) {
      return std::vector<std::vector<double>>{
          alice_supergradient(proto, outcome, s, kGradFloor, false),
          alice_supergradient(proto, outcome, s, kEmptySlice, false),
          alice_flat_direction(proto, outcome, s, alice_objective_grad(proto, outcome, s).gradient)};
    };
    prob.extra_atoms = [&](std::span<const double> s) { return alice_flip_points(proto, outcome, s); };
    prob.certify_direction = [&](std::span<const double> dir, QuantumResult& r) {
      // every slice block of dir lies in its D set, so the max over a is feasible
      const std::size_t n = proto.alice_size() * proto.bob_size();
      r.alice_dual.outcome = outcome;
      r.alice_dual.z.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) r.alice_dual.z[i] = std::max(dir[i], dir[n + i]);
      return eval_dual_alice(proto, r.alice_dual);
    };
    prob.certify = [&](std::span<const double> s, QuantumResult& r) {
      r.alice_dual = alice_dual_from_primal(proto, outcome, s);
      return eval_dual_alice(proto, r.alice_dual);
    };
    x0 = alice_barycenter(proto);
  }
  const bool barrier = party == Party::Alice &&
                       (opts.variant == FwVariant::Barrier || opts.variant == FwVariant::Auto);
  if (barrier) {
    QuantumResult best = base;
    best.gap = std::numeric_limits<double>::infinity();
    auto trace = detail::alice_barrier_path(proto, outcome, opts.max_iter, [&](std::span<const double> s) {
      QuantumResult cand = base;
      cand.value = prob.f(s);
      cand.dual_value = prob.certify(s, cand);
      cand.gap = cand.dual_value - cand.value;
      if (cand.gap < best.gap) {
        cand.primal.assign(s.begin(), s.end());
        best = std::move(cand);
      }
      // keep following the path a little past the tolerance
      return best.gap <= 1e-3 * opts.gap_tol;
    });
    best.iterations = trace.newton_steps;
    best.converged = best.gap <= opts.gap_tol;
    if (best.converged) return best;
    // path following stalled short of the tolerance; polish from its last point
    auto polished = run_corrective(prob, std::move(trace.s), opts, base);
    polished.iterations += best.iterations;
    return polished.gap <= best.gap ? polished : best;
  }
  if (opts.variant != FwVariant::Vanilla && opts.variant != FwVariant::Away &&
      opts.variant != FwVariant::Pairwise)
    return run_corrective(prob, std::move(x0), opts, base);
  return run_frank_wolfe(prob, std::move(x0), opts, base);
}

}  // namespace bccf
