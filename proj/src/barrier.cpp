#include "barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bccf/polytopes.hpp"

namespace bccf::detail {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

struct Slice {
  double c = 0.0;
  std::vector<std::size_t> idx;  // into the full variable vector
  std::vector<double> b;
};

// Variables: levels[0], ..., levels[n-1], then s. All carry a log barrier.
struct Layout {
  std::vector<std::size_t> off;  // off[j] for level j, off[n] for s
  std::size_t total = 0;
};

Layout make_layout(const BccfProtocol& proto) {
  const std::size_t n = proto.rounds();
  Layout L;
  for (std::size_t j = 0; j < n; ++j) {
    L.off.push_back(L.total);
    L.total += proto.bob_decision_space(j + 1).size();
  }
  L.off.push_back(L.total);
  L.total += 2 * proto.alice_size() * proto.bob_size();
  return L;
}

void build_constraints(const BccfProtocol& proto, const Layout& L, SpMat& A, Eigen::VectorXd& rhs) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<Trip> t;
  std::vector<double> b;
  std::size_t row = 0;

  for (std::size_t i = 0; i < proto.bob_decision_space(1).size(); ++i) t.emplace_back(row, L.off[0] + i, 1.0);
  b.push_back(1.0);
  ++row;

  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t ax = proto.alice_dims()[j], by_prev = proto.bob_dims()[j - 1];
    const std::size_t hs = proto.history_space(j).size();
    for (std::size_t h = 0; h < hs; ++h, ++row) {
      for (std::size_t x = 0; x < ax; ++x) t.emplace_back(row, L.off[j] + h * ax + x, 1.0);
      t.emplace_back(row, L.off[j - 1] + h / by_prev, -1.0);
      b.push_back(0.0);
    }
  }

  const std::size_t by_last = proto.bob_dims()[n - 1];
  for (std::size_t h = 0; h < na * nb; ++h, ++row) {
    const auto [x, y] = proto.deinterleave(h);
    t.emplace_back(row, L.off[n] + x * nb + y, 1.0);
    t.emplace_back(row, L.off[n] + (na + x) * nb + y, 1.0);
    t.emplace_back(row, L.off[n - 1] + h / by_last, -1.0);
    b.push_back(0.0);
  }

  A.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(L.total));
  A.setFromTriplets(t.begin(), t.end());
  rhs = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
}

std::vector<Slice> make_slices(const BccfProtocol& proto, Outcome outcome, const Layout& L) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<Slice> out;
  for (int a = 0; a < 2; ++a) {
    const auto& alpha = proto.alpha(a);
    const auto& beta = proto.beta(target_bit(a, outcome));
    for (std::size_t y = 0; y < nb; ++y) {
      if (beta[y] == 0.0) continue;
      Slice sl;
      sl.c = 0.5 * beta[y];
      for (std::size_t x = 0; x < na; ++x) {
        if (alpha[x] == 0.0) continue;
        sl.idx.push_back(L.off[n] + (a * na + x) * nb + y);
        sl.b.push_back(alpha[x]);
      }
      if (!sl.idx.empty()) out.push_back(std::move(sl));
    }
  }
  return out;
}

double barrier_value(const std::vector<Slice>& slices, const Eigen::VectorXd& v, double mu) {
  double phi = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    phi += mu * std::log(v[i]);
  }
  for (const auto& sl : slices) {
    double r = 0.0;
    for (std::size_t k = 0; k < sl.idx.size(); ++k) r += std::sqrt(sl.b[k] * v[sl.idx[k]]);
    phi += sl.c * r * r;
  }
  return phi;
}

// Gradient of f + mu sum log v and the inverse of the negated Hessian. Each
// slice block is diag(d) - 1/2 c u u^T with u_i = sqrt(b_i / q_i); it is
// inverted by Sherman-Morrison, with the denominator summed term by term
// since 1 - sum rho_i / (1 + eps_i) cancels badly for small mu.
void grad_and_inverse(const std::vector<Slice>& slices, const Eigen::VectorXd& v, double mu,
                      Eigen::VectorXd& g, SpMat& Hinv) {
  const Eigen::Index N = v.size();
  g = mu * v.cwiseInverse();
  std::vector<char> in_slice(static_cast<std::size_t>(N), 0);
  std::vector<Trip> t;
  for (const auto& sl : slices) {
    const std::size_t k = sl.idx.size();
    std::vector<double> sq(k), dinv(k), w(k);
    double r = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sq[i] = std::sqrt(sl.b[i] * v[sl.idx[i]]);
      r += sq[i];
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double q = v[sl.idx[i]];
      const double u = std::sqrt(sl.b[i] / q);
      g[sl.idx[i]] += sl.c * r * u;
      const double curv = 0.5 * sl.c * r * std::sqrt(sl.b[i]) / (q * std::sqrt(q));
      const double eps = 2.0 * mu / (sl.c * r * sq[i]);
      const double rho = sq[i] / r;
      delta += rho * eps / (1.0 + eps);
      dinv[i] = 1.0 / (curv + mu / (q * q));
      w[i] = dinv[i] * std::sqrt(0.5 * sl.c) * u;
      in_slice[sl.idx[i]] = 1;
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        double val = w[i] * w[j] / delta;
        if (i == j) val += dinv[i];
        t.emplace_back(sl.idx[i], sl.idx[j], val);
      }
    }
  }
  for (Eigen::Index i = 0; i < N; ++i)
    if (!in_slice[static_cast<std::size_t>(i)]) t.emplace_back(i, i, v[i] * v[i] / mu);
  Hinv.resize(N, N);
  Hinv.setFromTriplets(t.begin(), t.end());
}

}  // namespace

std::vector<double> alice_repair(const BccfProtocol& proto, const std::vector<std::vector<double>>& levels,
                                 std::span<const double> s) {
  const std::size_t n = proto.rounds();
  const std::size_t na = proto.alice_size(), nb = proto.bob_size();
  std::vector<std::vector<double>> fixed(n);

  auto split = [](double parent, const double* kids, std::size_t m, double* out, std::size_t stride) {
    double sum = 0.0;
    for (std::size_t x = 0; x < m; ++x) sum += std::max(kids[x * stride], 0.0);
    for (std::size_t x = 0; x < m; ++x)
      out[x * stride] = sum > 0.0 ? parent * std::max(kids[x * stride], 0.0) / sum : parent / static_cast<double>(m);
  };

  fixed[0].resize(levels[0].size());
  split(1.0, levels[0].data(), levels[0].size(), fixed[0].data(), 1);
  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t ax = proto.alice_dims()[j], by_prev = proto.bob_dims()[j - 1];
    fixed[j].resize(levels[j].size());
    const std::size_t hs = proto.history_space(j).size();
    for (std::size_t h = 0; h < hs; ++h)
      split(fixed[j - 1][h / by_prev], levels[j].data() + h * ax, ax, fixed[j].data() + h * ax, 1);
  }

  std::vector<double> out(2 * na * nb, 0.0);
  const std::size_t by_last = proto.bob_dims()[n - 1];
  const std::size_t stride = na * nb;
  for (std::size_t h = 0; h < na * nb; ++h) {
    const auto [x, y] = proto.deinterleave(h);
    const std::size_t i = x * nb + y;
    split(fixed[n - 1][h / by_last], s.data() + i, 2, out.data() + i, stride);
  }
  return out;
}

BarrierTrace alice_barrier_path(const BccfProtocol& proto, Outcome outcome, int max_steps,
                                const std::function<bool(std::span<const double>)>& accept) {
  const std::size_t n = proto.rounds();
  const Layout L = make_layout(proto);
  SpMat A;
  Eigen::VectorXd rhs;
  build_constraints(proto, L, A, rhs);
  const auto slices = make_slices(proto, outcome, L);
  const SpMat At = A.transpose();

  Eigen::VectorXd v(static_cast<Eigen::Index>(L.total));
  {
    const auto chain = alice_chain_from_terminal(proto, alice_barycenter(proto));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < chain.levels[j].size(); ++i) v[L.off[j] + i] = chain.levels[j][i];
    for (std::size_t i = 0; i < chain.s.size(); ++i) v[L.off[n] + i] = chain.s[i];
  }

  auto feasible_point = [&] {
    std::vector<std::vector<double>> levels(n);
    for (std::size_t j = 0; j < n; ++j)
      levels[j].assign(v.data() + L.off[j], v.data() + L.off[j + 1]);
    return alice_repair(proto, levels, std::span<const double>(v.data() + L.off[n], L.total - L.off[n]));
  };

  BarrierTrace trace;
  Eigen::SimplicialLDLT<SpMat> chol;
  bool analyzed = false;
  Eigen::VectorXd g;
  SpMat Hinv;

  for (double mu = 1e-2; mu > 1e-16 && trace.newton_steps < max_steps; mu *= 0.1) {
    for (int step = 0; step < 80 && trace.newton_steps < max_steps; ++step) {
      ++trace.newton_steps;
      grad_and_inverse(slices, v, mu, g, Hinv);
      const SpMat S = A * Hinv * At;
      if (!analyzed) {
        chol.analyzePattern(S);
        analyzed = true;
      }
      chol.factorize(S);
      if (chol.info() != Eigen::Success) break;
      const Eigen::VectorXd res = rhs - A * v;
      const Eigen::VectorXd Hg = Hinv * g;
      const Eigen::VectorXd lam = chol.solve(A * Hg - res);
      const Eigen::VectorXd dir = Hinv * (g - At * lam);
      const double slope = g.dot(dir);
      const double dec = slope - lam.dot(res);
      if (!(dec > 1e-20) && res.lpNorm<Eigen::Infinity>() < 1e-14) break;

      double tmax = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dir[i] < 0.0) tmax = std::min(tmax, -0.99 * v[i] / dir[i]);
      double t = tmax;
      if (dec >= 1e-9) {
        const double phi0 = barrier_value(slices, v, mu);
        while (t > 1e-12 && !(barrier_value(slices, v + t * dir, mu) >= phi0 + 0.25 * t * slope)) t *= 0.5;
        if (t <= 1e-12) break;
      }
      v += t * dir;
      if (dec < 1e-11 && t == 1.0) break;
    }
    trace.s = feasible_point();
    if (accept(trace.s)) {
      trace.stopped = true;
      break;
    }
  }
  if (trace.s.empty()) trace.s = feasible_point();
  return trace;
}

}  // namespace bccf::detail
