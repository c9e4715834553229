#pragma once

// Test-side oracles. Nothing here calls into the solvers: the classical
// brute force walks strategy trees directly from the protocol description,
// and the grid search evaluates the fidelity objectives from scratch.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "bccf/core.hpp"

namespace oracle {

using bccf::BccfProtocol;
using bccf::ProbDist;

inline std::size_t prod(const std::vector<std::size_t>& d, std::size_t k) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < k; ++i) p *= d[i];
  return p;
}

// ---- random protocols --------------------------------------------------------

inline std::vector<double> random_dist(std::mt19937_64& rng, std::size_t n, double zero_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& e : v) {
    e = u(rng) < zero_prob ? 0.0 : u(rng) + 0.05;
    s += e;
  }
  if (s == 0.0) {
    v[rng() % n] = 1.0;
    s = 1.0;
  }
  for (auto& e : v) e /= s;
  return v;
}

inline BccfProtocol random_protocol(std::mt19937_64& rng, std::size_t n, std::size_t max_dim, double zero_prob = 0.25) {
  std::vector<std::size_t> ad(n), bd(n);
  for (std::size_t j = 0; j < n; ++j) {
    ad[j] = 1 + rng() % max_dim;
    bd[j] = 1 + rng() % max_dim;
  }
  const std::size_t na = prod(ad, n), nb = prod(bd, n);
  return BccfProtocol(ad, bd, ProbDist(random_dist(rng, na, zero_prob)), ProbDist(random_dist(rng, na, zero_prob)),
                      ProbDist(random_dist(rng, nb, zero_prob)), ProbDist(random_dist(rng, nb, zero_prob)));
}

inline BccfProtocol random_protocol_dims(std::mt19937_64& rng, std::vector<std::size_t> ad, std::vector<std::size_t> bd,
                                         double zero_prob = 0.0) {
  const std::size_t na = prod(ad, ad.size()), nb = prod(bd, bd.size());
  return BccfProtocol(ad, bd, ProbDist(random_dist(rng, na, zero_prob)), ProbDist(random_dist(rng, na, zero_prob)),
                      ProbDist(random_dist(rng, nb, zero_prob)), ProbDist(random_dist(rng, nb, zero_prob)));
}

// Probabilities that are multiples of 1/2^bits, so doubles hold them exactly.
inline std::vector<double> dyadic_dist(std::mt19937_64& rng, std::size_t n, int bits) {
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < n; ++i)
    if (rng() % 4 != 0) allowed.push_back(i);
  if (allowed.empty()) allowed.push_back(rng() % n);
  std::vector<std::int64_t> k(n, 0);
  for (std::int64_t unit = 0; unit < (std::int64_t{1} << bits); ++unit) ++k[allowed[rng() % allowed.size()]];
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::ldexp(static_cast<double>(k[i]), -bits);
  return v;
}

// ---- classical brute force ---------------------------------------------------

// Counts of deterministic strategies, read straight from the protocol tree.
// Bob picks y_j for every x1..xj; Alice picks x_j for every y1..y_{j-1} and
// her bit for every complete y.
inline double bob_strategy_count(const BccfProtocol& p) {
  double c = 1.0;
  for (std::size_t j = 0; j < p.rounds(); ++j)
    c *= std::pow(static_cast<double>(p.bob_dims()[j]), static_cast<double>(prod(p.alice_dims(), j + 1)));
  return c;
}

inline double alice_strategy_count(const BccfProtocol& p) {
  double c = std::pow(2.0, static_cast<double>(p.bob_size()));
  for (std::size_t j = 0; j < p.rounds(); ++j)
    c *= std::pow(static_cast<double>(p.alice_dims()[j]), static_cast<double>(prod(p.bob_dims(), j)));
  return c;
}

// Odometer over mixed radices; false once it wraps around.
inline bool advance(std::vector<std::uint32_t>& digits, const std::vector<std::uint32_t>& radix) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (++digits[i] < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

// Row-major digits of a flat index over dims[0..k).
inline std::vector<std::size_t> digits_of(std::size_t flat, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    d[i] = flat % dims[i];
    flat /= dims[i];
  }
  return d;
}

// Both outcomes at once. `alpha` and `beta` are the weights to sum (doubles, or
// integers scaled by a common power of two); `supp_*` mark the supports. The
// result is twice the winning probability, to keep integer weights integral.
template <class T>
std::array<T, 2> brute_force_bob(const BccfProtocol& p, const std::array<std::vector<T>, 2>& alpha,
                                 const std::array<std::vector<char>, 2>& supp_beta) {
  const std::size_t n = p.rounds(), na = p.alice_size();
  const auto& ad = p.alice_dims();
  const auto& bd = p.bob_dims();
  // slot (j, x-prefix) -> choice of y_j
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) offset[j + 1] = offset[j] + prod(ad, j + 1);
  std::vector<std::uint32_t> radix(offset[n]), digit(offset[n], 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = offset[j]; i < offset[j + 1]; ++i) radix[i] = static_cast<std::uint32_t>(bd[j]);

  std::vector<std::vector<std::size_t>> xd(na);
  for (std::size_t x = 0; x < na; ++x) xd[x] = digits_of(x, ad);

  std::array<T, 2> best{T(-1), T(-1)};
  do {
    std::array<T, 2> val{T(0), T(0)};
    for (std::size_t x = 0; x < na; ++x) {
      std::size_t prefix = 0, y = 0;
      for (std::size_t j = 0; j < n; ++j) {
        prefix = prefix * ad[j] + xd[x][j];
        y = y * bd[j] + digit[offset[j] + prefix];
      }
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
          if (supp_beta[c == 0 ? a : 1 - a][y]) val[c] += alpha[a][x];
    }
    for (int c = 0; c < 2; ++c) best[c] = std::max(best[c], val[c]);
  } while (advance(digit, radix));
  return best;
}

template <class T>
std::array<T, 2> brute_force_alice(const BccfProtocol& p, const std::array<std::vector<char>, 2>& supp_alpha,
                                   const std::array<std::vector<T>, 2>& beta) {
  const std::size_t n = p.rounds(), nb = p.bob_size();
  const auto& ad = p.alice_dims();
  const auto& bd = p.bob_dims();
  // slots (j, y-prefix of length j) -> x_j, then one bit per complete y
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) offset[j + 1] = offset[j] + prod(bd, j);
  std::vector<std::uint32_t> radix(offset[n] + nb), digit(offset[n] + nb, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = offset[j]; i < offset[j + 1]; ++i) radix[i] = static_cast<std::uint32_t>(ad[j]);
  for (std::size_t i = offset[n]; i < radix.size(); ++i) radix[i] = 2;

  std::vector<std::vector<std::size_t>> yd(nb);
  for (std::size_t y = 0; y < nb; ++y) yd[y] = digits_of(y, bd);

  std::array<T, 2> best{T(-1), T(-1)};
  do {
    std::array<T, 2> val{T(0), T(0)};
    for (std::size_t y = 0; y < nb; ++y) {
      std::size_t prefix = 0, x = 0;
      for (std::size_t j = 0; j < n; ++j) {
        x = x * ad[j] + digit[offset[j] + prefix];
        prefix = prefix * bd[j] + yd[y][j];
      }
      const int a = static_cast<int>(digit[offset[n] + y]);
      if (!supp_alpha[a][x]) continue;
      for (int c = 0; c < 2; ++c) val[c] += beta[c == 0 ? a : 1 - a][y];
    }
    for (int c = 0; c < 2; ++c) best[c] = std::max(best[c], val[c]);
  } while (advance(digit, radix));
  return best;
}

inline std::vector<char> support_of(const ProbDist& d) {
  std::vector<char> s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s[i] = d[i] > 1e-12;
  return s;
}

inline std::vector<double> values_of(const ProbDist& d) { return {d.values().begin(), d.values().end()}; }

// [party][outcome], party 0 = Alice, as probabilities.
inline std::array<std::array<double, 2>, 2> classical_brute_force(const BccfProtocol& p) {
  const auto b = brute_force_bob<double>(p, {values_of(p.alpha(0)), values_of(p.alpha(1))},
                                         {support_of(p.beta(0)), support_of(p.beta(1))});
  const auto a = brute_force_alice<double>(p, {support_of(p.alpha(0)), support_of(p.alpha(1))},
                                           {values_of(p.beta(0)), values_of(p.beta(1))});
  return {{{a[0] / 2, a[1] / 2}, {b[0] / 2, b[1] / 2}}};
}

// Same with every probability scaled by 2^bits to an integer: returns
// 2^(bits+1) times the winning probabilities, exactly.
inline std::array<std::array<std::int64_t, 2>, 2> classical_brute_force_scaled(const BccfProtocol& p, int bits) {
  auto scaled = [&](const ProbDist& d) {
    std::vector<std::int64_t> v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) v[i] = static_cast<std::int64_t>(std::ldexp(d[i], bits));
    return v;
  };
  const auto b = brute_force_bob<std::int64_t>(p, {scaled(p.alpha(0)), scaled(p.alpha(1))},
                                               {support_of(p.beta(0)), support_of(p.beta(1))});
  const auto a = brute_force_alice<std::int64_t>(p, {support_of(p.alpha(0)), support_of(p.alpha(1))},
                                                 {scaled(p.beta(0)), scaled(p.beta(1))});
  return {{{a[0], a[1]}, {b[0], b[1]}}};
}

// ---- quantum grid search, n = 1, |A| = |B| = 2 -------------------------------

inline double fid(double p0, double p1, double q0, double q1) {
  const double s = std::sqrt(p0 * q0) + std::sqrt(p1 * q1);
  return s * s;
}

// Coarse-to-fine maximization over [0,1]^2: a full grid, then repeated
// zooms around the incumbent. The objectives below are concave in these
// coordinates, so the zoom cannot lose the maximum.
inline double grid_max_2d(const std::function<double(double, double)>& f, int m = 41, int rounds = 10) {
  double lo0 = 0, hi0 = 1, lo1 = 0, hi1 = 1, best = -1, b0 = 0, b1 = 0;
  for (int r = 0; r < rounds; ++r) {
    const double h0 = (hi0 - lo0) / (m - 1), h1 = (hi1 - lo1) / (m - 1);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        const double t0 = lo0 + i * h0, t1 = lo1 + k * h1;
        const double v = f(t0, t1);
        if (v > best) best = v, b0 = t0, b1 = t1;
      }
    lo0 = std::max(0.0, b0 - 2 * h0), hi0 = std::min(1.0, b0 + 2 * h0);
    lo1 = std::max(0.0, b1 - 2 * h1), hi1 = std::min(1.0, b1 + 2 * h1);
  }
  return best;
}

inline double grid_max_1d(const std::function<double(double)>& f, int m = 41, int rounds = 8) {
  double lo = 0, hi = 1, best = -1, bt = 0;
  for (int r = 0; r < rounds; ++r) {
    const double h = (hi - lo) / (m - 1);
    for (int i = 0; i < m; ++i) {
      const double v = f(lo + i * h);
      if (v > best) best = v, bt = lo + i * h;
    }
    lo = std::max(0.0, bt - 2 * h), hi = std::min(1.0, bt + 2 * h);
  }
  return best;
}

// Bob answers y = 0 to x with probability t_x. Objective
// 1/2 sum_a F(sum_x alpha_{a,x} p(x, .), beta_{t(a)}).
inline double quantum_grid_bob(const BccfProtocol& p, int c) {
  const auto& a0 = p.alpha(0);
  const auto& a1 = p.alpha(1);
  const auto& bt0 = p.beta(c == 0 ? 0 : 1);  // compared against when a = 0
  const auto& bt1 = p.beta(c == 0 ? 1 : 0);
  return grid_max_2d([&](double t0, double t1) {
    const double q00 = a0[0] * t0 + a0[1] * t1, q01 = a0[0] * (1 - t0) + a0[1] * (1 - t1);
    const double q10 = a1[0] * t0 + a1[1] * t1, q11 = a1[0] * (1 - t0) + a1[1] * (1 - t1);
    return 0.5 * (fid(q00, q01, bt0[0], bt0[1]) + fid(q10, q11, bt1[0], bt1[1]));
  });
}

// Alice sends x = 0 with probability u; after (x, y) she keeps a = 0 with
// probability r_{x,y}. Objective 1/2 sum_{a,y} beta_{t(a),y} F(s(a, ., y), alpha_a)
// with s(0,x,y) = r_{x,y} L_x and s(1,x,y) = (1 - r_{x,y}) L_x. For fixed u the
// two y's separate.
inline double quantum_grid_alice(const BccfProtocol& p, int c) {
  const auto& a0 = p.alpha(0);
  const auto& a1 = p.alpha(1);
  const auto& bt0 = p.beta(c == 0 ? 0 : 1);
  const auto& bt1 = p.beta(c == 0 ? 1 : 0);
  return grid_max_1d(
      [&](double u) {
        const double l0 = u, l1 = 1 - u;
        double total = 0;
        for (int y = 0; y < 2; ++y)
          total += grid_max_2d(
              [&](double r0, double r1) {
                return 0.5 * (bt0[y] * fid(r0 * l0, r1 * l1, a0[0], a0[1]) +
                              bt1[y] * fid((1 - r0) * l0, (1 - r1) * l1, a1[0], a1[1]));
              },
              21, 9);
        return total;
      },
      41, 6);
}

// ---- random interior points --------------------------------------------------

// Bob plays a random behavioural strategy with full support: the result is
// p_n in xy layout.
inline std::vector<double> random_bob_interior(std::mt19937_64& rng, const BccfProtocol& p) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const std::size_t n = p.rounds(), na = p.alice_size(), nb = p.bob_size();
  const auto& ad = p.alice_dims();
  const auto& bd = p.bob_dims();
  // conditional tables per round, keyed by (x-prefix, y-prefix)
  std::vector<std::vector<double>> cond(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t keys = prod(ad, j + 1) * prod(bd, j);
    cond[j].resize(keys * bd[j]);
    for (std::size_t k = 0; k < keys; ++k) {
      double s = 0;
      for (std::size_t y = 0; y < bd[j]; ++y) s += cond[j][k * bd[j] + y] = u(rng);
      for (std::size_t y = 0; y < bd[j]; ++y) cond[j][k * bd[j] + y] /= s;
    }
  }
  std::vector<double> out(na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      const auto xd = digits_of(x, ad), yd = digits_of(y, bd);
      double v = 1;
      std::size_t xp = 0, yp = 0;
      for (std::size_t j = 0; j < n; ++j) {
        xp = xp * ad[j] + xd[j];
        v *= cond[j][(xp * prod(bd, j) + yp) * bd[j] + yd[j]];
        yp = yp * bd[j] + yd[j];
      }
      out[x * nb + y] = v;
    }
  return out;
}

// Alice's counterpart: s in axy layout.
inline std::vector<double> random_alice_interior(std::mt19937_64& rng, const BccfProtocol& p) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const std::size_t n = p.rounds(), na = p.alice_size(), nb = p.bob_size();
  const auto& ad = p.alice_dims();
  const auto& bd = p.bob_dims();
  std::vector<std::vector<double>> cond(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t keys = prod(ad, j) * prod(bd, j);
    cond[j].resize(keys * ad[j]);
    for (std::size_t k = 0; k < keys; ++k) {
      double s = 0;
      for (std::size_t x = 0; x < ad[j]; ++x) s += cond[j][k * ad[j] + x] = u(rng);
      for (std::size_t x = 0; x < ad[j]; ++x) cond[j][k * ad[j] + x] /= s;
    }
  }
  std::vector<double> out(2 * na * nb);
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      const auto xd = digits_of(x, ad), yd = digits_of(y, bd);
      double v = 1;
      std::size_t xp = 0, yp = 0;
      for (std::size_t j = 0; j < n; ++j) {
        v *= cond[j][(xp * prod(bd, j) + yp) * ad[j] + xd[j]];
        xp = xp * ad[j] + xd[j];
        yp = yp * bd[j] + yd[j];
      }
      const double r = u(rng);
      out[(0 * na + x) * nb + y] = v * r;
      out[(1 * na + x) * nb + y] = v * (1 - r);
    }
  return out;
}

}  // namespace oracle
