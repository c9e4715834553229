#include "bccf/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bccf {

const char* to_string(Party party) { return party == Party::Alice ? "alice" : "bob"; }

int to_int(Outcome outcome) { return outcome == Outcome::Zero ? 0 : 1; }

Outcome outcome_from_int(int c) {
  if (c != 0 && c != 1) throw DomainError("outcome must be 0 or 1, got " + std::to_string(c));
  return c == 0 ? Outcome::Zero : Outcome::One;
}

// ---------------------------------------------------------------------------
// IndexSpace

IndexSpace::IndexSpace(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  for (std::size_t d : dims_) {
    if (d == 0) throw DimensionError("index space dimensions must be >= 1");
    size_ *= d;
  }
}

std::size_t IndexSpace::encode(std::span<const std::size_t> digits) const {
  if (digits.size() != dims_.size()) {
    throw DimensionError("expected " + std::to_string(dims_.size()) + " digits, got " +
                         std::to_string(digits.size()));
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (digits[k] >= dims_[k]) {
      throw IndexError("digit " + std::to_string(k) + " = " + std::to_string(digits[k]) +
                       " out of range " + std::to_string(dims_[k]));
    }
    flat = flat * dims_[k] + digits[k];
  }
  return flat;
}

void IndexSpace::decode_into(std::size_t flat, std::span<std::size_t> digits) const {
  for (std::size_t k = dims_.size(); k-- > 0;) {
    digits[k] = flat % dims_[k];
    flat /= dims_[k];
  }
}

std::vector<std::size_t> IndexSpace::decode(std::size_t flat) const {
  if (flat >= size_) throw IndexError("flat index out of range");
  std::vector<std::size_t> digits(dims_.size());
  decode_into(flat, digits);
  return digits;
}

std::size_t IndexSpace::suffix_size(std::size_t k) const {
  std::size_t s = 1;
  for (std::size_t i = k; i < dims_.size(); ++i) s *= dims_[i];
  return s;
}

IndexSpace IndexSpace::prefix(std::size_t k) const {
  return IndexSpace(std::vector<std::size_t>(dims_.begin(), dims_.begin() + std::min(k, dims_.size())));
}

// ---------------------------------------------------------------------------
// ProbDist

ProbDist::ProbDist(std::vector<double> values, double eps) : values_(std::move(values)) {
  if (values_.empty()) throw DimensionError("probability vector must be nonempty");
  double total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream os;
      os << "probability entry " << i << " = " << v << " is negative or not finite";
      throw DomainError(os.str());
    }
    total += v;
  }
  if (std::abs(total - 1.0) > eps) {
    std::ostringstream os;
    os.precision(17);
    os << "normalization: entries sum to " << total;
    throw NormalizationError(os.str());
  }
}

ProbDist ProbDist::point_mass(std::size_t size, std::size_t at) {
  std::vector<double> v(size, 0.0);
  v.at(at) = 1.0;
  return ProbDist(std::move(v));
}

ProbDist ProbDist::uniform(std::size_t size) {
  return ProbDist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

std::vector<std::size_t> ProbDist::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (in_support(i)) s.push_back(i);
  return s;
}

// ---------------------------------------------------------------------------
// BccfProtocol

BccfProtocol::BccfProtocol(std::vector<std::size_t> alice_dims, std::vector<std::size_t> bob_dims,
                           ProbDist alpha0, ProbDist alpha1, ProbDist beta0, ProbDist beta1)
    : alice_dims_(std::move(alice_dims)),
      bob_dims_(std::move(bob_dims)),
      alpha0_(std::move(alpha0)),
      alpha1_(std::move(alpha1)),
      beta0_(std::move(beta0)),
      beta1_(std::move(beta1)) {
  if (alice_dims_.empty()) throw DimensionError("dimension: protocol needs at least one round");
  if (alice_dims_.size() != bob_dims_.size()) {
    throw DimensionError("dimension: alice_dims and bob_dims have different lengths");
  }
  alice_space_ = IndexSpace(alice_dims_);
  bob_space_ = IndexSpace(bob_dims_);
  auto check = [](const ProbDist& d, std::size_t expected, const char* name) {
    if (d.size() != expected) {
      throw DimensionError(std::string("dimension: ") + name + " has length " +
                           std::to_string(d.size()) + ", expected " + std::to_string(expected));
    }
  };
  check(alpha0_, alice_space_.size(), "alpha0");
  check(alpha1_, alice_space_.size(), "alpha1");
  check(beta0_, bob_space_.size(), "beta0");
  check(beta1_, bob_space_.size(), "beta1");
}

BccfProtocol BccfProtocol::with_swapped_betas() const {
  return BccfProtocol(alice_dims_, bob_dims_, alpha0_, alpha1_, beta1_, beta0_);
}

IndexSpace BccfProtocol::history_space(std::size_t rounds) const {
  std::vector<std::size_t> dims;
  for (std::size_t j = 0; j < rounds; ++j) {
    dims.push_back(alice_dims_[j]);
    dims.push_back(bob_dims_[j]);
  }
  return IndexSpace(std::move(dims));
}

IndexSpace BccfProtocol::bob_decision_space(std::size_t j) const {
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i + 1 < j; ++i) {
    dims.push_back(alice_dims_[i]);
    dims.push_back(bob_dims_[i]);
  }
  dims.push_back(alice_dims_[j - 1]);
  return IndexSpace(std::move(dims));
}

IndexSpace BccfProtocol::alice_decision_space(std::size_t j) const { return history_space(j - 1); }

std::size_t BccfProtocol::interleave(std::size_t x, std::size_t y) const {
  const std::size_t n = rounds();
  std::vector<std::size_t> xd(n), yd(n);
  alice_space_.decode_into(x, xd);
  bob_space_.decode_into(y, yd);
  std::size_t flat = 0;
  for (std::size_t j = 0; j < n; ++j) {
    flat = flat * alice_dims_[j] + xd[j];
    flat = flat * bob_dims_[j] + yd[j];
  }
  return flat;
}

std::pair<std::size_t, std::size_t> BccfProtocol::deinterleave(std::size_t history) const {
  const std::size_t n = rounds();
  std::vector<std::size_t> xd(n), yd(n);
  for (std::size_t j = n; j-- > 0;) {
    yd[j] = history % bob_dims_[j];
    history /= bob_dims_[j];
    xd[j] = history % alice_dims_[j];
    history /= alice_dims_[j];
  }
  return {alice_space_.encode(xd), bob_space_.encode(yd)};
}

// ---------------------------------------------------------------------------
// Distances

namespace {

void check_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionError("vector lengths differ: " + std::to_string(p.size()) + " vs " +
                         std::to_string(q.size()));
  }
}

}  // namespace

double fidelity(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double root = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -kEpsZero || q[i] < -kEpsZero) {
      throw DomainError("fidelity requires nonnegative entries (index " + std::to_string(i) + ")");
    }
    root += std::sqrt(std::max(p[i], 0.0)) * std::sqrt(std::max(q[i], 0.0));
  }
  return root * root;
}

double fidelity(const ProbDist& p, const ProbDist& q) { return fidelity(p.values(), q.values()); }

double trace_distance(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

double trace_distance(const ProbDist& p, const ProbDist& q) {
  return trace_distance(p.values(), q.values());
}

MaxsumIdentity maxsum_identity_check(const ProbDist& beta0, const ProbDist& beta1) {
  check_pair(beta0.values(), beta1.values());
  double lhs = 0.0;
  for (std::size_t y = 0; y < beta0.size(); ++y) lhs += std::max(beta0[y], beta1[y]);
  return {lhs, 1.0 + trace_distance(beta0, beta1)};
}

HonestOutcome honest_outcome_distribution(const BccfProtocol& /*proto*/) {
  // a and b are independent fair bits; honest parties always pass cheat detection.
  return {0.5, 0.5, 0.0};
}

std::vector<double> prefix_marginal(std::span<const double> dist, const IndexSpace& space,
                                    std::size_t k) {
  if (dist.size() != space.size()) throw DimensionError("distribution does not match index space");
  if (k > space.rank()) throw IndexError("prefix longer than the index space");
  const std::size_t block = space.suffix_size(k);
  std::vector<double> out(space.size() / block, 0.0);
  for (std::size_t i = 0; i < dist.size(); ++i) out[i / block] += dist[i];
  return out;
}

namespace {

std::vector<std::vector<double>> prefix_table(const ProbDist& d0, const ProbDist& d1,
                                              const IndexSpace& space) {
  std::vector<double> mix(d0.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.5 * (d0[i] + d1[i]);
  std::vector<std::vector<double>> table;
  for (std::size_t k = 0; k <= space.rank(); ++k) table.push_back(prefix_marginal(mix, space, k));
  return table;
}

}  // namespace

std::vector<std::vector<double>> honest_alice_prefix_table(const BccfProtocol& proto) {
  return prefix_table(proto.alpha(0), proto.alpha(1), proto.alice_space());
}

std::vector<std::vector<double>> honest_bob_prefix_table(const BccfProtocol& proto) {
  return prefix_table(proto.beta(0), proto.beta(1), proto.bob_space());
}

double honest_prefix_prob(const BccfProtocol& proto, const PartialString& z) {
  const bool alice = z.role == PartialString::Role::AlicePrefix;
  const IndexSpace& space = alice ? proto.alice_space() : proto.bob_space();
  if (z.digits.size() > space.rank()) throw IndexError("prefix longer than the message count");
  const IndexSpace pre = space.prefix(z.digits.size());
  const std::size_t idx = pre.encode(z.digits);
  const auto table = alice ? honest_alice_prefix_table(proto) : honest_bob_prefix_table(proto);
  return table[z.digits.size()][idx];
}

}  // namespace bccf
