#pragma once

// Protocol model, probability vectors and the distance primitives shared by
// every other module.
//
// Index convention: a product set X1 x ... x Xn is flattened row-major with
// X1 the most significant digit. IndexSpace implements the encode/decode
// pair; every array in this library uses it.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bccf {

inline constexpr double kEpsProb = 1e-9;   // normalization check on inputs
inline constexpr double kEpsZero = 1e-12;  // support detection
inline constexpr double kEpsEq = 1e-6;     // cross-checking solver outputs
inline constexpr double kEpsFeas = 1e-8;   // polytope / dual feasibility

class BccfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public BccfError {
 public:
  using BccfError::BccfError;
};

class DomainError : public BccfError {
 public:
  using BccfError::BccfError;
};

class NormalizationError : public BccfError {
 public:
  using BccfError::BccfError;
};

class IndexError : public BccfError {
 public:
  using BccfError::BccfError;
};

enum class Party { Alice, Bob };
enum class Outcome { Zero = 0, One = 1 };

const char* to_string(Party party);
int to_int(Outcome outcome);
Outcome outcome_from_int(int c);

/// Index of the β the honest party compares against when the cheater holds
/// bit `a` and wants `outcome`: a for outcome 0, the complement for outcome 1.
inline int target_bit(int a, Outcome outcome) {
  return outcome == Outcome::Zero ? a : 1 - a;
}

/// Mixed-radix index space over X1 x ... x Xk (row-major, X1 most significant).
class IndexSpace {
 public:
  IndexSpace() = default;
  explicit IndexSpace(std::vector<std::size_t> dims);

  std::size_t size() const { return size_; }
  std::size_t rank() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  std::size_t encode(std::span<const std::size_t> digits) const;
  std::vector<std::size_t> decode(std::size_t flat) const;
  void decode_into(std::size_t flat, std::span<std::size_t> digits) const;

  /// Number of flat indices sharing one value of the first `k` digits.
  std::size_t suffix_size(std::size_t k) const;
  /// Space of the first `k` digits.
  IndexSpace prefix(std::size_t k) const;

  friend bool operator==(const IndexSpace&, const IndexSpace&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t size_ = 1;
};

/// A probability vector: nonnegative entries summing to one.
class ProbDist {
 public:
  ProbDist() = default;
  /// Throws DomainError on negative entries and NormalizationError when the
  /// entries do not sum to one within `eps`.
  explicit ProbDist(std::vector<double> values, double eps = kEpsProb);

  static ProbDist point_mass(std::size_t size, std::size_t at);
  static ProbDist uniform(std::size_t size);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  bool in_support(std::size_t i) const { return values_[i] > kEpsZero; }
  std::vector<std::size_t> support() const;

  friend bool operator==(const ProbDist&, const ProbDist&) = default;

 private:
  std::vector<double> values_;
};

/// Parameters of a coin-flipping protocol based on bit commitment: message
/// dimensions for each of the n rounds and the commitment distributions.
class BccfProtocol {
 public:
  BccfProtocol(std::vector<std::size_t> alice_dims, std::vector<std::size_t> bob_dims,
               ProbDist alpha0, ProbDist alpha1, ProbDist beta0, ProbDist beta1);

  std::size_t rounds() const { return alice_dims_.size(); }
  const std::vector<std::size_t>& alice_dims() const { return alice_dims_; }
  const std::vector<std::size_t>& bob_dims() const { return bob_dims_; }
  const IndexSpace& alice_space() const { return alice_space_; }
  const IndexSpace& bob_space() const { return bob_space_; }
  std::size_t alice_size() const { return alice_space_.size(); }
  std::size_t bob_size() const { return bob_space_.size(); }

  const ProbDist& alpha(int a) const { return a == 0 ? alpha0_ : alpha1_; }
  const ProbDist& beta(int b) const { return b == 0 ? beta0_ : beta1_; }

  /// Same protocol with β0 and β1 exchanged.
  BccfProtocol with_swapped_betas() const;

  /// Interleaved history space A1 x B1 x ... x Aj x Bj (j full rounds).
  IndexSpace history_space(std::size_t rounds) const;
  /// History space A1 x B1 x ... x B_{j-1} x Aj (Bob's view before replying in round j).
  IndexSpace bob_decision_space(std::size_t j) const;
  /// History space A1 x B1 x ... x A_{j-1} x B_{j-1} (Alice's view before sending round j).
  IndexSpace alice_decision_space(std::size_t j) const;

  /// Flat interleaved history index of the complete history (x, y).
  std::size_t interleave(std::size_t x, std::size_t y) const;
  /// Splits a complete interleaved history into flat (x, y).
  std::pair<std::size_t, std::size_t> deinterleave(std::size_t history) const;

  friend bool operator==(const BccfProtocol&, const BccfProtocol&) = default;

 private:
  std::vector<std::size_t> alice_dims_;
  std::vector<std::size_t> bob_dims_;
  ProbDist alpha0_, alpha1_, beta0_, beta1_;
  IndexSpace alice_space_, bob_space_;
};

/// Committed digits revealed so far by one party.
struct PartialString {
  enum class Role { AlicePrefix, BobPrefix };
  Role role = Role::AlicePrefix;
  std::vector<std::size_t> digits;
};

/// F(p, q) = (sum_x sqrt(p_x q_x))^2 for nonnegative vectors.
double fidelity(std::span<const double> p, std::span<const double> q);
double fidelity(const ProbDist& p, const ProbDist& q);

/// Half the l1 distance (total variation distance).
double trace_distance(std::span<const double> p, std::span<const double> q);
double trace_distance(const ProbDist& p, const ProbDist& q);

struct MaxsumIdentity {
  double lhs;  // sum_y max_b beta_{b,y}
  double rhs;  // 1 + Delta(beta0, beta1)
};
MaxsumIdentity maxsum_identity_check(const ProbDist& beta0, const ProbDist& beta1);

struct HonestOutcome {
  double p0;
  double p1;
  double p_abort;
};
HonestOutcome honest_outcome_distribution(const BccfProtocol& proto);

/// Marginal of `dist` (over a product space) on its first `k` digits.
std::vector<double> prefix_marginal(std::span<const double> dist, const IndexSpace& space,
                                    std::size_t k);

/// Probability that an honest run reveals the given prefix.
double honest_prefix_prob(const BccfProtocol& proto, const PartialString& z);

/// Honest marginals of the message prefixes: entry [k] is indexed by the first
/// k digits (k = 0..n). Alice's uses (alpha0 + alpha1)/2, Bob's (beta0 + beta1)/2.
std::vector<std::vector<double>> honest_alice_prefix_table(const BccfProtocol& proto);
std::vector<std::vector<double>> honest_bob_prefix_table(const BccfProtocol& proto);

}  // namespace bccf
