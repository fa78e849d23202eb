#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamdelay {

/*------------------------------------------------------------------------------------------------*/

/// Erasure channel: every slot independently delivers its packet with probability p.
class ChannelParams
{
public:

  /// @throws std::domain_error unless 0 < p < 1.
  explicit ChannelParams(double p, std::uint64_t seed = 0);

  double        p()    const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// -log(1-p), the best exponent any feedback delay can reach.
  double max_exponent() const noexcept;

private:

  double        p_;
  std::uint64_t seed_;
};

/// @throws std::domain_error unless 0 < p < 1. Names the parameter in the message.
void require_probability(double p, std::string_view name = "p");

/*------------------------------------------------------------------------------------------------*/

/// Time-invariant block scheme: in every block of d slots, x_i combinations of the i lowest-index
/// unseen packets are sent, lowest level first. Entries are non-negative and sum to d.
class SchemeVector
{
public:

  /// @throws std::invalid_argument if empty, negative, or sum(x) != x.size().
  explicit SchemeVector(std::vector<int> x);

  /// Parses comma-separated integers, e.g. "1,0,3,0". d is the number of entries.
  static SchemeVector parse(std::string_view text);

  /// [d, 0, ..., 0]
  static SchemeVector repetition(int d);

  /// [1, 1, ..., 1]
  static SchemeVector one_per_level(int d);

  int d() const noexcept { return static_cast<int>(x_.size()); }

  int operator[](std::size_t i) const noexcept { return x_[i]; }

  const std::vector<int>& entries() const noexcept { return x_; }

  /// Support level of every slot in transmission order (non-decreasing, values 1..d).
  std::vector<int> slot_levels() const;

  /// "1,0,3,0"
  std::string to_string() const;

  /// "[1 0 3 0]"; comma free, for use inside CSV fields and provenance tags.
  std::string label() const;

  friend bool operator==(const SchemeVector&, const SchemeVector&) = default;
  friend auto operator<=>(const SchemeVector&, const SchemeVector&) = default;

private:

  std::vector<int> x_;
};

/*------------------------------------------------------------------------------------------------*/

/// Reception outcome of the d slots of one block; true = received.
class ErasurePattern
{
public:

  explicit ErasurePattern(std::vector<bool> bits) : bits_(std::move(bits)) {}

  /// "1011" -> received, erased, received, received.
  static ErasurePattern parse(std::string_view text);

  /// Bit i of mask is slot i (slot 0 = least significant bit).
  static ErasurePattern from_mask(int d, std::uint32_t mask);

  int size() const noexcept { return static_cast<int>(bits_.size()); }

  bool operator[](std::size_t i) const { return bits_[i]; }

  int received() const noexcept;

  std::uint32_t mask() const;

private:

  std::vector<bool> bits_;
};

/*------------------------------------------------------------------------------------------------*/

/// Exact per-block quantities of a scheme at a given p.
/// miss = 1 - p_d is accumulated separately so that log(miss) stays accurate when p_d ~ 1.
struct BlockStats
{
  double p_d   = 0.0;
  double miss  = 1.0;
  double e_s_d = 0.0;
};

/*------------------------------------------------------------------------------------------------*/

/// A throughput / in-order decoding exponent pair. tau in innovative packets per slot,
/// lambda in nats per slot.
struct TradeoffPoint
{
  double tau    = 0.0;
  double lambda = 0.0;

  /// What produced the point: "scheme[1 0 3 0]", "arq", "no-feedback r=0.3", ...
  std::string provenance;

  /// Set when the point comes from a single time-invariant scheme.
  std::optional<SchemeVector> scheme;

  /// @throws std::domain_error if tau or lambda is negative or not finite.
  static TradeoffPoint make(double tau, double lambda, std::string provenance,
                            std::optional<SchemeVector> scheme = std::nullopt);

  /// tau <= p + tol and lambda <= -log(1-p) + tol.
  bool within_capacity_box(double p, double tau_tol = 1e-12, double lambda_tol = 1e-12) const;
};

/*------------------------------------------------------------------------------------------------*/

/// Time-sharing between block schemes of equal d: each block independently uses scheme i with
/// probability weights[i].
class MixtureSpec
{
public:

  /// @throws std::invalid_argument on empty lists, size mismatch, differing d, negative weights,
  /// or weights that do not sum to 1 within 1e-12.
  MixtureSpec(std::vector<SchemeVector> schemes, std::vector<double> weights);

  const std::vector<SchemeVector>& schemes() const noexcept { return schemes_; }
  const std::vector<double>&       weights() const noexcept { return weights_; }

  int d() const noexcept { return schemes_.front().d(); }

private:

  std::vector<SchemeVector> schemes_;
  std::vector<double>       weights_;
};

} // namespace streamdelay
