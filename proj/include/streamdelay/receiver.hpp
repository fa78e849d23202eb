#pragma once

#include <cstdint>
#include <vector>

namespace streamdelay {

/// Receiver bookkeeping under generic coefficients. A received innovative combination is kept
/// only as its highest packet index. With C(j) the number of innovative combinations whose highest
/// index is <= j, packets 1..j are decodable exactly when C(j) == j, so the decoded prefix is the
/// largest such j.
///
/// The deficit j - C(j) is held in a min segment tree over a sliding window above the decoded
/// prefix; each combination is a suffix decrement followed by a rightmost-zero search.
class ReceiverState
{
public:

  ReceiverState();

  /// Records a received combination already known to be innovative. Returns true when the
  /// decoded prefix grew (an in-order decoding instant).
  /// @throws std::logic_error if max_index <= decoded_prefix().
  bool add_innovative(std::uint64_t max_index);

  std::uint64_t decoded_prefix() const noexcept { return decoded_; }

  /// Number of seen packets: equal to the rank of everything received.
  std::uint64_t seen_prefix() const noexcept { return rank_; }

  std::uint64_t rank() const noexcept { return rank_; }

  /// Stored combinations not yet consumed by decoding.
  std::uint64_t pending_equations() const noexcept { return rank_ - decoded_; }

  /// Highest packet index referenced by any stored combination.
  std::uint64_t top_index() const noexcept { return top_; }

private:

  void rebuild(std::uint64_t need_top);

  void push(std::size_t node);
  void add_suffix(std::size_t node, std::size_t lo, std::size_t hi, std::size_t from);
  long find_rightmost_zero(std::size_t node, std::size_t lo, std::size_t hi, std::size_t from);
  void collect(std::size_t node, std::size_t lo, std::size_t hi, std::vector<std::int64_t>& out);

  std::uint64_t decoded_ = 0;
  std::uint64_t rank_    = 0;
  std::uint64_t top_     = 0;

  // window covers absolute packet indices [base_, base_ + width_)
  std::uint64_t base_  = 1;
  std::size_t   width_ = 0;

  std::vector<std::int64_t> min_;
  std::vector<std::int64_t> lazy_;
};

} // namespace streamdelay
