#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "streamdelay/model.hpp"

namespace streamdelay {

/// Largest block length block_stats() enumerates by default (2^20 patterns).
inline constexpr int default_enumeration_cap = 20;

/*------------------------------------------------------------------------------------------------*/
// Per-pattern rules. Slots carry combinations in transmission order with non-decreasing support
// levels; a level-m combination involves the m lowest-index unseen packets.

/// Innovative combinations among the received slots of one block. Greedy: a received level-m
/// slot raises the running rank r iff r < m.
/// @throws std::invalid_argument if e.size() != x.d().
int block_rank(const SchemeVector& x, const ErasurePattern& e);

/// True iff some j >= 1 has at least j received slots of level <= j, i.e. the block alone decodes
/// its first unseen packet.
/// @throws std::invalid_argument if e.size() != x.d().
bool block_first_decode(const SchemeVector& x, const ErasurePattern& e);

/*------------------------------------------------------------------------------------------------*/

/// Exact p_d and E[S_d] by enumerating all 2^d erasure patterns.
/// @throws std::out_of_range if x.d() > cap.
BlockStats block_stats(const SchemeVector& x, double p, int cap = default_enumeration_cap);

/// Same quantities by a dynamic program over support levels, O(d^3). Used for bulk evaluation;
/// block_stats() is the reference it is tested against.
BlockStats block_stats_by_level(const SchemeVector& x, double p);

/// (E[S_d]/d, -log(1-p_d)/d) from enumerated block statistics.
/// @throws std::domain_error if p_d == 1.
TradeoffPoint tradeoff_point(const SchemeVector& x, double p, int cap = default_enumeration_cap);

/// The same mapping applied to precomputed statistics.
TradeoffPoint tradeoff_from_stats(const SchemeVector& x, const BlockStats& stats);

/*------------------------------------------------------------------------------------------------*/
// Closed forms.

/// Binary divergence D(r||p) in nats; r = 0 gives -log(1-p).
/// @throws std::domain_error unless 0 < p < 1 and 0 <= r < 1.
double divergence(double r, double p);

/// Immediate feedback: (p, -log(1-p)).
TradeoffPoint arq_point(double p);

/// No feedback, full-rank code introducing packets at rate r: (r, D(r||p)).
TradeoffPoint no_feedback_point(double r, double p);

/// Best throughput while keeping lambda = -log(1-p): ((1-(1-p)^d)/d, -log(1-p)).
TradeoffPoint cost_of_optimal_lambda(double p, int d);

/// Best exponent while keeping tau = p: (p, -log(1-p)/d).
TradeoffPoint cost_of_optimal_tau(double p, int d);

/*------------------------------------------------------------------------------------------------*/

/// Suggested family: x_1 = a and x_{d-a+1} = d - a.
struct SuggestedSchemeParams
{
  int d = 1;
  int a = 1;

  /// a/d, used for the d -> infinity line.
  std::optional<double> alpha;

  /// @throws std::invalid_argument unless 1 <= a <= d.
  void validate() const;
};

SchemeVector suggested_scheme(const SuggestedSchemeParams& params);

/// ((1-(1-p)^a + (d-a)p)/d, -(a/d) log(1-p)), evaluated directly.
TradeoffPoint suggested_point(const SuggestedSchemeParams& params, double p);

/// Large-d limit at a = alpha d: ((1-alpha)p, -alpha log(1-p)).
TradeoffPoint suggested_limit_point(double alpha, double p);

/*------------------------------------------------------------------------------------------------*/

/// Fixed point of the rewrite (x_i, x_{i+1}) = (0, x) -> (1, x-1), leftmost index first, which
/// leaves (tau, lambda) unchanged when x_1 >= 1. Schemes with x_1 = 0 are returned unchanged.
SchemeVector canonicalize(const SchemeVector& x);

namespace detail {

/// Mask forms of the per-pattern rules; bit t of mask is slot t. levels from slot_levels().
int  rank_of_mask(std::span<const int> levels, std::uint32_t mask) noexcept;
bool first_decode_of_mask(std::span<const int> levels, std::uint32_t mask) noexcept;

} // namespace detail

} // namespace streamdelay
