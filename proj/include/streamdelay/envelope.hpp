#pragma once

#include <span>
#include <vector>

#include "streamdelay/analytics.hpp"
#include "streamdelay/model.hpp"

namespace streamdelay {

/// Largest d enumerate_schemes() accepts unless told otherwise (C(23,11) ~ 1.35M compositions).
inline constexpr int default_scheme_cap = 12;

/// Two points closer than this in tau are the same throughput.
inline constexpr double tau_tie_tolerance = 1e-12;

/// Absolute cross-product tolerance below which three points count as collinear.
inline constexpr double collinear_tolerance = 1e-9;

struct EnvelopeSegment
{
  TradeoffPoint left;
  TradeoffPoint right;

  double slope() const { return (right.lambda - left.lambda) / (right.tau - left.tau); }
};

struct EnvelopeResult
{
  std::vector<TradeoffPoint>   all_points;
  std::vector<TradeoffPoint>   vertices;   ///< increasing tau, decreasing lambda
  std::vector<EnvelopeSegment> segments;   ///< adjacent vertex pairs

  /// Piecewise-linear envelope value; flat at the max-lambda vertex to its left and clamped at
  /// the max-tau vertex to its right.
  double lambda_at(double tau) const;

  /// True when the point is one of the vertices (same tau within tau_tie_tolerance and same
  /// lambda within 1e-12).
  bool is_vertex(const TradeoffPoint& point) const;
};

/*------------------------------------------------------------------------------------------------*/

/// Every weak composition of d into d parts, in decreasing lexicographic order. With dedupe,
/// schemes with x_1 >= 1 are replaced by their canonical form and repeats dropped; schemes with
/// x_1 = 0 are kept as they are.
/// @throws std::out_of_range unless 1 <= d <= cap.
std::vector<SchemeVector> enumerate_schemes(int d, bool dedupe, int cap = default_scheme_cap);

/// tradeoff points of every scheme, in input order. Statistics come from the level dynamic
/// program; work is split over `threads` workers when threads > 1.
std::vector<TradeoffPoint> evaluate_schemes(std::span<const SchemeVector> schemes, double p,
                                            unsigned threads = 1);

/// Upper-left convex envelope of the points in the (tau, lambda) plane: the concave,
/// non-increasing boundary running from the max-lambda point to the max-tau point. Ties in tau
/// keep the higher lambda and collinear points are not vertices.
/// @throws std::invalid_argument on empty input.
EnvelopeResult upper_envelope(std::vector<TradeoffPoint> points);

/// enumerate_schemes + evaluate_schemes + upper_envelope.
EnvelopeResult scheme_envelope(int d, double p, bool dedupe = true, int cap = default_scheme_cap,
                               unsigned threads = 1);

/*------------------------------------------------------------------------------------------------*/

struct InterpolatedLambda
{
  double      lambda;
  MixtureSpec mixture;  ///< weights {mu, 1-mu} over the bracketing vertices, or {1} at a vertex
};

/// Best exponent at a target throughput by time-sharing the two vertices bracketing it.
/// @throws std::out_of_range if tau_target lies outside the vertex tau range.
/// @throws std::invalid_argument if a bracketing vertex carries no scheme.
InterpolatedLambda optimal_lambda_at(const EnvelopeResult& result, double tau_target);

} // namespace streamdelay
