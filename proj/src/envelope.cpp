#include "streamdelay/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

namespace streamdelay {

namespace {

void
compositions(int remaining, std::size_t pos, std::vector<int>& current,
             std::vector<std::vector<int>>& out)
{
  if (pos + 1 == current.size())
  {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = remaining; v >= 0; --v)
  {
    current[pos] = v;
    compositions(remaining - v, pos + 1, current, out);
  }
}

/// (b - a) x (c - a); negative when b lies above the chord a-c.
double
cross(const TradeoffPoint& a, const TradeoffPoint& b, const TradeoffPoint& c)
{
  return (b.tau - a.tau) * (c.lambda - a.lambda) - (b.lambda - a.lambda) * (c.tau - a.tau);
}

} // namespace

/*------------------------------------------------------------------------------------------------*/

double
EnvelopeResult::lambda_at(double tau)
const
{
  if (vertices.empty())
  {
    throw std::logic_error("empty envelope");
  }
  if (tau <= vertices.front().tau)
  {
    return vertices.front().lambda;
  }
  for (const auto& seg : segments)
  {
    if (tau <= seg.right.tau)
    {
      const double mu = (seg.right.tau - tau) / (seg.right.tau - seg.left.tau);
      return mu * seg.left.lambda + (1.0 - mu) * seg.right.lambda;
    }
  }
  return vertices.back().lambda;
}

bool
EnvelopeResult::is_vertex(const TradeoffPoint& point)
const
{
  return std::any_of(vertices.begin(), vertices.end(), [&](const TradeoffPoint& v) {
    return std::abs(v.tau - point.tau) <= tau_tie_tolerance && std::abs(v.lambda - point.lambda) <= 1e-12;
  });
}

/*------------------------------------------------------------------------------------------------*/

std::vector<SchemeVector>
enumerate_schemes(int d, bool dedupe, int cap)
{
  if (d < 1 || d > cap)
  {
    throw std::out_of_range("block length d = " + std::to_string(d) + " outside the enumeration range 1.."
                            + std::to_string(cap));
  }
  std::vector<std::vector<int>> raw;
  std::vector<int> current(static_cast<std::size_t>(d));
  compositions(d, 0, current, raw);

  std::vector<SchemeVector> schemes;
  if (!dedupe)
  {
    schemes.reserve(raw.size());
    for (auto& x : raw)
    {
      schemes.emplace_back(std::move(x));
    }
    return schemes;
  }

  // x_1 = 0 compositions never collide with canonical forms (those start with x_1 >= 1)
  std::set<std::vector<int>> canonical_seen;
  for (auto& x : raw)
  {
    if (x.front() == 0)
    {
      schemes.emplace_back(std::move(x));
      continue;
    }
    SchemeVector c = canonicalize(SchemeVector(std::move(x)));
    if (canonical_seen.insert(c.entries()).second)
    {
      schemes.push_back(std::move(c));
    }
  }
  return schemes;
}

std::vector<TradeoffPoint>
evaluate_schemes(std::span<const SchemeVector> schemes, double p, unsigned threads)
{
  require_probability(p);
  std::vector<TradeoffPoint> points(schemes.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
    {
      points[i] = tradeoff_from_stats(schemes[i], block_stats_by_level(schemes[i], p));
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || schemes.size() < 2 * threads)
  {
    work(0, schemes.size());
    return points;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (schemes.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < schemes.size(); begin += chunk)
    {
      pool.emplace_back(work, begin, std::min(schemes.size(), begin + chunk));
    }
  }
  return points;
}

/*------------------------------------------------------------------------------------------------*/

EnvelopeResult
upper_envelope(std::vector<TradeoffPoint> points)
{
  if (points.empty())
  {
    throw std::invalid_argument("cannot build an envelope from an empty point set");
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].tau < points[b].tau;
  });

  // collapse tau ties onto their highest-lambda member
  std::vector<std::size_t> reduced;
  for (std::size_t k = 0; k < order.size();)
  {
    std::size_t best = order[k];
    std::size_t m = k + 1;
    while (m < order.size() && points[order[m]].tau - points[order[k]].tau <= tau_tie_tolerance)
    {
      if (points[order[m]].lambda > points[best].lambda)
      {
        best = order[m];
      }
      ++m;
    }
    reduced.push_back(best);
    k = m;
  }

  // start at the max-lambda point; on equal lambda the larger tau wins
  std::size_t start = 0;
  for (std::size_t k = 1; k < reduced.size(); ++k)
  {
    if (points[reduced[k]].lambda >= points[reduced[start]].lambda)
    {
      start = k;
    }
  }

  std::vector<std::size_t> hull;
  for (std::size_t k = start; k < reduced.size(); ++k)
  {
    const auto& c = points[reduced[k]];
    while (hull.size() >= 2
           && cross(points[hull[hull.size() - 2]], points[hull.back()], c) >= -collinear_tolerance)
    {
      hull.pop_back();
    }
    hull.push_back(reduced[k]);
  }
  // the max-tau end may sit no higher than its neighbour; keep lambda strictly decreasing
  while (hull.size() >= 2 && points[hull.back()].lambda >= points[hull[hull.size() - 2]].lambda)
  {
    hull.pop_back();
  }

  EnvelopeResult result;
  for (const std::size_t idx : hull)
  {
    result.vertices.push_back(points[idx]);
  }
  for (std::size_t k = 0; k + 1 < result.vertices.size(); ++k)
  {
    result.segments.push_back(EnvelopeSegment{result.vertices[k], result.vertices[k + 1]});
  }
  result.all_points = std::move(points);
  return result;
}

EnvelopeResult
scheme_envelope(int d, double p, bool dedupe, int cap, unsigned threads)
{
  const auto schemes = enumerate_schemes(d, dedupe, cap);
  return upper_envelope(evaluate_schemes(schemes, p, threads));
}

/*------------------------------------------------------------------------------------------------*/

InterpolatedLambda
optimal_lambda_at(const EnvelopeResult& result, double tau_target)
{
  const auto& v = result.vertices;
  if (v.empty() || !(tau_target >= v.front().tau - tau_tie_tolerance)
      || !(tau_target <= v.back().tau + tau_tie_tolerance))
  {
    throw std::out_of_range("target throughput " + std::to_string(tau_target)
                            + " outside the envelope's throughput range");
  }
  auto scheme_of = [](const TradeoffPoint& pt) {
    if (!pt.scheme)
    {
      throw std::invalid_argument("envelope vertex '" + pt.provenance + "' has no scheme to time-share");
    }
    return *pt.scheme;
  };

  for (const auto& vertex : v)
  {
    if (std::abs(vertex.tau - tau_target) <= tau_tie_tolerance)
    {
      return InterpolatedLambda{vertex.lambda, MixtureSpec({scheme_of(vertex)}, {1.0})};
    }
  }
  for (const auto& seg : result.segments)
  {
    if (tau_target < seg.right.tau)
    {
      const double mu = (seg.right.tau - tau_target) / (seg.right.tau - seg.left.tau);
      const double lambda = mu * seg.left.lambda + (1.0 - mu) * seg.right.lambda;
      return InterpolatedLambda{lambda,
                                MixtureSpec({scheme_of(seg.left), scheme_of(seg.right)}, {mu, 1.0 - mu})};
    }
  }
  throw std::logic_error("no bracketing segment found");
}

} // namespace streamdelay
