#include "streamdelay/analytics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamdelay {

namespace {

void
require_matching_length(const SchemeVector& x, const ErasurePattern& e)
{
  if (e.size() != x.d())
  {
    throw std::invalid_argument("erasure pattern has " + std::to_string(e.size())
                                + " slots but the scheme has d = " + std::to_string(x.d()));
  }
}

std::string
format_tag(const char* prefix, double value)
{
  std::ostringstream out;
  out << prefix << value;
  return out.str();
}

/// pmf of Binomial(n, p) for k = 0..n.
std::vector<double>
binomial_pmf(int n, double p)
{
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  double choose = 1.0;
  for (int k = 0; k <= n; ++k)
  {
    pmf[static_cast<std::size_t>(k)] = choose * std::pow(p, k) * std::pow(1.0 - p, n - k);
    choose = choose * (n - k) / (k + 1);
  }
  return pmf;
}

} // namespace

/*------------------------------------------------------------------------------------------------*/

namespace detail {

int
rank_of_mask(std::span<const int> levels, std::uint32_t mask)
noexcept
{
  int rank = 0;
  for (std::size_t t = 0; t < levels.size(); ++t)
  {
    if (((mask >> t) & 1u) && rank < levels[t])
    {
      ++rank;
    }
  }
  return rank;
}

bool
first_decode_of_mask(std::span<const int> levels, std::uint32_t mask)
noexcept
{
  // levels are non-decreasing: count received slots up to each level boundary
  int count = 0;
  for (std::size_t t = 0; t < levels.size(); ++t)
  {
    if ((mask >> t) & 1u)
    {
      ++count;
    }
    const bool boundary = t + 1 == levels.size() || levels[t + 1] != levels[t];
    if (boundary && count >= levels[t])
    {
      return true;
    }
  }
  return false;
}

} // namespace detail

/*------------------------------------------------------------------------------------------------*/

int
block_rank(const SchemeVector& x, const ErasurePattern& e)
{
  require_matching_length(x, e);
  const auto levels = x.slot_levels();
  int rank = 0;
  for (std::size_t t = 0; t < levels.size(); ++t)
  {
    if (e[t] && rank < levels[t])
    {
      ++rank;
    }
  }
  return rank;
}

bool
block_first_decode(const SchemeVector& x, const ErasurePattern& e)
{
  require_matching_length(x, e);
  const auto levels = x.slot_levels();
  for (int j = 1; j <= x.d(); ++j)
  {
    int count = 0;
    for (std::size_t t = 0; t < levels.size(); ++t)
    {
      if (e[t] && levels[t] <= j) ++count;
    }
    if (count >= j)
    {
      return true;
    }
  }
  return false;
}

/*------------------------------------------------------------------------------------------------*/

BlockStats
block_stats(const SchemeVector& x, double p, int cap)
{
  require_probability(p);
  const int d = x.d();
  if (d > cap || d > 30)
  {
    throw std::out_of_range("block length " + std::to_string(d)
                            + " exceeds the enumeration cap of " + std::to_string(cap));
  }
  const auto levels = x.slot_levels();

  std::vector<double> weight(static_cast<std::size_t>(d) + 1);
  for (int s = 0; s <= d; ++s)
  {
    weight[static_cast<std::size_t>(s)] = std::pow(p, s) * std::pow(1.0 - p, d - s);
  }

  BlockStats stats{0.0, 0.0, 0.0};
  const std::uint32_t patterns = 1u << d;
  for (std::uint32_t mask = 0; mask < patterns; ++mask)
  {
    const double w = weight[static_cast<std::size_t>(std::popcount(mask))];
    if (detail::first_decode_of_mask(levels, mask))
    {
      stats.p_d += w;
    }
    else
    {
      stats.miss += w;
    }
    stats.e_s_d += w * detail::rank_of_mask(levels, mask);
  }
  return stats;
}

BlockStats
block_stats_by_level(const SchemeVector& x, double p)
{
  require_probability(p);
  const int d = x.d();
  const std::size_t states = static_cast<std::size_t>(d) + 1;

  // prob[decoded][rank]; after level j the rank is min(j, rank + received), and the block decodes
  // its first unseen packet exactly when the rank reaches the current level.
  std::vector<double> prob[2] = {std::vector<double>(states, 0.0), std::vector<double>(states, 0.0)};
  prob[0][0] = 1.0;

  for (int j = 1; j <= d; ++j)
  {
    const int n = x[static_cast<std::size_t>(j - 1)];
    if (n == 0)
    {
      continue;
    }
    const auto pmf = binomial_pmf(n, p);
    std::vector<double> next[2] = {std::vector<double>(states, 0.0), std::vector<double>(states, 0.0)};
    for (int flag = 0; flag < 2; ++flag)
    {
      for (int r = 0; r < j; ++r)
      {
        const double mass = prob[flag][static_cast<std::size_t>(r)];
        if (mass == 0.0) continue;
        for (int k = 0; k <= n; ++k)
        {
          const int nr = std::min(j, r + k);
          const int nf = (flag == 1 || nr == j) ? 1 : 0;
          next[nf][static_cast<std::size_t>(nr)] += mass * pmf[static_cast<std::size_t>(k)];
        }
      }
    }
    prob[0].swap(next[0]);
    prob[1].swap(next[1]);
  }

  BlockStats stats{0.0, 0.0, 0.0};
  for (std::size_t r = 0; r < states; ++r)
  {
    stats.miss  += prob[0][r];
    stats.p_d   += prob[1][r];
    stats.e_s_d += static_cast<double>(r) * (prob[0][r] + prob[1][r]);
  }
  return stats;
}

TradeoffPoint
tradeoff_from_stats(const SchemeVector& x, const BlockStats& stats)
{
  if (!(stats.miss > 0.0))
  {
    throw std::domain_error("scheme " + x.label()
                            + " decodes its first unseen packet with certainty; exponent is unbounded");
  }
  const double d = x.d();
  return TradeoffPoint::make(stats.e_s_d / d, -std::log(stats.miss) / d, "scheme" + x.label(), x);
}

TradeoffPoint
tradeoff_point(const SchemeVector& x, double p, int cap)
{
  return tradeoff_from_stats(x, block_stats(x, p, cap));
}

/*------------------------------------------------------------------------------------------------*/

double
divergence(double r, double p)
{
  require_probability(p);
  if (!(r >= 0.0 && r < 1.0))
  {
    std::ostringstream msg;
    msg << "rate r must lie in [0, 1), got " << r;
    throw std::domain_error(msg.str());
  }
  if (r == 0.0)
  {
    return -std::log1p(-p);
  }
  return r * std::log(r / p) + (1.0 - r) * std::log((1.0 - r) / (1.0 - p));
}

TradeoffPoint
arq_point(double p)
{
  require_probability(p);
  return TradeoffPoint::make(p, -std::log1p(-p), "ARQ/d=1");
}

TradeoffPoint
no_feedback_point(double r, double p)
{
  return TradeoffPoint::make(r, divergence(r, p), format_tag("no-feedback r=", r));
}

TradeoffPoint
cost_of_optimal_lambda(double p, int d)
{
  require_probability(p);
  if (d < 1)
  {
    throw std::domain_error("block length d must be at least 1");
  }
  const double tau = -std::expm1(d * std::log1p(-p)) / d;
  return TradeoffPoint::make(tau, -std::log1p(-p), "optimal-lambda d=" + std::to_string(d),
                             SchemeVector::repetition(d));
}

TradeoffPoint
cost_of_optimal_tau(double p, int d)
{
  require_probability(p);
  if (d < 1)
  {
    throw std::domain_error("block length d must be at least 1");
  }
  return TradeoffPoint::make(p, -std::log1p(-p) / d, "optimal-tau d=" + std::to_string(d),
                             SchemeVector::one_per_level(d));
}

/*------------------------------------------------------------------------------------------------*/

void
SuggestedSchemeParams::validate()
const
{
  if (d < 1 || a < 1 || a > d)
  {
    throw std::invalid_argument("suggested scheme needs 1 <= a <= d, got a = " + std::to_string(a)
                                + ", d = " + std::to_string(d));
  }
}

SchemeVector
suggested_scheme(const SuggestedSchemeParams& params)
{
  params.validate();
  std::vector<int> x(static_cast<std::size_t>(params.d), 0);
  x[0] = params.a;
  if (params.a < params.d)
  {
    x[static_cast<std::size_t>(params.d - params.a)] = params.d - params.a;
  }
  return SchemeVector(std::move(x));
}

TradeoffPoint
suggested_point(const SuggestedSchemeParams& params, double p)
{
  params.validate();
  require_probability(p);
  const double d = params.d;
  const double a = params.a;
  const double tau = (-std::expm1(a * std::log1p(-p)) + (d - a) * p) / d;
  const double lambda = -(a / d) * std::log1p(-p);
  return TradeoffPoint::make(tau, lambda,
                             "suggested d=" + std::to_string(params.d) + " a=" + std::to_string(params.a),
                             suggested_scheme(params));
}

TradeoffPoint
suggested_limit_point(double alpha, double p)
{
  require_probability(p);
  if (!(alpha >= 0.0 && alpha <= 1.0))
  {
    throw std::domain_error("alpha must lie in [0, 1]");
  }
  return TradeoffPoint::make((1.0 - alpha) * p, -alpha * std::log1p(-p),
                             format_tag("suggested-limit alpha=", alpha));
}

/*------------------------------------------------------------------------------------------------*/

SchemeVector
canonicalize(const SchemeVector& x)
{
  std::vector<int> v = x.entries();
  if (v.front() == 0)
  {
    return x;
  }
  for (;;)
  {
    std::size_t i = 0;
    while (i + 1 < v.size() && !(v[i] == 0 && v[i + 1] >= 1))
    {
      ++i;
    }
    if (i + 1 >= v.size())
    {
      break;
    }
    v[i] = 1;
    v[i + 1] -= 1;
  }
  return SchemeVector(std::move(v));
}

} // namespace streamdelay
