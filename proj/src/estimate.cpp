#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "streamdelay/simulator.hpp"

namespace streamdelay {

namespace {

std::uint64_t
total_count(const GapHistogram& histogram)
{
  std::uint64_t n = 0;
  for (const auto& [t, count] : histogram) n += count;
  return n;
}

} // namespace

std::vector<double>
empirical_ccdf(const GapHistogram& histogram)
{
  const std::uint64_t n = total_count(histogram);
  if (n == 0)
  {
    return {};
  }
  const std::uint64_t max_t = histogram.rbegin()->first;
  std::vector<double> ccdf(max_t + 1);
  std::uint64_t above = n;
  auto it = histogram.begin();
  for (std::uint64_t t = 0; t <= max_t; ++t)
  {
    if (it != histogram.end() && it->first == t)
    {
      above -= it->second;
      ++it;
    }
    ccdf[t] = static_cast<double>(above) / static_cast<double>(n);
  }
  return ccdf;
}

ExponentEstimate
estimate_exponent_tail(const GapHistogram& histogram, std::optional<double> min_tail_mass)
{
  const std::uint64_t n = total_count(histogram);
  if (n < 100)
  {
    throw estimation_error("insufficient samples: tail regression needs at least 100 gaps, got "
                           + std::to_string(n));
  }
  const double floor_mass = min_tail_mass.value_or(50.0 / static_cast<double>(n));
  const auto ccdf = empirical_ccdf(histogram);

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t t = 0; t < ccdf.size(); ++t)
  {
    if (ccdf[t] >= floor_mass && ccdf[t] <= 0.5 && ccdf[t] > 0.0)
    {
      xs.push_back(static_cast<double>(t));
      ys.push_back(std::log(ccdf[t]));
    }
  }
  if (xs.size() < 2)
  {
    throw estimation_error("empty fitting window: fewer than two points with tail mass in ["
                           + std::to_string(floor_mass) + ", 0.5]");
  }

  const double k = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;

  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    const double residual = ys[i] - (intercept + slope * xs[i]);
    ssr += residual * residual;
  }

  ExponentEstimate est;
  est.method = "tail-regression";
  est.n_samples = n;
  est.lambda_hat = std::max(0.0, -slope);
  est.std_error = xs.size() > 2 ? std::sqrt(ssr / (k - 2.0) / sxx)
                                : std::numeric_limits<double>::quiet_NaN();
  return est;
}

ExponentEstimate
estimate_exponent_geometric(const GapHistogram& histogram)
{
  std::uint64_t n = 0;
  double sum = 0.0;
  for (const auto& [t, count] : histogram)
  {
    n += count;
    sum += static_cast<double>(t) * static_cast<double>(count);
  }
  if (n == 0)
  {
    throw estimation_error("insufficient samples: no decoding gaps observed");
  }
  const double q = static_cast<double>(n) / sum;
  ExponentEstimate est;
  est.method = "geometric-mle";
  est.n_samples = n;
  if (q >= 1.0)
  {
    // every gap was a single slot; the exponent is unbounded on this sample
    est.lambda_hat = std::numeric_limits<double>::infinity();
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  est.lambda_hat = -std::log1p(-q);
  est.std_error = q / std::sqrt(static_cast<double>(n) * (1.0 - q));
  return est;
}

} // namespace streamdelay
