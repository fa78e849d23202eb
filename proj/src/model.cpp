#include "streamdelay/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace streamdelay {

/*------------------------------------------------------------------------------------------------*/

void
require_probability(double p, std::string_view name)
{
  if (!(p > 0.0 && p < 1.0))
  {
    std::ostringstream msg;
    msg << name << " must lie strictly between 0 and 1, got " << p;
    throw std::domain_error(msg.str());
  }
}

ChannelParams::ChannelParams(double p, std::uint64_t seed)
  : p_{p}
  , seed_{seed}
{
  require_probability(p);
}

double
ChannelParams::max_exponent()
const noexcept
{
  return -std::log1p(-p_);
}

/*------------------------------------------------------------------------------------------------*/

SchemeVector::SchemeVector(std::vector<int> x)
  : x_{std::move(x)}
{
  if (x_.empty())
  {
    throw std::invalid_argument("scheme vector must have at least one entry");
  }
  long sum = 0;
  for (const int xi : x_)
  {
    if (xi < 0)
    {
      throw std::invalid_argument("scheme entries must be non-negative");
    }
    sum += xi;
  }
  if (sum != static_cast<long>(x_.size()))
  {
    throw std::invalid_argument("scheme entries must sum to d = " + std::to_string(x_.size())
                                + ", got " + std::to_string(sum));
  }
}

SchemeVector
SchemeVector::parse(std::string_view text)
{
  std::vector<int> x;
  std::size_t pos = 0;
  while (pos <= text.size())
  {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    int value = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size())
    {
      throw std::invalid_argument("malformed scheme '" + std::string(text)
                                  + "': expected comma-separated integers");
    }
    x.push_back(value);
    pos = comma + 1;
  }
  return SchemeVector(std::move(x));
}

SchemeVector
SchemeVector::repetition(int d)
{
  if (d < 1)
  {
    throw std::invalid_argument("block length must be positive");
  }
  std::vector<int> x(static_cast<std::size_t>(d), 0);
  x[0] = d;
  return SchemeVector(std::move(x));
}

SchemeVector
SchemeVector::one_per_level(int d)
{
  if (d < 1)
  {
    throw std::invalid_argument("block length must be positive");
  }
  return SchemeVector(std::vector<int>(static_cast<std::size_t>(d), 1));
}

std::vector<int>
SchemeVector::slot_levels()
const
{
  std::vector<int> levels;
  levels.reserve(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i)
  {
    levels.insert(levels.end(), static_cast<std::size_t>(x_[i]), static_cast<int>(i + 1));
  }
  return levels;
}

std::string
SchemeVector::to_string()
const
{
  std::string out;
  for (std::size_t i = 0; i < x_.size(); ++i)
  {
    if (i > 0) out += ',';
    out += std::to_string(x_[i]);
  }
  return out;
}

std::string
SchemeVector::label()
const
{
  std::string out = "[";
  for (std::size_t i = 0; i < x_.size(); ++i)
  {
    if (i > 0) out += ' ';
    out += std::to_string(x_[i]);
  }
  return out + "]";
}

/*------------------------------------------------------------------------------------------------*/

ErasurePattern
ErasurePattern::parse(std::string_view text)
{
  std::vector<bool> bits;
  bits.reserve(text.size());
  for (const char c : text)
  {
    if (c != '0' && c != '1')
    {
      throw std::invalid_argument("erasure pattern must contain only '0' and '1'");
    }
    bits.push_back(c == '1');
  }
  return ErasurePattern(std::move(bits));
}

ErasurePattern
ErasurePattern::from_mask(int d, std::uint32_t mask)
{
  std::vector<bool> bits(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
  {
    bits[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  }
  return ErasurePattern(std::move(bits));
}

int
ErasurePattern::received()
const noexcept
{
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), true));
}

std::uint32_t
ErasurePattern::mask()
const
{
  if (bits_.size() > 32)
  {
    throw std::length_error("erasure pattern longer than 32 slots has no mask form");
  }
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
  {
    if (bits_[i]) m |= 1u << i;
  }
  return m;
}

/*------------------------------------------------------------------------------------------------*/

TradeoffPoint
TradeoffPoint::make(double tau, double lambda, std::string provenance,
                    std::optional<SchemeVector> scheme)
{
  if (!std::isfinite(tau) || !std::isfinite(lambda) || tau < 0.0 || lambda < 0.0)
  {
    std::ostringstream msg;
    msg << "trade-off point (" << tau << ", " << lambda << ") from " << provenance
        << " must be finite and non-negative";
    throw std::domain_error(msg.str());
  }
  return TradeoffPoint{tau, lambda, std::move(provenance), std::move(scheme)};
}

bool
TradeoffPoint::within_capacity_box(double p, double tau_tol, double lambda_tol)
const
{
  return tau <= p + tau_tol && lambda <= -std::log1p(-p) + lambda_tol;
}

/*------------------------------------------------------------------------------------------------*/

MixtureSpec::MixtureSpec(std::vector<SchemeVector> schemes, std::vector<double> weights)
  : schemes_{std::move(schemes)}
  , weights_{std::move(weights)}
{
  if (schemes_.empty())
  {
    throw std::invalid_argument("mixture needs at least one scheme");
  }
  if (schemes_.size() != weights_.size())
  {
    throw std::invalid_argument("mixture has " + std::to_string(schemes_.size()) + " schemes but "
                                + std::to_string(weights_.size()) + " weights");
  }
  for (const auto& s : schemes_)
  {
    if (s.d() != schemes_.front().d())
    {
      throw std::invalid_argument("all schemes of a mixture must share the same block length");
    }
  }
  double total = 0.0;
  for (const double w : weights_)
  {
    if (!(w >= 0.0))
    {
      throw std::invalid_argument("mixture weights must be non-negative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
  {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
}

} // namespace streamdelay
