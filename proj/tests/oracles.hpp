#pragma once

// Reference implementations used only by the tests. None of them share code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/*------------------------------------------------------------------------------------------------*/
// Closed forms, written out independently. worked_* is the [1 0 3 0] scheme.

inline double worked_p_d(double p) { return p + (1 - p) * p * p * p; }
inline double worked_e_s(double p) { return 4 * p - p * p * p * p; }

inline double repetition_tau(double p, int d) { return (1 - std::pow(1 - p, d)) / d; }
inline double repetition_lambda(double p) { return -std::log(1 - p); }
inline double one_per_level_tau(double p) { return p; }
inline double one_per_level_lambda(double p, int d) { return -std::log(1 - p) / d; }

inline double suggested_tau(double p, int d, int a) { return (1 - std::pow(1 - p, a) + (d - a) * p) / d; }
inline double suggested_lambda(double p, int d, int a) { return -static_cast<double>(a) / d * std::log(1 - p); }

inline double kl(double r, double p)
{
  if (r == 0) return -std::log(1 - p);
  return r * std::log(r / p) + (1 - r) * std::log((1 - r) / (1 - p));
}

/*------------------------------------------------------------------------------------------------*/

/// Row space over GF(P) with incremental Gaussian elimination. Vectors are indexed from packet 1.
class PrimeFieldSpace
{
public:

  static constexpr std::uint64_t P = 2147483647; // 2^31 - 1

  explicit PrimeFieldSpace(std::size_t n_packets) : n_{n_packets}, pivot_row_(n_packets + 1, -1) {}

  /// Adds v (entries 1..n used, entry 0 ignored). Returns true if it raised the rank.
  bool add(std::vector<std::uint64_t> v)
  {
    reduce(v);
    std::size_t lead = 0;
    for (std::size_t i = 1; i <= n_; ++i)
    {
      if (v[i] != 0) { lead = i; break; }
    }
    if (lead == 0) return false;
    const std::uint64_t inv = inverse(v[lead]);
    for (auto& c : v) c = c * inv % P;
    // keep the basis fully reduced
    for (auto& row : rows_)
    {
      const std::uint64_t f = row[lead];
      if (f == 0) continue;
      for (std::size_t i = 1; i <= n_; ++i) row[i] = (row[i] + P - f * v[i] % P) % P;
    }
    pivot_row_[lead] = static_cast<long>(rows_.size());
    rows_.push_back(std::move(v));
    return true;
  }

  std::size_t rank() const { return rows_.size(); }

  /// True if the unit vector e_k lies in the span.
  bool contains_unit(std::size_t k) const
  {
    std::vector<std::uint64_t> e(n_ + 1, 0);
    e[k] = 1;
    reduce(e);
    for (std::size_t i = 1; i <= n_; ++i)
      if (e[i] != 0) return false;
    return true;
  }

  /// Largest j with e_1..e_j all in the span.
  std::size_t decoded_prefix() const
  {
    std::size_t j = 0;
    while (j < n_ && contains_unit(j + 1)) ++j;
    return j;
  }

private:

  void reduce(std::vector<std::uint64_t>& v) const
  {
    for (std::size_t i = 1; i <= n_; ++i)
    {
      if (v[i] == 0 || pivot_row_[i] < 0) continue;
      const std::uint64_t f = v[i];
      const auto& row = rows_[static_cast<std::size_t>(pivot_row_[i])];
      for (std::size_t k = 1; k <= n_; ++k) v[k] = (v[k] + P - f * row[k] % P) % P;
    }
  }

  static std::uint64_t inverse(std::uint64_t a)
  {
    std::uint64_t result = 1;
    std::uint64_t e = P - 2;
    while (e)
    {
      if (e & 1) result = result * a % P;
      a = a * a % P;
      e >>= 1;
    }
    return result;
  }

  std::size_t                             n_;
  std::vector<long>                       pivot_row_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

/// Random combination of packets 1..top with every coefficient non-zero.
inline std::vector<std::uint64_t> random_prefix_vector(std::size_t n, std::size_t top, std::mt19937_64& rng)
{
  std::uniform_int_distribution<std::uint64_t> coef(1, PrimeFieldSpace::P - 1);
  std::vector<std::uint64_t> v(n + 1, 0);
  for (std::size_t i = 1; i <= top; ++i) v[i] = coef(rng);
  return v;
}

/*------------------------------------------------------------------------------------------------*/

/// Decoded prefix by direct recount: largest j with (#innovative tops <= j) == j.
inline std::uint64_t recount_decoded(const std::vector<std::uint64_t>& tops)
{
  std::uint64_t max_top = 0;
  for (auto t : tops) max_top = std::max(max_top, t);
  std::vector<std::uint64_t> at(max_top + 1, 0);
  for (auto t : tops) ++at[t];
  std::uint64_t best = 0;
  std::uint64_t c = 0;
  for (std::uint64_t j = 1; j <= max_top; ++j)
  {
    c += at[j];
    if (c == j) best = j;
  }
  return best;
}

/// Binomial standard deviation of a frequency estimate.
inline double binomial_sigma(double q, double n) { return std::sqrt(q * (1 - q) / n); }

} // namespace oracle
