#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamdelay/model.hpp"

namespace streamdelay {

/// Counts of inter-decoding gaps T, keyed by T (T >= 1).
using GapHistogram = std::map<std::uint64_t, std::uint64_t>;

/*------------------------------------------------------------------------------------------------*/

/// Seeded i.i.d. erasure source. Substreams with different labels are independent; the same
/// (seed, label) always yields the same sequence.
class ErasureChannel
{
public:

  static constexpr std::uint32_t erasure_label = 0x45524153; // "ERAS"
  static constexpr std::uint32_t mixture_label = 0x4d495854; // "MIXT"

  explicit ErasureChannel(const ChannelParams& params, std::uint32_t label = erasure_label);

  /// @return true if the slot is received.
  bool operator()() noexcept { return uniform() < p_; }

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:

  std::mt19937_64 gen_;
  double          p_;
};

/// First n_slots outcomes of the erasure substream of params.seed().
std::vector<bool> channel_trace(const ChannelParams& params, std::uint64_t n_slots);

/*------------------------------------------------------------------------------------------------*/

struct RateSegment
{
  double        rate;
  std::uint64_t slots;
};

/// Full-rank code without feedback: slot n carries a combination of packets 1..V[n].
/// With a single segment V[n] = ceil(r n); a multi-segment schedule restarts the ceiling at each
/// segment boundary on top of the index reached so far.
struct FullRankConfig
{
  std::vector<RateSegment> schedule;

  static FullRankConfig constant(double r, std::uint64_t n_slots);
  static FullRankConfig piecewise(std::vector<RateSegment> segments);

  std::uint64_t n_slots() const noexcept;

  /// Slot-weighted mean rate.
  double mean_rate() const noexcept;

  /// True if any segment introduces packets faster than the channel delivers them.
  bool exceeds_capacity(double p) const noexcept;

  /// @throws std::invalid_argument on an empty schedule, zero-length segment, or rate outside (0,1].
  void validate() const;
};

/*------------------------------------------------------------------------------------------------*/

class estimation_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ExponentEstimate
{
  double        lambda_hat = 0.0;   ///< nats per slot
  double        std_error  = 0.0;   ///< NaN when the fit has no residual degrees of freedom
  std::string   method;             ///< "geometric-mle" or "tail-regression"
  std::uint64_t n_samples  = 0;     ///< T observations (blocks for per-block estimates)
};

/// Empirical Pr(T > t) for t = 0 .. max T.
std::vector<double> empirical_ccdf(const GapHistogram& histogram);

/// Least-squares slope of log Pr(T > n) against n over the n where the empirical CCDF lies in
/// [min_tail_mass, 0.5]; lambda_hat = -slope. min_tail_mass defaults to 50 / samples.
/// @throws estimation_error with fewer than 100 samples or fewer than 2 points in the window.
ExponentEstimate estimate_exponent_tail(const GapHistogram& histogram,
                                        std::optional<double> min_tail_mass = std::nullopt);

/// Geometric MLE from slot-level gaps: q = samples / sum(T), lambda_hat = -log(1 - q).
/// @throws estimation_error on an empty histogram.
ExponentEstimate estimate_exponent_geometric(const GapHistogram& histogram);

/*------------------------------------------------------------------------------------------------*/

struct SchemeTally
{
  SchemeVector  scheme;
  std::uint64_t blocks        = 0;
  std::uint64_t first_decodes = 0;

  double p_d_hat() const noexcept
  {
    return blocks == 0 ? 0.0 : static_cast<double>(first_decodes) / static_cast<double>(blocks);
  }
};

/// Outcome of one simulation run.
///
/// t_histogram holds T samples in t_unit ("slot" or "block"). The first sample is measured from
/// time 0; the open interval after the last decoding instant is censored and reported as
/// censored_tail, so the histogram total equals decode_events.
struct SimReport
{
  std::string   engine;
  std::uint64_t seed          = 0;
  double        p             = 0.0;
  int           block_length  = 1;     ///< d; 1 for slot-level engines
  std::uint64_t slots         = 0;
  std::uint64_t blocks        = 0;     ///< 0 for slot-level engines
  std::uint64_t received      = 0;
  std::uint64_t total_rank    = 0;
  std::uint64_t decoded_prefix = 0;

  double                tau_hat = 0.0;
  std::optional<double> p_d_hat;
  ExponentEstimate      exponent;

  std::string   t_unit = "slot";
  GapHistogram  t_histogram;
  std::uint64_t decode_events = 0;
  std::uint64_t censored_tail = 0;

  /// Block engines: gaps in slots between instants at which the decoded prefix grew.
  GapHistogram slot_gap_histogram;

  std::vector<SchemeTally> per_scheme;
  std::vector<std::string> warnings;
};

/// Block-wise feedback with a fixed scheme. T counts blocks between blocks that decode their first
/// unseen packet; lambda_hat = -log(1 - p_d_hat)/d.
SimReport simulate_time_invariant(const SchemeVector& x, const ChannelParams& params,
                                  std::uint64_t n_blocks);

/// Per-block random choice among the mixture's schemes, drawn from a substream independent of
/// the erasures. lambda_hat = -(1/d) sum_i w_i log(1 - p_d_hat_i) over realised block fractions.
SimReport simulate_mixture(const MixtureSpec& spec, const ChannelParams& params,
                           std::uint64_t n_blocks);

/// No feedback. T in slots; lambda_hat by tail regression.
SimReport simulate_full_rank(const FullRankConfig& cfg, const ChannelParams& params);

/// Immediate feedback: resend the lowest unseen packet until it gets through.
SimReport simulate_arq(const ChannelParams& params, std::uint64_t n_slots);

} // namespace streamdelay
