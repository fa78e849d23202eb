#include "streamdelay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "streamdelay/receiver.hpp"

namespace streamdelay {

namespace {

std::mt19937_64
substream(std::uint64_t seed, std::uint32_t label)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), label};
  return std::mt19937_64(seq);
}

/// ceil(x) that treats x within rounding noise of an integer as that integer.
std::uint64_t
ceil_rounded(double x)
{
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)))
  {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::ceil(x));
}

/// Tracks decoding instants and turns them into a gap histogram with a censored tail.
class GapRecorder
{
public:

  void event(std::uint64_t now)
  {
    ++histogram_[now - last_];
    last_ = now;
    ++events_;
  }

  void finish(std::uint64_t end, GapHistogram& histogram, std::uint64_t& events, std::uint64_t& censored)
  {
    histogram = std::move(histogram_);
    events = events_;
    censored = end - last_;
  }

private:

  GapHistogram  histogram_;
  std::uint64_t last_   = 0;
  std::uint64_t events_ = 0;
};

void
check_invariants(const ReceiverState& rx)
{
  if (rx.decoded_prefix() > rx.seen_prefix())
  {
    throw std::logic_error("decoded prefix overtook seen prefix");
  }
}

/// One block of a time-invariant scheme, run against a shared receiver.
struct BlockRunner
{
  explicit BlockRunner(const SchemeVector& x)
    : levels{x.slot_levels()}
    , boundary(levels.size())
  {
    for (std::size_t t = 0; t < levels.size(); ++t)
    {
      boundary[t] = t + 1 == levels.size() || levels[t + 1] != levels[t];
    }
  }

  /// @return whether the block decoded its first unseen packet.
  bool run(ErasureChannel& channel, ReceiverState& rx, SimReport& report, GapRecorder& slot_gaps)
  {
    const std::uint64_t seen = rx.seen_prefix(); // sender's view at the last feedback
    int rank = 0;
    int count = 0;
    bool first_decode = false;
    for (std::size_t t = 0; t < levels.size(); ++t)
    {
      ++report.slots;
      if (channel())
      {
        ++report.received;
        ++count;
        if (rank < levels[t])
        {
          ++rank;
          if (rx.add_innovative(seen + static_cast<std::uint64_t>(levels[t])))
          {
            slot_gaps.event(report.slots);
          }
          check_invariants(rx);
        }
      }
      if (boundary[t] && count >= levels[t])
      {
        first_decode = true;
      }
    }
    return first_decode;
  }

  std::vector<int>  levels;
  std::vector<bool> boundary;
};

void
finish_block_report(SimReport& report, const ReceiverState& rx, GapRecorder& block_gaps,
                    GapRecorder& slot_gaps, std::uint64_t slot_end)
{
  report.total_rank = rx.rank();
  report.decoded_prefix = rx.decoded_prefix();
  report.tau_hat = report.slots == 0 ? 0.0 : static_cast<double>(report.total_rank) / report.slots;
  report.t_unit = "block";
  block_gaps.finish(report.blocks, report.t_histogram, report.decode_events, report.censored_tail);
  std::uint64_t ignored_events = 0;
  std::uint64_t ignored_tail = 0;
  slot_gaps.finish(slot_end, report.slot_gap_histogram, ignored_events, ignored_tail);
}

/// Runs an estimator on the report's histogram; a run too short for it gets a NaN exponent and a
/// warning instead of an exception.
template <typename Estimator>
ExponentEstimate
estimate_or_warn(SimReport& report, Estimator&& estimate)
{
  try
  {
    return estimate(report.t_histogram);
  }
  catch (const estimation_error& e)
  {
    report.warnings.push_back(std::string("exponent not estimated: ") + e.what());
    ExponentEstimate est;
    est.lambda_hat = std::numeric_limits<double>::quiet_NaN();
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    est.n_samples = report.decode_events;
    return est;
  }
}

/// Per-block geometric MLE, weighted over the schemes that were used.
ExponentEstimate
block_exponent(const std::vector<SchemeTally>& tallies, std::uint64_t n_blocks, int d,
               std::vector<std::string>& warnings)
{
  ExponentEstimate est;
  est.method = "geometric-mle";
  est.n_samples = n_blocks;
  double lambda = 0.0;
  double variance = 0.0;
  for (const auto& tally : tallies)
  {
    if (tally.blocks == 0)
    {
      continue;
    }
    const double n = static_cast<double>(tally.blocks);
    const double w = n / static_cast<double>(n_blocks);
    double misses = static_cast<double>(tally.blocks - tally.first_decodes);
    if (misses == 0.0)
    {
      warnings.push_back("scheme " + tally.scheme.label()
                         + " never missed a first decode; exponent uses half a miss and is a lower bound");
      misses = 0.5;
    }
    const double q = misses / n;
    lambda += -w * std::log(q);
    variance += w * w * (1.0 - q) / (q * n);
  }
  est.lambda_hat = lambda / d;
  est.std_error = std::sqrt(variance) / d;
  return est;
}

} // namespace

/*------------------------------------------------------------------------------------------------*/

ErasureChannel::ErasureChannel(const ChannelParams& params, std::uint32_t label)
  : gen_{substream(params.seed(), label)}
  , p_{params.p()}
{}

std::vector<bool>
channel_trace(const ChannelParams& params, std::uint64_t n_slots)
{
  if (n_slots < 1)
  {
    throw std::invalid_argument("trace length must be at least one slot");
  }
  ErasureChannel channel(params);
  std::vector<bool> trace(n_slots);
  for (std::uint64_t n = 0; n < n_slots; ++n)
  {
    trace[n] = channel();
  }
  return trace;
}

/*------------------------------------------------------------------------------------------------*/

FullRankConfig
FullRankConfig::constant(double r, std::uint64_t n_slots)
{
  FullRankConfig cfg{{RateSegment{r, n_slots}}};
  cfg.validate();
  return cfg;
}

FullRankConfig
FullRankConfig::piecewise(std::vector<RateSegment> segments)
{
  FullRankConfig cfg{std::move(segments)};
  cfg.validate();
  return cfg;
}

std::uint64_t
FullRankConfig::n_slots()
const noexcept
{
  std::uint64_t n = 0;
  for (const auto& seg : schedule) n += seg.slots;
  return n;
}

double
FullRankConfig::mean_rate()
const noexcept
{
  double sum = 0.0;
  for (const auto& seg : schedule) sum += seg.rate * static_cast<double>(seg.slots);
  const auto n = n_slots();
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

bool
FullRankConfig::exceeds_capacity(double p)
const noexcept
{
  for (const auto& seg : schedule)
  {
    if (seg.rate > p) return true;
  }
  return false;
}

void
FullRankConfig::validate()
const
{
  if (schedule.empty())
  {
    throw std::invalid_argument("full-rank schedule needs at least one segment");
  }
  for (const auto& seg : schedule)
  {
    if (!(seg.rate > 0.0 && seg.rate <= 1.0))
    {
      throw std::invalid_argument("introduction rate r must lie in (0, 1], got " + std::to_string(seg.rate));
    }
    if (seg.slots == 0)
    {
      throw std::invalid_argument("schedule segments must span at least one slot");
    }
  }
}

/*------------------------------------------------------------------------------------------------*/

SimReport
simulate_time_invariant(const SchemeVector& x, const ChannelParams& params, std::uint64_t n_blocks)
{
  if (n_blocks < 1)
  {
    throw std::invalid_argument("simulation needs at least one block");
  }
  SimReport report;
  report.engine = "scheme";
  report.seed = params.seed();
  report.p = params.p();
  report.block_length = x.d();

  ErasureChannel channel(params);
  ReceiverState rx;
  BlockRunner runner(x);
  GapRecorder block_gaps;
  GapRecorder slot_gaps;
  SchemeTally tally{x};

  for (std::uint64_t b = 1; b <= n_blocks; ++b)
  {
    ++report.blocks;
    ++tally.blocks;
    if (runner.run(channel, rx, report, slot_gaps))
    {
      ++tally.first_decodes;
      block_gaps.event(b);
    }
  }

  finish_block_report(report, rx, block_gaps, slot_gaps, report.slots);
  report.p_d_hat = tally.p_d_hat();
  report.per_scheme.push_back(tally);
  report.exponent = block_exponent(report.per_scheme, n_blocks, x.d(), report.warnings);
  return report;
}

SimReport
simulate_mixture(const MixtureSpec& spec, const ChannelParams& params, std::uint64_t n_blocks)
{
  if (n_blocks < 1)
  {
    throw std::invalid_argument("simulation needs at least one block");
  }
  SimReport report;
  report.engine = "mixture";
  report.seed = params.seed();
  report.p = params.p();
  report.block_length = spec.d();

  ErasureChannel channel(params);
  ErasureChannel chooser(params, ErasureChannel::mixture_label);
  ReceiverState rx;
  GapRecorder block_gaps;
  GapRecorder slot_gaps;

  std::vector<BlockRunner> runners;
  for (const auto& s : spec.schemes())
  {
    runners.emplace_back(s);
    report.per_scheme.push_back(SchemeTally{s});
  }
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const double w : spec.weights())
  {
    acc += w;
    cumulative.push_back(acc);
  }

  std::uint64_t first_decodes = 0;
  for (std::uint64_t b = 1; b <= n_blocks; ++b)
  {
    const double u = chooser.uniform();
    std::size_t pick = 0;
    while (pick + 1 < cumulative.size() && u >= cumulative[pick])
    {
      ++pick;
    }
    ++report.blocks;
    auto& tally = report.per_scheme[pick];
    ++tally.blocks;
    if (runners[pick].run(channel, rx, report, slot_gaps))
    {
      ++tally.first_decodes;
      ++first_decodes;
      block_gaps.event(b);
    }
  }

  finish_block_report(report, rx, block_gaps, slot_gaps, report.slots);
  report.p_d_hat = static_cast<double>(first_decodes) / static_cast<double>(n_blocks);
  report.exponent = block_exponent(report.per_scheme, n_blocks, spec.d(), report.warnings);
  return report;
}

/*------------------------------------------------------------------------------------------------*/

SimReport
simulate_full_rank(const FullRankConfig& cfg, const ChannelParams& params)
{
  cfg.validate();
  SimReport report;
  report.engine = "full-rank";
  report.seed = params.seed();
  report.p = params.p();
  if (cfg.exceeds_capacity(params.p()))
  {
    report.warnings.push_back("introduction rate exceeds p; throughput saturates below r");
  }

  ErasureChannel channel(params);
  ReceiverState rx;
  GapRecorder gaps;

  std::uint64_t segment_base = 0;
  for (const auto& seg : cfg.schedule)
  {
    for (std::uint64_t k = 1; k <= seg.slots; ++k)
    {
      const std::uint64_t transmit_index = segment_base + ceil_rounded(seg.rate * static_cast<double>(k));
      ++report.slots;
      if (channel())
      {
        ++report.received;
        // every combination spans packets 1..transmit_index, so it is innovative iff rank < index
        if (rx.rank() < transmit_index)
        {
          if (rx.add_innovative(transmit_index))
          {
            gaps.event(report.slots);
          }
          check_invariants(rx);
        }
      }
    }
    segment_base += ceil_rounded(seg.rate * static_cast<double>(seg.slots));
  }

  report.total_rank = rx.rank();
  report.decoded_prefix = rx.decoded_prefix();
  report.tau_hat = static_cast<double>(report.total_rank) / static_cast<double>(report.slots);
  gaps.finish(report.slots, report.t_histogram, report.decode_events, report.censored_tail);
  report.exponent = estimate_or_warn(report, [](const GapHistogram& h) { return estimate_exponent_tail(h); });
  report.exponent.method = "tail-regression";
  return report;
}

SimReport
simulate_arq(const ChannelParams& params, std::uint64_t n_slots)
{
  if (n_slots < 1)
  {
    throw std::invalid_argument("simulation needs at least one slot");
  }
  SimReport report;
  report.engine = "arq";
  report.seed = params.seed();
  report.p = params.p();

  ErasureChannel channel(params);
  ReceiverState rx;
  GapRecorder gaps;

  for (std::uint64_t n = 1; n <= n_slots; ++n)
  {
    ++report.slots;
    if (channel())
    {
      ++report.received;
      if (rx.add_innovative(rx.rank() + 1))
      {
        gaps.event(n);
      }
      check_invariants(rx);
    }
  }

  report.total_rank = rx.rank();
  report.decoded_prefix = rx.decoded_prefix();
  report.tau_hat = static_cast<double>(report.total_rank) / static_cast<double>(report.slots);
  gaps.finish(report.slots, report.t_histogram, report.decode_events, report.censored_tail);
  report.exponent = estimate_or_warn(report, [](const GapHistogram& h) { return estimate_exponent_geometric(h); });
  report.exponent.method = "geometric-mle";
  return report;
}

} // namespace streamdelay
