#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamdelay/analytics.hpp"
#include "streamdelay/envelope.hpp"
#include "streamdelay/io.hpp"
#include "streamdelay/simulator.hpp"

namespace streamdelay::cli {

namespace {

/// A rejected parameter; carries the flag it came from and the exit status to report.
struct FlagError : std::runtime_error
{
  FlagError(const std::string& flag, const std::string& what, int code)
    : std::runtime_error(flag + ": " + what), status{code}
  {}
  int status;
};

[[noreturn]] void
usage(const std::string& flag, const std::string& what)
{
  throw FlagError(flag, what, exit_usage);
}

/// Runs f, turning any domain or validation failure into a FlagError naming `flag`.
template <typename F>
auto
checked(const std::string& flag, F&& f) -> decltype(f())
{
  try
  {
    return f();
  }
  catch (const FlagError&)
  {
    throw;
  }
  catch (const std::exception& e)
  {
    throw FlagError(flag, e.what(), exit_domain);
  }
}

std::vector<std::string>
split(const std::string& text, char sep)
{
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, sep);) parts.push_back(part);
  return parts;
}

double
to_double(const std::string& flag, const std::string& text)
{
  std::size_t used = 0;
  double v = 0.0;
  try
  {
    v = std::stod(text, &used);
  }
  catch (const std::exception&)
  {
    usage(flag, "'" + text + "' is not a number");
  }
  if (used != text.size())
  {
    usage(flag, "'" + text + "' is not a number");
  }
  return v;
}

std::uint64_t
to_count(const std::string& flag, const std::string& text)
{
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
  {
    usage(flag, "'" + text + "' is not a non-negative integer");
  }
  return std::stoull(text);
}

/// "a:b:step" -> a, a+step, ..., up to b inclusive.
std::vector<double>
parse_grid(const std::string& flag, const std::string& text)
{
  const auto parts = split(text, ':');
  if (parts.size() != 3)
  {
    usage(flag, "expected start:stop:step, got '" + text + "'");
  }
  const double a = to_double(flag, parts[0]);
  const double b = to_double(flag, parts[1]);
  const double step = to_double(flag, parts[2]);
  if (!(step > 0.0) || !(b >= a))
  {
    throw FlagError(flag, "need step > 0 and stop >= start", exit_domain);
  }
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = a + static_cast<double>(i) * step;
  return grid;
}

/// Writes through `emit` to `path`, or to `out` when path is "-".
void
write_output(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& emit)
{
  if (path == "-")
  {
    emit(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file)
  {
    throw FlagError("--output", "cannot open '" + path + "' for writing", exit_domain);
  }
  emit(file);
}

void
check_format(const std::string& format)
{
  if (format != "csv" && format != "json")
  {
    usage("--format", "must be csv or json, got '" + format + "'");
  }
}

/*------------------------------------------------------------------------------------------------*/

struct TradeoffArgs
{
  double      p = 0.0;
  std::string scheme;
  bool        arq = false;
  bool        no_feedback = false;
  std::string r_grid;
  bool        suggested = false;
  int         d = 0;
  std::string output = "-";
  std::string format = "csv";
};

void
cmd_tradeoff(const TradeoffArgs& a, std::ostream& out)
{
  check_format(a.format);
  checked("-p", [&] { require_probability(a.p); });
  if (a.scheme.empty() && !a.arq && !a.no_feedback && !a.suggested)
  {
    usage("tradeoff", "choose at least one of --scheme, --arq, --no-feedback, --suggested");
  }
  if (!a.r_grid.empty() && !a.no_feedback)
  {
    usage("--r-grid", "only meaningful with --no-feedback");
  }
  if (a.suggested && a.d == 0)
  {
    usage("-d", "--suggested needs the block length -d");
  }

  std::vector<TradeoffPoint> points;
  if (!a.scheme.empty())
  {
    const auto x = checked("--scheme", [&] { return SchemeVector::parse(a.scheme); });
    points.push_back(checked("--scheme", [&] { return tradeoff_point(x, a.p); }));
  }
  if (a.arq)
  {
    points.push_back(arq_point(a.p));
  }
  if (a.no_feedback)
  {
    // default sweep stays strictly below capacity
    const std::string grid_text = a.r_grid.empty() ? "0.01:" + format_number(a.p - 0.01) + ":0.01" : a.r_grid;
    for (const double r : parse_grid("--r-grid", grid_text))
    {
      points.push_back(checked("--r-grid", [&] { return no_feedback_point(r, a.p); }));
    }
  }
  if (a.suggested)
  {
    checked("-d", [&] {
      if (a.d < 1) throw std::invalid_argument("block length must be at least 1");
    });
    for (int k = 1; k <= a.d; ++k)
    {
      points.push_back(suggested_point(SuggestedSchemeParams{a.d, k, std::nullopt}, a.p));
    }
  }

  write_output(a.output, out, [&](std::ostream& os) {
    if (a.format == "csv") write_tradeoff_csv(os, points);
    else write_tradeoff_json(os, a.p, points);
  });
}

/*------------------------------------------------------------------------------------------------*/

struct EnvelopeArgs
{
  double      p = 0.0;
  int         d = 0;
  int         cap = default_scheme_cap;
  bool        no_dedupe = false;
  unsigned    threads = 1;
  std::string output = "-";
  std::string format = "csv";
};

void
cmd_envelope(const EnvelopeArgs& a, std::ostream& out)
{
  check_format(a.format);
  checked("-p", [&] { require_probability(a.p); });
  const auto schemes = checked("-d", [&] { return enumerate_schemes(a.d, !a.no_dedupe, a.cap); });
  const auto result = upper_envelope(evaluate_schemes(schemes, a.p, a.threads));
  write_output(a.output, out, [&](std::ostream& os) {
    if (a.format == "csv") write_envelope_csv(os, result);
    else write_envelope_json(os, a.p, a.d, result);
  });
}

/*------------------------------------------------------------------------------------------------*/

struct SimulateArgs
{
  std::string   engine;
  double        p = 0.0;
  std::uint64_t slots = 1000000;
  std::uint64_t blocks = 100000;
  std::uint64_t seed = 0;
  double        r = 0.0;
  std::string   schedule;
  std::string   scheme;
  std::string   mixture;
  std::string   weights;
  std::string   output = "-";
  std::string   hist;
};

FullRankConfig
full_rank_config(const SimulateArgs& a, bool r_given)
{
  if (!a.schedule.empty())
  {
    if (r_given) usage("--schedule", "give either -r or --schedule, not both");
    std::vector<RateSegment> segs;
    for (const auto& item : split(a.schedule, ','))
    {
      const auto parts = split(item, ':');
      if (parts.size() != 2) usage("--schedule", "expected rate:slots[,rate:slots...], got '" + a.schedule + "'");
      segs.push_back(RateSegment{to_double("--schedule", parts[0]), to_count("--schedule", parts[1])});
    }
    return checked("--schedule", [&] { return FullRankConfig::piecewise(std::move(segs)); });
  }
  if (!r_given) usage("-r", "full-rank needs an introduction rate -r or a --schedule");
  return checked("-r", [&] { return FullRankConfig::constant(a.r, a.slots); });
}

MixtureSpec
mixture_spec(const SimulateArgs& a)
{
  if (a.mixture.empty()) usage("--mixture", "mixture engine needs --mixture x1;x2;...");
  if (a.weights.empty()) usage("--weights", "mixture engine needs --weights w1,w2,...");
  std::vector<SchemeVector> schemes;
  for (const auto& s : split(a.mixture, ';'))
  {
    schemes.push_back(checked("--mixture", [&] { return SchemeVector::parse(s); }));
  }
  std::vector<double> w;
  for (const auto& s : split(a.weights, ',')) w.push_back(to_double("--weights", s));
  return checked("--weights", [&] { return MixtureSpec(std::move(schemes), std::move(w)); });
}

void
cmd_simulate(const SimulateArgs& a, bool r_given, std::ostream& out)
{
  const auto params = checked("-p", [&] { return ChannelParams(a.p, a.seed); });
  if (a.slots == 0) throw FlagError("-n", "need at least one slot", exit_domain);
  if (a.blocks == 0) throw FlagError("--blocks", "need at least one block", exit_domain);

  SimReport report;
  if (a.engine == "arq")
  {
    report = simulate_arq(params, a.slots);
  }
  else if (a.engine == "full-rank")
  {
    report = simulate_full_rank(full_rank_config(a, r_given), params);
  }
  else if (a.engine == "scheme")
  {
    if (a.scheme.empty()) usage("--scheme", "scheme engine needs --scheme x1,...,xd");
    const auto x = checked("--scheme", [&] { return SchemeVector::parse(a.scheme); });
    report = simulate_time_invariant(x, params, a.blocks);
  }
  else
  {
    report = simulate_mixture(mixture_spec(a), params, a.blocks);
  }

  write_output(a.output, out, [&](std::ostream& os) { write_report_json(os, report); });
  if (!a.hist.empty())
  {
    write_output(a.hist, out, [&](std::ostream& os) { write_histogram_csv(os, report.t_histogram); });
  }
}

/*------------------------------------------------------------------------------------------------*/

struct CostArgs
{
  double      p = 0.0;
  int         d_min = 1;
  int         d_max = 20;
  std::string output = "-";
};

void
cmd_cost_curves(const CostArgs& a, std::ostream& out)
{
  checked("-p", [&] { require_probability(a.p); });
  if (a.d_min < 1) throw FlagError("--d-min", "must be at least 1", exit_domain);
  if (a.d_max < a.d_min) throw FlagError("--d-max", "must not be below --d-min", exit_domain);
  write_output(a.output, out, [&](std::ostream& os) { write_cost_curves_csv(os, a.p, a.d_min, a.d_max); });
}

/*------------------------------------------------------------------------------------------------*/

int
cmd_validate(const std::vector<std::string>& files, std::ostream& out, std::ostream& err)
{
  int status = exit_ok;
  for (const auto& path : files)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
      err << path << ": cannot open\n";
      status = exit_domain;
      continue;
    }
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const auto diagnostics = validate_document(text);
    if (diagnostics.empty())
    {
      out << path << ": ok\n";
      continue;
    }
    status = exit_domain;
    for (const auto& d : diagnostics) err << path << ": " << d << '\n';
  }
  return status;
}

} // namespace

/*------------------------------------------------------------------------------------------------*/

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Throughput / in-order decoding exponent trade-offs for streaming codes"};
  app.name("streamdelay");
  app.require_subcommand(1);

  TradeoffArgs ta;
  auto* tradeoff = app.add_subcommand("tradeoff", "(tau, lambda) rows for schemes and closed-form families");
  tradeoff->add_option("-p", ta.p, "success probability per slot")->required();
  tradeoff->add_option("--scheme", ta.scheme, "time-invariant scheme, e.g. 1,0,3,0");
  tradeoff->add_flag("--arq", ta.arq, "immediate-feedback point");
  tradeoff->add_flag("--no-feedback", ta.no_feedback, "full-rank curve (r, D(r||p))");
  tradeoff->add_option("--r-grid", ta.r_grid, "start:stop:step for --no-feedback");
  tradeoff->add_flag("--suggested", ta.suggested, "suggested family a = 1..d");
  tradeoff->add_option("-d", ta.d, "block length for --suggested");
  tradeoff->add_option("-o,--output", ta.output, "output file, - for stdout");
  tradeoff->add_option("--format", ta.format, "csv or json");

  EnvelopeArgs ea;
  auto* envelope = app.add_subcommand("envelope", "scheme points and their upper envelope for one d");
  envelope->add_option("-p", ea.p, "success probability per slot")->required();
  envelope->add_option("-d", ea.d, "block length")->required();
  envelope->add_option("--cap", ea.cap, "largest d accepted");
  envelope->add_flag("--no-dedupe", ea.no_dedupe, "keep schemes with equal canonical form");
  envelope->add_option("--threads", ea.threads, "worker threads for scheme evaluation");
  envelope->add_option("-o,--output", ea.output, "output file, - for stdout");
  envelope->add_option("--format", ea.format, "csv or json");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run; writes a JSON report");
  simulate->add_option("engine", sa.engine, "arq | full-rank | scheme | mixture")
    ->required()
    ->check(CLI::IsMember({"arq", "full-rank", "scheme", "mixture"}));
  simulate->add_option("-p", sa.p, "success probability per slot")->required();
  simulate->add_option("-n,--slots", sa.slots, "slots for arq and full-rank");
  simulate->add_option("--blocks", sa.blocks, "blocks for scheme and mixture");
  simulate->add_option("--seed", sa.seed, "master seed");
  auto* r_opt = simulate->add_option("-r", sa.r, "full-rank introduction rate");
  simulate->add_option("--schedule", sa.schedule, "full-rank rate:slots,rate:slots,...");
  simulate->add_option("--scheme", sa.scheme, "scheme for the scheme engine");
  simulate->add_option("--mixture", sa.mixture, "schemes separated by ';', e.g. 2,0;1,1");
  simulate->add_option("--weights", sa.weights, "mixture weights, e.g. 0.5,0.5");
  simulate->add_option("-o,--output", sa.output, "report file, - for stdout");
  simulate->add_option("--hist", sa.hist, "T histogram CSV file");

  CostArgs ca;
  auto* cost = app.add_subcommand("cost-curves", "best tau at optimal lambda and best lambda at optimal tau, per d");
  cost->add_option("-p", ca.p, "success probability per slot")->required();
  cost->add_option("--d-min", ca.d_min, "first block length");
  cost->add_option("--d-max", ca.d_max, "last block length");
  cost->add_option("-o,--output", ca.output, "output file, - for stdout");

  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "check files written by the other commands");
  validate->add_option("files", files, "CSV or JSON files")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try
  {
    if (tradeoff->parsed()) cmd_tradeoff(ta, out);
    else if (envelope->parsed()) cmd_envelope(ea, out);
    else if (simulate->parsed()) cmd_simulate(sa, r_opt->count() > 0, out);
    else if (cost->parsed()) cmd_cost_curves(ca, out);
    else if (validate->parsed()) return cmd_validate(files, out, err);
  }
  catch (const FlagError& e)
  {
    err << "error: " << e.what() << '\n';
    return e.status;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return exit_domain;
  }
  return exit_ok;
}

} // namespace streamdelay::cli
