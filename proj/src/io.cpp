#include "streamdelay/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace streamdelay {

using nlohmann::json;

namespace {

json
number(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json
point_json(const TradeoffPoint& pt)
{
  json j = {{"provenance", pt.provenance}, {"tau", number(pt.tau)}, {"lambda", number(pt.lambda)}};
  if (pt.scheme)
  {
    j["scheme"] = pt.scheme->entries();
  }
  return j;
}

json
histogram_json(const GapHistogram& histogram)
{
  json rows = json::array();
  for (const auto& [t, count] : histogram)
  {
    rows.push_back({t, count});
  }
  return rows;
}

std::string
scheme_cell(const TradeoffPoint& pt)
{
  return pt.scheme ? pt.scheme->label() : pt.provenance;
}

void
dump(std::ostream& os, const json& j)
{
  os << j.dump(2) << '\n';
}

/*------------------------------------------------------------------------------------------------*/
// validation

struct Diagnostics
{
  std::vector<std::string> list;

  void add(std::string msg) { list.push_back(std::move(msg)); }
  void at(std::size_t line, const std::string& msg) { add("line " + std::to_string(line) + ": " + msg); }
};

std::vector<std::string>
split(std::string_view line, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true)
  {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool
parse_double(const std::string& cell, double& value)
{
  if (cell.empty()) return false;
  char* end = nullptr;
  value = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

bool
parse_count(const std::string& cell, std::uint64_t& value)
{
  if (cell.empty() || !std::all_of(cell.begin(), cell.end(), [](char c) { return c >= '0' && c <= '9'; }))
  {
    return false;
  }
  value = std::stoull(cell);
  return true;
}

using Table = std::vector<std::vector<std::string>>;

/// Rows after the header, each with the header's width; bad widths are reported and skipped.
Table
read_rows(const std::vector<std::string>& lines, std::size_t width, Diagnostics& diag,
          std::vector<std::size_t>& line_numbers)
{
  Table rows;
  for (std::size_t i = 1; i < lines.size(); ++i)
  {
    auto cells = split(lines[i], ',');
    if (cells.size() != width)
    {
      diag.at(i + 1, "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
      continue;
    }
    rows.push_back(std::move(cells));
    line_numbers.push_back(i + 1);
  }
  return rows;
}

bool
nonneg_field(const std::string& cell, const char* name, std::size_t line, Diagnostics& diag, double& v)
{
  if (!parse_double(cell, v) || !std::isfinite(v))
  {
    diag.at(line, std::string(name) + " is not a finite number: '" + cell + "'");
    return false;
  }
  if (v < 0.0)
  {
    diag.at(line, std::string(name) + " is negative");
    return false;
  }
  return true;
}

void
check_tradeoff_csv(const std::vector<std::string>& lines, Diagnostics& diag)
{
  std::vector<std::size_t> ln;
  const auto rows = read_rows(lines, 3, diag, ln);
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    double tau = 0.0;
    double lambda = 0.0;
    if (rows[i][0].empty()) diag.at(ln[i], "empty provenance");
    nonneg_field(rows[i][1], "tau", ln[i], diag, tau);
    nonneg_field(rows[i][2], "lambda", ln[i], diag, lambda);
  }
}

void
check_envelope_csv(const std::vector<std::string>& lines, Diagnostics& diag)
{
  std::vector<std::size_t> ln;
  const auto rows = read_rows(lines, 4, diag, ln);
  std::vector<TradeoffPoint> all;
  std::vector<TradeoffPoint> marked;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    double tau = 0.0;
    double lambda = 0.0;
    if (!nonneg_field(rows[i][1], "tau", ln[i], diag, tau) || !nonneg_field(rows[i][2], "lambda", ln[i], diag, lambda))
    {
      continue;
    }
    TradeoffPoint pt{tau, lambda, rows[i][0], std::nullopt};
    if (rows[i][3] == "1")
    {
      marked.push_back(pt);
    }
    else if (rows[i][3] != "0")
    {
      diag.at(ln[i], "on_envelope must be 0 or 1");
    }
    all.push_back(pt);
  }
  if (marked.empty())
  {
    diag.add("no row is marked as an envelope vertex");
    return;
  }
  std::sort(marked.begin(), marked.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  for (std::size_t k = 1; k < marked.size(); ++k)
  {
    if (!(marked[k].tau > marked[k - 1].tau) || !(marked[k].lambda < marked[k - 1].lambda))
    {
      diag.add("envelope vertices are not strictly increasing in tau and decreasing in lambda");
      break;
    }
  }
  // rebuild the piecewise-linear curve from the marked rows and check dominance
  EnvelopeResult env;
  env.vertices = marked;
  for (std::size_t k = 0; k + 1 < marked.size(); ++k)
  {
    env.segments.push_back(EnvelopeSegment{marked[k], marked[k + 1]});
  }
  for (const auto& pt : all)
  {
    if (pt.lambda > env.lambda_at(pt.tau) + 1e-9)
    {
      diag.add("point " + pt.provenance + " lies above the envelope");
    }
  }
}

void
check_histogram_csv(const std::vector<std::string>& lines, Diagnostics& diag)
{
  std::vector<std::size_t> ln;
  const auto rows = read_rows(lines, 3, diag, ln);
  std::vector<std::uint64_t> counts;
  std::vector<double> ccdf;
  std::uint64_t last_t = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    std::uint64_t t = 0;
    std::uint64_t c = 0;
    double tail = 0.0;
    if (!parse_count(rows[i][0], t) || t == 0)
    {
      diag.at(ln[i], "t must be a positive integer");
      return;
    }
    if (t <= last_t)
    {
      diag.at(ln[i], "t values must be strictly increasing");
    }
    last_t = t;
    if (!parse_count(rows[i][1], c) || c == 0)
    {
      diag.at(ln[i], "count must be a positive integer");
      return;
    }
    if (!parse_double(rows[i][2], tail) || tail < 0.0 || tail > 1.0)
    {
      diag.at(ln[i], "ccdf must lie in [0, 1]");
      return;
    }
    counts.push_back(c);
    ccdf.push_back(tail);
  }
  std::uint64_t total = 0;
  for (const auto c : counts) total += c;
  std::uint64_t above = total;
  for (std::size_t i = 0; i < counts.size(); ++i)
  {
    above -= counts[i];
    const double expect = static_cast<double>(above) / static_cast<double>(total);
    if (std::abs(expect - ccdf[i]) > 1e-9)
    {
      diag.at(ln[i], "ccdf " + rows[i][2] + " disagrees with the counts (expected " + format_number(expect) + ")");
    }
  }
}

void
check_cost_curves_csv(const std::vector<std::string>& lines, Diagnostics& diag)
{
  std::vector<std::size_t> ln;
  const auto rows = read_rows(lines, 5, diag, ln);
  std::uint64_t prev_d = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    std::uint64_t d = 0;
    if (!parse_count(rows[i][0], d) || d == 0)
    {
      diag.at(ln[i], "d must be a positive integer");
      continue;
    }
    if (i > 0 && d != prev_d + 1)
    {
      diag.at(ln[i], "d values must be consecutive");
    }
    prev_d = d;
    double v[4];
    static const char* names[] = {"tau_opt_lambda", "lambda_opt_lambda", "tau_opt_tau", "lambda_opt_tau"};
    bool ok = true;
    for (int k = 0; k < 4; ++k)
    {
      ok = nonneg_field(rows[i][k + 1], names[k], ln[i], diag, v[k]) && ok;
    }
    if (ok && (v[0] > v[2] + 1e-12 || v[3] > v[1] + 1e-12))
    {
      diag.at(ln[i], "optimal-lambda curve must not beat the optimal-tau curve on throughput, nor the reverse");
    }
  }
}

template <typename F>
void
guarded(Diagnostics& diag, F&& f)
{
  try
  {
    f();
  }
  catch (const json::exception& e)
  {
    diag.add(std::string("malformed document: ") + e.what());
  }
}

void
check_point_list(const json& points, const char* what, std::optional<double> p, Diagnostics& diag)
{
  if (!points.is_array())
  {
    diag.add(std::string(what) + " must be an array");
    return;
  }
  for (const auto& pt : points)
  {
    const double tau = pt.at("tau").get<double>();
    const double lambda = pt.at("lambda").get<double>();
    if (!(tau >= 0.0) || !(lambda >= 0.0))
    {
      diag.add(std::string(what) + ": negative tau or lambda in " + pt.value("provenance", "?"));
    }
    if (p && (tau > *p + 1e-12 || lambda > -std::log1p(-*p) + 1e-12))
    {
      diag.add(std::string(what) + ": " + pt.value("provenance", "?") + " lies outside the capacity box");
    }
  }
}

void
check_report_json(const json& j, Diagnostics& diag)
{
  const auto slots = j.at("slots").get<std::uint64_t>();
  const auto received = j.at("received").get<std::uint64_t>();
  const auto rank = j.at("total_rank").get<std::uint64_t>();
  const auto decoded = j.at("decoded_prefix").get<std::uint64_t>();
  if (!(rank <= received && received <= slots))
  {
    diag.add("conservation violated: need total_rank <= received <= slots");
  }
  if (decoded > rank)
  {
    diag.add("decoded_prefix exceeds total_rank");
  }
  const double tau = j.at("tau_hat").get<double>();
  if (!(tau >= 0.0 && tau <= 1.0))
  {
    diag.add("tau_hat outside [0, 1]");
  }
  std::uint64_t total = 0;
  for (const auto& row : j.at("t_histogram"))
  {
    if (!row.is_array() || row.size() != 2)
    {
      diag.add("t_histogram rows must be [t, count] pairs");
      return;
    }
    total += row[1].get<std::uint64_t>();
  }
  if (total != j.at("decode_events").get<std::uint64_t>())
  {
    diag.add("t_histogram total differs from decode_events");
  }
  const auto& exponent = j.at("exponent");
  if (!exponent.at("lambda_hat").is_null() && exponent.at("lambda_hat").get<double>() < 0.0)
  {
    diag.add("negative lambda_hat");
  }
}

void
check_json(std::string_view text, Diagnostics& diag)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    diag.add(std::string("not valid JSON: ") + e.what());
    return;
  }
  if (!j.is_object() || !j.contains("kind"))
  {
    diag.add("JSON document has no \"kind\" field");
    return;
  }
  const auto kind = j["kind"].get<std::string>();
  guarded(diag, [&] {
    if (kind == "sim-report")
    {
      check_report_json(j, diag);
    }
    else if (kind == "tradeoff")
    {
      check_point_list(j.at("points"), "points", j.at("p").get<double>(), diag);
    }
    else if (kind == "envelope")
    {
      const double p = j.at("p").get<double>();
      check_point_list(j.at("points"), "points", p, diag);
      check_point_list(j.at("vertices"), "vertices", p, diag);
      const auto& v = j.at("vertices");
      for (std::size_t k = 1; k < v.size(); ++k)
      {
        if (!(v[k].at("tau").get<double>() > v[k - 1].at("tau").get<double>())
            || !(v[k].at("lambda").get<double>() < v[k - 1].at("lambda").get<double>()))
        {
          diag.add("vertices are not strictly increasing in tau and decreasing in lambda");
          break;
        }
      }
      if (j.at("segments").size() + 1 != std::max<std::size_t>(v.size(), 1))
      {
        diag.add("segment count must be one less than the vertex count");
      }
    }
    else
    {
      diag.add("unknown document kind '" + kind + "'");
    }
  });
}

} // namespace

/*------------------------------------------------------------------------------------------------*/

std::string
format_number(double value)
{
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void
write_tradeoff_csv(std::ostream& os, std::span<const TradeoffPoint> points)
{
  os << "provenance,tau,lambda\n";
  for (const auto& pt : points)
  {
    os << pt.provenance << ',' << format_number(pt.tau) << ',' << format_number(pt.lambda) << '\n';
  }
}

void
write_envelope_csv(std::ostream& os, const EnvelopeResult& result)
{
  os << "scheme,tau,lambda,on_envelope\n";
  for (const auto& pt : result.all_points)
  {
    os << scheme_cell(pt) << ',' << format_number(pt.tau) << ',' << format_number(pt.lambda) << ','
       << (result.is_vertex(pt) ? 1 : 0) << '\n';
  }
}

void
write_histogram_csv(std::ostream& os, const GapHistogram& histogram)
{
  os << "t,count,ccdf\n";
  std::uint64_t total = 0;
  for (const auto& [t, count] : histogram) total += count;
  std::uint64_t above = total;
  for (const auto& [t, count] : histogram)
  {
    above -= count;
    os << t << ',' << count << ',' << format_number(static_cast<double>(above) / static_cast<double>(total)) << '\n';
  }
}

void
write_cost_curves_csv(std::ostream& os, double p, int d_min, int d_max)
{
  require_probability(p);
  if (d_min < 1 || d_max < d_min)
  {
    throw std::invalid_argument("block length range must satisfy 1 <= d_min <= d_max");
  }
  os << "d,tau_opt_lambda,lambda_opt_lambda,tau_opt_tau,lambda_opt_tau\n";
  for (int d = d_min; d <= d_max; ++d)
  {
    const auto a = cost_of_optimal_lambda(p, d);
    const auto b = cost_of_optimal_tau(p, d);
    os << d << ',' << format_number(a.tau) << ',' << format_number(a.lambda) << ',' << format_number(b.tau)
       << ',' << format_number(b.lambda) << '\n';
  }
}

/*------------------------------------------------------------------------------------------------*/

void
write_tradeoff_json(std::ostream& os, double p, std::span<const TradeoffPoint> points)
{
  json j = {{"kind", "tradeoff"}, {"p", p}, {"points", json::array()}};
  for (const auto& pt : points) j["points"].push_back(point_json(pt));
  dump(os, j);
}

void
write_envelope_json(std::ostream& os, double p, int d, const EnvelopeResult& result)
{
  json j = {{"kind", "envelope"}, {"p", p}, {"d", d}};
  j["points"] = json::array();
  for (const auto& pt : result.all_points)
  {
    auto row = point_json(pt);
    row["on_envelope"] = result.is_vertex(pt);
    j["points"].push_back(std::move(row));
  }
  j["vertices"] = json::array();
  for (const auto& v : result.vertices) j["vertices"].push_back(point_json(v));
  j["segments"] = json::array();
  j["mixtures"] = json::array();
  for (const auto& seg : result.segments)
  {
    j["segments"].push_back({{"left", point_json(seg.left)}, {"right", point_json(seg.right)},
                             {"slope", number(seg.slope())}});
    // time-sharing the two ends with weight mu on the left end reaches
    // tau = mu tau_left + (1 - mu) tau_right at the same mixture of lambdas
    json mix = {{"left", scheme_cell(seg.left)}, {"right", scheme_cell(seg.right)},
                {"tau_range", {number(seg.left.tau), number(seg.right.tau)}},
                {"lambda_range", {number(seg.left.lambda), number(seg.right.lambda)}}};
    j["mixtures"].push_back(std::move(mix));
  }
  dump(os, j);
}

void
write_report_json(std::ostream& os, const SimReport& r)
{
  json j = {
    {"kind", "sim-report"},
    {"engine", r.engine},
    {"seed", r.seed},
    {"p", r.p},
    {"block_length", r.block_length},
    {"slots", r.slots},
    {"blocks", r.blocks},
    {"received", r.received},
    {"total_rank", r.total_rank},
    {"decoded_prefix", r.decoded_prefix},
    {"tau_hat", number(r.tau_hat)},
    {"p_d_hat", r.p_d_hat ? number(*r.p_d_hat) : json(nullptr)},
    {"exponent",
     {{"lambda_hat", number(r.exponent.lambda_hat)},
      {"std_error", number(r.exponent.std_error)},
      {"method", r.exponent.method},
      {"n_samples", r.exponent.n_samples}}},
    {"t_unit", r.t_unit},
    {"decode_events", r.decode_events},
    {"censored_tail", r.censored_tail},
    {"t_histogram", histogram_json(r.t_histogram)},
    {"slot_gap_histogram", histogram_json(r.slot_gap_histogram)},
    {"warnings", r.warnings},
  };
  j["per_scheme"] = json::array();
  for (const auto& tally : r.per_scheme)
  {
    j["per_scheme"].push_back({{"scheme", tally.scheme.entries()},
                               {"blocks", tally.blocks},
                               {"first_decodes", tally.first_decodes},
                               {"p_d_hat", number(tally.p_d_hat())}});
  }
  dump(os, j);
}

/*------------------------------------------------------------------------------------------------*/

std::vector<std::string>
validate_document(std::string_view text)
{
  Diagnostics diag;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
  {
    diag.add("empty document");
    return diag.list;
  }
  if (text[first] == '{')
  {
    check_json(text, diag);
    return diag.list;
  }

  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);)
  {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  const std::string& header = lines.front();
  if (header == "provenance,tau,lambda")
  {
    check_tradeoff_csv(lines, diag);
  }
  else if (header == "scheme,tau,lambda,on_envelope")
  {
    check_envelope_csv(lines, diag);
  }
  else if (header == "t,count,ccdf")
  {
    check_histogram_csv(lines, diag);
  }
  else if (header == "d,tau_opt_lambda,lambda_opt_lambda,tau_opt_tau,lambda_opt_tau")
  {
    check_cost_curves_csv(lines, diag);
  }
  else
  {
    diag.add("unrecognised CSV header '" + header + "'");
  }
  return diag.list;
}

} // namespace streamdelay
