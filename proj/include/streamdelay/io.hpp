#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamdelay/envelope.hpp"
#include "streamdelay/model.hpp"
#include "streamdelay/simulator.hpp"

namespace streamdelay {

/// "%.12g"; non-finite values print as nan, inf, -inf.
std::string format_number(double value);

/*------------------------------------------------------------------------------------------------*/
// CSV writers. Every table starts with its header row.

/// provenance,tau,lambda
void write_tradeoff_csv(std::ostream& os, std::span<const TradeoffPoint> points);

/// scheme,tau,lambda,on_envelope
void write_envelope_csv(std::ostream& os, const EnvelopeResult& result);

/// t,count,ccdf  where ccdf = Pr(T > t) over the histogram.
void write_histogram_csv(std::ostream& os, const GapHistogram& histogram);

/// d,tau_opt_lambda,lambda_opt_lambda,tau_opt_tau,lambda_opt_tau for d = d_min..d_max.
void write_cost_curves_csv(std::ostream& os, double p, int d_min, int d_max);

/*------------------------------------------------------------------------------------------------*/
// JSON writers (two-space indent, trailing newline). NaN and infinities become null.

/// {"kind":"tradeoff", "p":..., "points":[{provenance,tau,lambda,scheme?}...]}
void write_tradeoff_json(std::ostream& os, double p, std::span<const TradeoffPoint> points);

/// {"kind":"envelope", "p", "d", "points", "vertices", "segments", "mixtures"}
void write_envelope_json(std::ostream& os, double p, int d, const EnvelopeResult& result);

/// {"kind":"sim-report", ...} with every SimReport field.
void write_report_json(std::ostream& os, const SimReport& report);

/*------------------------------------------------------------------------------------------------*/

/// Checks a file produced by one of the writers above. The format is recognised from the content
/// (CSV header or JSON "kind"). Returns human-readable diagnostics; empty means valid.
std::vector<std::string> validate_document(std::string_view text);

} // namespace streamdelay
