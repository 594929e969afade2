#pragma once

#include "circlelab/analysis.hpp"
#include "circlelab/piecewise.hpp"
#include "circlelab/rotation.hpp"

#include <string>
#include <vector>

namespace circlelab {

/// Version string stamped into every serialized artifact and report header.
inline constexpr const char* kSchemaVersion = "circlelab/1";

/// "p/q" (rational, via parse_rational) or "a+b*sqrt(n)" (quadratic),
/// inverse pair.
std::string format_quad(const Quad& v);
Quad parse_quad(const std::string& text);

/// JSON form of an exact map:
///   {"schema":..., "universe":"affine"|"moebius",
///    "breakpoints":[...], "pieces":[...]}
/// with every number an exact rational/quadratic string. Rigid rotations
/// with exact angle shorten to the JSON string "rigid:p/q" (or a quadratic
/// string after "rigid:"). Numeric maps have no finite description and are
/// rejected with WrongInput.
std::string map_to_json(const PiecewiseMap& f);

/// Inverse of map_to_json; also accepts the bare shorthand "rigid:p/q"
/// without JSON quoting. Throws ParseError on malformed input.
PiecewiseMap parse_map(const std::string& text);

/// JSON form of an iteration trace:
///   {"schema":..., "threshold":..., "steps":[{"n":..., "map":...,
///    "p":"..", "q":"..", "delta":"p/q", "interval":["p/q","p/q"]}]}
std::string trace_to_json(const IterationTrace& trace);
IterationTrace trace_from_json(const std::string& text);

/// CSV of a trace: one row per step with exact columns
/// n,p,q,delta,interval_lo,interval_hi,width and a decimal convenience
/// column width_approx. Headed by a schema comment line.
std::string trace_csv(const IterationTrace& trace);

/// CSV graph of a map in the angle chart: `resolution` rows
/// x,fx_lo,fx_hi,fx_approx sampled at x = i/resolution. Exact maps give
/// fx_lo = fx_hi; anything else is a certified enclosure of width <= tol
/// with the approx column marked by the header comment.
std::string graph_csv(const PiecewiseMap& f, long resolution,
                      const Rat& tol = Rat(1, 1 << 30));

/// Structured-text reports with words rendered against generator names.
std::string word_ball_text(const WordBallReport& report,
                           const std::vector<std::string>& names);
std::string crossing_text(const CrossingReport& report);

}  // namespace circlelab
