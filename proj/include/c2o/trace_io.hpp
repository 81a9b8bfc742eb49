#pragma once

#include <string>
#include <vector>

#include "c2o/interp.hpp"
#include "c2o/lower.hpp"

namespace c2o {

// Dotted leaf paths for a parameter list ("Sync.Active" for record fields).
struct TraceColumn {
    std::string path;
    LoweredType type; // scalar
    size_t param;     // parameter index
    std::vector<size_t> field_path;
};
std::vector<TraceColumn> trace_columns(const ObserverProgram& p);

enum class TraceCoverage { Full, InputsOnly };

// CSV: header row of parameter paths, one row per step; booleans as
// true/false, floats as shortest round-trip decimals.
std::string write_trace_csv(const ObserverProgram& p, const TraceData& trace);
TraceData parse_trace_csv(const std::string& text, const ObserverProgram& p, bool exact = false,
                          TraceCoverage coverage = TraceCoverage::Full);

// JSON: {"params": [paths], "steps": [[...], ...]}.
std::string write_trace_json(const ObserverProgram& p, const TraceData& trace);
TraceData parse_trace_json(const std::string& text, const ObserverProgram& p, bool exact = false,
                           TraceCoverage coverage = TraceCoverage::Full);

std::string format_scalar(const Value& v, const LoweredType& t);
Value parse_scalar(const std::string& text, const LoweredType& t, bool exact);

std::string format_value(const Value& v, const LoweredType& t, const ObserverProgram& p);

} // namespace c2o
