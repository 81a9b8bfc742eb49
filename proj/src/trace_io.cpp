#include "c2o/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

namespace c2o {

namespace {

[[noreturn]] void fail(std::string msg) {
    throw CompileError(Diagnostic{Severity::Error, DiagCode::TraceFormatError, {}, std::move(msg)});
}

void collect_columns(const ObserverProgram& p, const LoweredType& t, const std::string& prefix,
                     size_t param, std::vector<size_t>& path, std::vector<TraceColumn>& out) {
    if (t.kind != LoweredType::Kind::Struct) {
        out.push_back(TraceColumn{prefix, t, param, path});
        return;
    }
    const StructLayout* layout = p.layout(t.struct_name);
    for (size_t i = 0; i < layout->fields.size(); ++i) {
        path.push_back(i);
        collect_columns(p, layout->fields[i].second, prefix + "." + layout->fields[i].first, param, path, out);
        path.pop_back();
    }
}

const Value& descend(const Value& v, const std::vector<size_t>& path) {
    const Value* cur = &v;
    for (size_t idx : path) cur = &(*cur->as_struct())[idx];
    return *cur;
}

Value& descend_mut(Value& v, const std::vector<size_t>& path) {
    Value* cur = &v;
    for (size_t idx : path) cur = &(*cur->as_struct())[idx];
    return *cur;
}

std::string shortest_double(double d) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    (void)ec;
    return std::string(buf, ptr);
}

std::string shortest_float(float f) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, f);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        size_t b = s.find_first_not_of(" \t");
        size_t e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    return out;
}

} // namespace

std::vector<TraceColumn> trace_columns(const ObserverProgram& p) {
    std::vector<TraceColumn> out;
    std::vector<size_t> path;
    for (size_t i = 0; i < p.params.size(); ++i)
        collect_columns(p, p.params[i].type, p.params[i].name, i, path, out);
    return out;
}

std::string format_scalar(const Value& v, const LoweredType& t) {
    switch (t.kind) {
        case LoweredType::Kind::Bool: return v.as_bool() ? "true" : "false";
        case LoweredType::Kind::FixedInt:
            if (std::holds_alternative<BigInt>(v.v)) return std::get<BigInt>(v.v).to_string();
            return std::to_string(v.as_int());
        case LoweredType::Kind::Float:
            if (std::holds_alternative<BigRational>(v.v)) {
                // exact-mode values render at the configured precision
                double d = std::get<BigRational>(v.v).to_double();
                return t.precision == FloatPrec::Single ? shortest_float(static_cast<float>(d))
                                                        : shortest_double(d);
            }
            return t.precision == FloatPrec::Single ? shortest_float(static_cast<float>(v.as_float()))
                                                    : shortest_double(v.as_float());
        case LoweredType::Kind::Struct: break;
    }
    fail("cannot format a record as a scalar");
}

Value parse_scalar(const std::string& text, const LoweredType& t, bool exact) {
    switch (t.kind) {
        case LoweredType::Kind::Bool:
            if (text == "true" || text == "1") return Value(true);
            if (text == "false" || text == "0") return Value(false);
            fail("bad boolean '" + text + "'");
        case LoweredType::Kind::FixedInt: {
            try {
                BigInt v = BigInt::from_string(text);
                if (exact) return Value(std::move(v));
                return Value(v.to_int64());
            } catch (const std::exception&) {
                fail("bad integer '" + text + "'");
            }
        }
        case LoweredType::Kind::Float: {
            try {
                if (exact) return Value(BigRational::from_decimal_string(text));
            } catch (const std::exception&) {
                fail("bad real '" + text + "'");
            }
            char* end = nullptr;
            double d = t.precision == FloatPrec::Single ? std::strtof(text.c_str(), &end)
                                                        : std::strtod(text.c_str(), &end);
            if (end == text.c_str() || *end != '\0') fail("bad real '" + text + "'");
            return Value(d);
        }
        case LoweredType::Kind::Struct: break;
    }
    fail("cannot parse a record from a scalar");
}

std::string format_value(const Value& v, const LoweredType& t, const ObserverProgram& p) {
    if (t.kind != LoweredType::Kind::Struct) return format_scalar(v, t);
    const StructLayout* layout = p.layout(t.struct_name);
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < layout->fields.size(); ++i) {
        if (i) os << ", ";
        os << layout->fields[i].first << ": "
           << format_value((*v.as_struct())[i], layout->fields[i].second, p);
    }
    os << "}";
    return os.str();
}

namespace {

// Columns for the (possibly partial) set of leaf paths a trace binds.
std::vector<TraceColumn> columns_for(const ObserverProgram& p, const TraceData& trace) {
    auto all = trace_columns(p);
    std::vector<TraceColumn> cols;
    for (const auto& path : trace.params) {
        bool found = false;
        for (const auto& c : all)
            if (c.path == path) {
                cols.push_back(c);
                found = true;
                break;
            }
        if (!found) fail("trace binds unknown signal '" + path + "'");
    }
    return cols;
}

std::vector<TraceColumn> required_columns(const ObserverProgram& p, TraceCoverage coverage) {
    auto all = trace_columns(p);
    if (coverage == TraceCoverage::Full) return all;
    std::vector<TraceColumn> cols;
    for (const auto& c : all)
        if (!p.params[c.param].is_output) cols.push_back(c);
    return cols;
}

} // namespace

std::string write_trace_csv(const ObserverProgram& p, const TraceData& trace) {
    auto cols = columns_for(p, trace);
    std::ostringstream os;
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].path;
    os << "\n";
    for (const auto& step : trace.steps) {
        for (size_t i = 0; i < cols.size(); ++i) {
            const Value& v = descend(step.at(cols[i].param), cols[i].field_path);
            os << (i ? "," : "") << format_scalar(v, cols[i].type);
        }
        os << "\n";
    }
    return os.str();
}

namespace {

std::vector<Value> empty_step(const ObserverProgram& p, size_t nparams) {
    std::vector<Value> step;
    ExecOptions defaults;
    for (size_t i = 0; i < nparams; ++i) step.push_back(default_value(p.params[i].type, p, defaults));
    return step;
}

size_t params_covered(const std::vector<TraceColumn>& cols) {
    size_t n = 0;
    for (const auto& c : cols) n = std::max(n, c.param + 1);
    return n;
}

} // namespace

TraceData parse_trace_csv(const std::string& text, const ObserverProgram& p, bool exact,
                          TraceCoverage coverage) {
    auto cols = required_columns(p, coverage);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) fail("empty trace file");
    auto header = split_csv_line(line);
    // map each required column to its position in the file
    std::vector<size_t> pos(cols.size());
    for (size_t i = 0; i < cols.size(); ++i) {
        bool found = false;
        for (size_t j = 0; j < header.size(); ++j)
            if (header[j] == cols[i].path) {
                pos[i] = j;
                found = true;
                break;
            }
        if (!found) fail("trace is missing column '" + cols[i].path + "'");
    }
    TraceData trace;
    for (const auto& c : cols) trace.params.push_back(c.path);
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        std::vector<Value> step = empty_step(p, params_covered(cols));
        for (size_t i = 0; i < cols.size(); ++i) {
            if (pos[i] >= cells.size()) fail("short row in trace");
            descend_mut(step[cols[i].param], cols[i].field_path) =
                parse_scalar(cells[pos[i]], cols[i].type, exact);
        }
        trace.steps.push_back(std::move(step));
    }
    if (trace.steps.empty()) fail("trace has no steps");
    return trace;
}

std::string write_trace_json(const ObserverProgram& p, const TraceData& trace) {
    using json = nlohmann::ordered_json;
    auto cols = columns_for(p, trace);
    json j;
    j["params"] = json::array();
    for (const auto& c : cols) j["params"].push_back(c.path);
    j["steps"] = json::array();
    for (const auto& step : trace.steps) {
        json row = json::array();
        for (const auto& c : cols) {
            const Value& v = descend(step.at(c.param), c.field_path);
            switch (c.type.kind) {
                case LoweredType::Kind::Bool: row.push_back(v.as_bool()); break;
                case LoweredType::Kind::FixedInt: row.push_back(v.as_int()); break;
                case LoweredType::Kind::Float: row.push_back(v.as_float()); break;
                case LoweredType::Kind::Struct: break;
            }
        }
        j["steps"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

TraceData parse_trace_json(const std::string& text, const ObserverProgram& p, bool exact,
                           TraceCoverage coverage) {
    using json = nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("bad trace JSON: ") + e.what());
    }
    if (!j.contains("params") || !j.contains("steps")) fail("trace JSON needs 'params' and 'steps'");
    auto cols = required_columns(p, coverage);
    std::vector<size_t> pos(cols.size());
    for (size_t i = 0; i < cols.size(); ++i) {
        bool found = false;
        for (size_t k = 0; k < j["params"].size(); ++k)
            if (j["params"][k].get<std::string>() == cols[i].path) {
                pos[i] = k;
                found = true;
                break;
            }
        if (!found) fail("trace is missing column '" + cols[i].path + "'");
    }
    TraceData trace;
    for (const auto& c : cols) trace.params.push_back(c.path);
    for (const auto& row : j["steps"]) {
        std::vector<Value> step = empty_step(p, params_covered(cols));
        for (size_t i = 0; i < cols.size(); ++i) {
            const auto& cell = row.at(pos[i]);
            Value v;
            switch (cols[i].type.kind) {
                case LoweredType::Kind::Bool: v = Value(cell.get<bool>()); break;
                case LoweredType::Kind::FixedInt:
                    v = exact ? Value(BigInt(cell.get<int64_t>())) : Value(cell.get<int64_t>());
                    break;
                case LoweredType::Kind::Float: {
                    double d = cell.get<double>();
                    v = exact ? Value(BigRational::from_double(d)) : Value(d);
                    break;
                }
                case LoweredType::Kind::Struct: break;
            }
            descend_mut(step[cols[i].param], cols[i].field_path) = std::move(v);
        }
        trace.steps.push_back(std::move(step));
    }
    if (trace.steps.empty()) fail("trace has no steps");
    return trace;
}

} // namespace c2o
