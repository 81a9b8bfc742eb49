#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <variant>
#include <vector>

#include "c2o/ast.hpp"
#include "c2o/bigint.hpp"
#include "c2o/interp.hpp" // TraceData/StepVerdict only; no pipeline code is used

namespace c2o {

// Reference evaluator for the ORIGINAL contract under stream semantics with
// exact arithmetic. Deliberately independent of ir-normalize/observer-codegen:
// it interprets the typed AST directly (node calls by parameter binding, no
// inlining; `->`/`if`/`and`/`or` lazy; unbounded ints; rationals for reals).
struct OracleValue {
    struct Bottom {};
    using Struct = std::shared_ptr<std::vector<OracleValue>>;
    std::variant<Bottom, bool, BigInt, BigRational, Struct> v;

    OracleValue() : v(Bottom{}) {}
    OracleValue(bool b) : v(b) {}
    OracleValue(BigInt i) : v(std::move(i)) {}
    OracleValue(BigRational r) : v(std::move(r)) {}
    OracleValue(Struct s) : v(std::move(s)) {}

    bool is_bottom() const { return std::holds_alternative<Bottom>(v); }
    bool as_bool() const { return std::get<bool>(v); }
    const BigInt& as_int() const { return std::get<BigInt>(v); }
    const BigRational& as_real() const { return std::get<BigRational>(v); }
};

class OracleTrap : public std::runtime_error {
  public:
    OracleTrap(int step, std::string what) : std::runtime_error(std::move(what)), step_(step) {}
    int step() const { return step_; }

  private:
    int step_;
};

// Raised when an undefined (pre-at-initial-state) value reaches a verdict;
// signals a well-formedness checker bug, not a contract property.
class BottomObserved : public std::runtime_error {
  public:
    BottomObserved(int step, const std::string& label)
        : std::runtime_error("undefined value reached verdict \"" + label + "\" at step " +
                             std::to_string(step)) {}
};

struct EvalStats {
    std::unordered_map<const Expr*, size_t> counts;
    size_t count(const ExprPtr& e) const {
        auto it = counts.find(e.get());
        return it == counts.end() ? 0 : it->second;
    }
};

struct OracleResult {
    std::vector<StepVerdict> verdicts;
    // per step, per (non-synthetic) eq: exact value
    std::vector<std::vector<std::pair<std::string, OracleValue>>> eq_values;
};

// Trace values bind every input and output of the contract; exact values
// (BigInt/BigRational) are used as-is, machine values converted exactly.
OracleResult oracle_eval(const Contract& c, const TraceData& trace, EvalStats* stats = nullptr);

bool oracle_values_equal(const OracleValue& a, const OracleValue& b);

} // namespace c2o
