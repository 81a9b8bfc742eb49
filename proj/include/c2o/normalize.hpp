#pragma once

#include <string>
#include <vector>

#include "c2o/ast.hpp"

namespace c2o {

// Flat, ordered, inlined, temporally decoupled equation list.
struct DataflowIR {
    struct Local {
        std::string name;
        SemType type;
        ExprPtr expr; // no node calls; temporal operands decoupled
        bool is_output = false;
        bool synthetic = false; // introduced by normalization ("__t<n>")
    };
    struct LabeledRef {
        std::string label;
        std::string local; // Boolean local carrying the verdict expression
    };
    struct PreEntry {
        std::string key;  // canonical operand expression
        ExprPtr operand;  // the decoupled pre operand
        std::string id;   // synthetic persistent id
    };

    std::string component;
    RecordTable records;
    std::vector<Port> inputs;
    std::vector<Port> outputs;
    std::vector<Local> locals; // data-flow order
    std::vector<LabeledRef> assumes;
    std::vector<LabeledRef> guarantees;
    std::vector<PreEntry> pre_table; // ordered by first occurrence
};

// Substitutes node bodies at call sites until no calls remain.
// Throws on recursive node cycles (names the cycle).
Contract inline_nodes(const Contract& c);

// Hoists temporal-bearing operands of `pre`/`->` into fresh "__t<n>" locals,
// sharing structurally identical subexpressions. Requires an inlined contract.
Contract decouple_temporal(const Contract& c);

// Full normalization: inline, decouple, hoist assume/guarantee bodies to
// Boolean locals, topologically order locals (pre edges excluded), build the
// pre table. Throws CombinationalCycle on same-step cycles.
DataflowIR order_dataflow(const Contract& c);
DataflowIR normalize(const Contract& c);

// Renders the IR back as a Contract (for the independent-oracle equivalence
// checks); synthetic locals become ordinary eqs.
Contract ir_to_contract(const DataflowIR& ir);

// Deterministic JSON rendering (stable key order) for --dump-ir goldens.
std::string ir_to_json(const DataflowIR& ir);

} // namespace c2o
