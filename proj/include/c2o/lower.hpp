#pragma once

#include "c2o/normalize.hpp"
#include "c2o/observer.hpp"

namespace c2o {

enum class LowerMode {
    Observer, // parameters = component inputs then outputs; assume/prove emitted
    Model,    // parameters = inputs only; output-defining eqs become computed signals
};

// Observer parameter list: component inputs followed by component outputs,
// names preserved, record types kept structured.
struct ObserverInterface {
    struct Entry {
        std::string name;
        SemType type;
        bool is_output;
    };
    std::vector<Entry> entries;
};
ObserverInterface interface_of(const Contract& c);

// Lowers normalized dataflow to the imperative step program.
// Throws ConstantOverflow when a literal does not fit the configured width.
ObserverProgram lower(const DataflowIR& ir, const TypeConfig& cfg, LowerMode mode = LowerMode::Observer);

// parse -> check -> wellformedness -> normalize -> lower.
ObserverProgram compile_observer(const Contract& c, const TypeConfig& cfg);
ObserverProgram compile_model(const Contract& c, const TypeConfig& cfg);

LoweredType lower_type(const SemType& t, const TypeConfig& cfg);

} // namespace c2o
