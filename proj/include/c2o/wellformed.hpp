#pragma once

#include "c2o/ast.hpp"

namespace c2o {

// Temporal well-formedness: every `pre` must sit in a position reached through
// the right operand of some `->` since the enclosing `pre` (or the root), so
// that no pre-variable's initial value can ever reach a verdict. Checked after
// node inlining; node-body `pre`s are governed by their call sites.
// Returns diagnostics (empty means well-formed).
std::vector<Diagnostic> check_temporal_wellformedness(const Contract& c);

// Throwing convenience wrapper.
void require_wellformed(const Contract& c);

} // namespace c2o
