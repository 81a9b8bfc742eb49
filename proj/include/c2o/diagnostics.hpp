#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace c2o {

// Half-open source region, 1-based line/column.
struct Span {
    uint32_t line = 0;
    uint32_t col = 0;
    uint32_t end_line = 0;
    uint32_t end_col = 0;

    static Span point(uint32_t line, uint32_t col) { return Span{line, col, line, col}; }
    Span merge(const Span& other) const {
        Span s = *this;
        if (other.end_line > s.end_line || (other.end_line == s.end_line && other.end_col > s.end_col)) {
            s.end_line = other.end_line;
            s.end_col = other.end_col;
        }
        return s;
    }
};

enum class Severity { Error, Warning, Note };

enum class DiagCode {
    LexError,
    ParseError,
    UnresolvedIdentifier,
    TypeMismatch,
    DuplicateName,
    ReservedIdentifier,
    UnguardedPre,
    NestedPreWithoutArrow,
    RecursiveNode,
    CombinationalCycle,
    ConstantOverflow,
    AssumeReadsOutput,   // lint
    OslParseError,
    TraceFormatError,
    InternalError,
};

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagCode code = DiagCode::InternalError;
    Span span;
    std::string message;

    std::string render(const std::string& filename = "") const;
};

const char* diag_code_name(DiagCode code);

// Thrown by the frontend/normalizer/lowering on hard errors.
class CompileError : public std::runtime_error {
  public:
    explicit CompileError(Diagnostic d)
        : std::runtime_error(d.render()), diags_{std::move(d)} {}
    explicit CompileError(std::vector<Diagnostic> ds)
        : std::runtime_error(ds.empty() ? std::string("compile error") : ds.front().render()),
          diags_{std::move(ds)} {}

    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

  private:
    std::vector<Diagnostic> diags_;
};

} // namespace c2o
