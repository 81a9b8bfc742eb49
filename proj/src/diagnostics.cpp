#include "c2o/diagnostics.hpp"

#include <cstdlib>
#include <sstream>

#include <unistd.h>

namespace c2o {

const char* diag_code_name(DiagCode code) {
    switch (code) {
        case DiagCode::LexError: return "lex-error";
        case DiagCode::ParseError: return "parse-error";
        case DiagCode::UnresolvedIdentifier: return "unresolved-identifier";
        case DiagCode::TypeMismatch: return "type-mismatch";
        case DiagCode::DuplicateName: return "duplicate-name";
        case DiagCode::ReservedIdentifier: return "reserved-identifier";
        case DiagCode::UnguardedPre: return "unguarded-pre";
        case DiagCode::NestedPreWithoutArrow: return "nested-pre-without-arrow";
        case DiagCode::RecursiveNode: return "recursive-node";
        case DiagCode::CombinationalCycle: return "combinational-cycle";
        case DiagCode::ConstantOverflow: return "constant-overflow";
        case DiagCode::AssumeReadsOutput: return "assume-reads-output";
        case DiagCode::OslParseError: return "osl-parse-error";
        case DiagCode::TraceFormatError: return "trace-format-error";
        case DiagCode::InternalError: return "internal-error";
    }
    return "unknown";
}

namespace {

bool color_enabled() {
    const char* v = std::getenv("C2O_COLOR");
    if (v && std::string(v) == "always") return true;
    if (v && std::string(v) == "never") return false;
    return isatty(2) != 0;
}

} // namespace

std::string Diagnostic::render(const std::string& filename) const {
    std::ostringstream os;
    const bool color = color_enabled();
    if (!filename.empty()) os << filename << ":";
    if (span.line > 0) os << span.line << ":" << span.col << ": ";
    const char* label = severity == Severity::Error ? "error" : severity == Severity::Warning ? "warning" : "note";
    if (color) {
        const char* tint = severity == Severity::Error ? "\x1b[31m" : severity == Severity::Warning ? "\x1b[33m" : "\x1b[36m";
        os << tint << label << "\x1b[0m";
    } else {
        os << label;
    }
    os << " [" << diag_code_name(code) << "]: " << message;
    return os.str();
}

} // namespace c2o
