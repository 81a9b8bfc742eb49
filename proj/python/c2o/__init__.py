"""Assume-guarantee contracts compiled into single-step observers.

The native module carries the compiler pipeline (parse, normalize, lower,
emit), the step interpreter, the exact-arithmetic oracle, and the
differential/bounded verification harness.
"""

from ._c2o import (
    CompileError,
    InterfaceMismatchError,
    Observer,
    TrapError,
    __version__,
    compile,
    diff,
    dump_ir,
    parse_osl,
    verify,
    wellformedness_diagnostics,
)

__all__ = [
    "CompileError",
    "InterfaceMismatchError",
    "Observer",
    "TrapError",
    "__version__",
    "compile",
    "diff",
    "dump_ir",
    "parse_osl",
    "verify",
    "wellformedness_diagnostics",
]
