"""Reference runtime for the external-runtime target.

``python -m optspec.runtime SPEC DATA`` loads the Python module at SPEC,
calls its ``solve(data)`` with the parsed JSON document at DATA (``-``
passes an empty dict) and writes a ``result`` file in the working
directory::

    status: solved | infeasible | unbounded | error
    objective: <number>        # when solved
    kind: <compile-error kind> # optional, when the module does not load
    message: <one line>        # optional

The exit code is 0 whenever a status was written. Tracebacks go to stderr.
"""
from __future__ import annotations

import json
import math
import sys
import traceback
from pathlib import Path

STATUSES = ("solved", "infeasible", "unbounded", "error")


def _one_line(text: str) -> str:
    return " ".join(str(text).split())[:500]


def _report(exc: BaseException) -> None:
    """Traceback without this module's own frame, so feedback shows only spec code."""
    tb = exc.__traceback__.tb_next if exc.__traceback__ is not None else None
    print("".join(traceback.format_exception(type(exc), exc, tb)), end="", file=sys.stderr)


def _write(status: str, **fields: str) -> None:
    lines = [f"status: {status}"] + [f"{k}: {_one_line(v)}" for k, v in fields.items() if v != ""]
    Path("result").write_text("\n".join(lines) + "\n", encoding="utf-8")


def run(spec_path: str, data_path: str) -> int:
    try:
        source = Path(spec_path).read_text(encoding="utf-8")
        data = {} if data_path == "-" else json.loads(Path(data_path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        print(f"cannot read inputs: {exc}", file=sys.stderr)
        return 2
    namespace: dict = {"__name__": "spec"}
    try:
        code = compile(source, spec_path, "exec")
    except SyntaxError as exc:
        _write("error", kind="syntax", message=f"{type(exc).__name__}: {exc}")
        return 0
    try:
        exec(code, namespace)
    except ImportError as exc:
        _report(exc)
        _write("error", kind="unresolved-symbol", message=f"{type(exc).__name__}: {exc}")
        return 0
    except Exception as exc:
        _report(exc)
        _write("error", message=f"{type(exc).__name__} while loading the module: {exc}")
        return 0
    solve = namespace.get("solve")
    if not callable(solve):
        _write("error", kind="unresolved-symbol", message="the module does not define solve(data)")
        return 0
    try:
        result = solve(data)
    except Exception as exc:
        _report(exc)
        _write("error", message=f"{type(exc).__name__}: {exc}")
        return 0
    if not isinstance(result, dict) or result.get("status") not in STATUSES:
        _write("error", message=f"solve(data) must return a dict with a status, got {result!r}")
        return 0
    status = result["status"]
    if status == "solved":
        try:
            objective = float(result.get("objective"))
        except (TypeError, ValueError):
            _write("error", message=f"solved result has no numeric objective: {result.get('objective')!r}")
            return 0
        if not math.isfinite(objective):
            _write("error", message=f"solved result has a non-finite objective {objective}")
            return 0
        _write("solved", objective=repr(objective))
        return 0
    _write(status, message=str(result.get("message", "")))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 2:
        print("usage: python -m optspec.runtime SPEC DATA|-", file=sys.stderr)
        return 64
    return run(args[0], args[1])


if __name__ == "__main__":
    sys.exit(main())
