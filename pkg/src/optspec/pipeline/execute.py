"""Step 4: run a generated specification and classify what happened.

Every attempt ends in exactly one of three classes: ``Solved``,
``CompileError`` (the specification could not be turned into a problem) or
``RuntimeFailure`` (it could, but no solution came back).
"""
from __future__ import annotations

import math
import re
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from ..ampl import CompileError, DataSection, instantiate, parse_data, parse_model, render_compile_error, validate
from ..databind import BoundData, emit_ampl_data, emit_generic_data
from ..solver import RuntimeFailure, Solved, render_diagnostics, solve_milp
from .config import VariantConfig

Outcome = Union[Solved, RuntimeFailure, CompileError]

# separates model and data in a self-contained (inline-data) AMPL spec
DATA_DELIMITER = re.compile(r"^[ \t]*data[ \t]*;[ \t]*(?:#.*)?$", re.MULTILINE)

# kinds a runtime may report on an ``error`` result that count as compile errors
COMPILE_KINDS = frozenset({
    "lex", "syntax", "ragged-table", "unresolved-symbol", "arity-mismatch", "bound-violation",
    "duplicate-declaration", "nonlinear-expression", "multiple-objectives", "no-objective",
    "no-variable",
})

_STDERR_TAIL = 1500


def outcome_class(outcome: Outcome) -> str:
    if isinstance(outcome, CompileError):
        return "compile-error"
    return outcome.outcome_class


def outcome_to_dict(outcome: Outcome) -> dict:
    if isinstance(outcome, CompileError):
        return {"class": "compile-error", **outcome.to_dict()}
    return outcome.to_dict()


def outcome_from_dict(d: dict) -> Outcome:
    cls = d["class"]
    if cls == "solved":
        return Solved(d["objective"], dict(d["assignment"]), d.get("node_count", 0), d.get("iterations", 0))
    if cls == "runtime-error":
        return RuntimeFailure(d["kind"], d["message"], tuple(d.get("vars", ())))
    if cls == "compile-error":
        return CompileError.from_dict(d)
    raise ValueError(f"unknown outcome class {cls!r}")


@dataclass(frozen=True)
class Execution:
    outcome: Outcome
    feedback: str  # refinement-prompt text; empty when solved


def split_inline_spec(spec: str) -> tuple[str, str, int]:
    """Model text, data text and the data part's line offset."""
    m = DATA_DELIMITER.search(spec)
    if m is None:
        return spec, "", 0
    # the data text starts on the delimiter's line, so its line 1 is that line
    return spec[: m.start()], spec[m.end():], spec.count("\n", 0, m.start())


def _shift(err: CompileError, lines: int) -> CompileError:
    if err.line is None or not lines:
        return err
    return CompileError(err.kind, err.message, line=err.line + lines, column=err.column, symbol=err.symbol)


def _compile_failure(err: CompileError) -> Execution:
    return Execution(err, render_compile_error(err))


def _execute_ampl(spec: str, data: BoundData | None, cfg: VariantConfig, scratch: Path | None) -> Execution:
    if data is None:
        model_text, data_text, offset = split_inline_spec(spec)
    else:
        model_text, data_text, offset = spec, None, 0
    if scratch is not None:
        scratch.mkdir(parents=True, exist_ok=True)
        if data is None:
            (scratch / "spec.mod").write_text(spec, encoding="utf-8")
        else:
            (scratch / "model.mod").write_text(spec, encoding="utf-8")
            (scratch / "data.dat").write_text(emit_ampl_data(data), encoding="utf-8")
    try:
        model = parse_model(model_text)
        if data_text is None:
            section = data.as_data_section()
        else:
            try:
                section = parse_data(data_text) if data_text.strip() else DataSection({}, {})
            except CompileError as err:
                raise _shift(err, offset) from err
        validate(model, section)
        instance = instantiate(model, section, cfg.objective_policy)
    except CompileError as err:
        return _compile_failure(err)
    try:
        outcome = solve_milp(instance, cfg.solver_params)
    except (ArithmeticError, ValueError) as exc:
        outcome = RuntimeFailure("numeric-failure", f"solver error: {exc}")
    if isinstance(outcome, Solved):
        return Execution(outcome, "")
    return Execution(outcome, render_diagnostics(outcome, instance, cfg.solver_params))


def _read_result(path: Path) -> dict[str, str]:
    fields: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8", errors="replace").splitlines():
        key, sep, value = line.partition(":")
        if sep and key.strip() in ("status", "objective", "kind", "message") and key.strip() not in fields:
            fields[key.strip()] = value.strip()
    return fields


def _runtime_failure(kind: str, message: str, stderr: str = "") -> Execution:
    feedback = f"ERROR {kind}\n{message}"
    if stderr.strip():
        feedback += "\n" + stderr.strip()[-_STDERR_TAIL:]
    return Execution(RuntimeFailure(kind, message), feedback)


def _execute_external(spec: str, data: BoundData | None, cfg: VariantConfig, scratch: Path) -> Execution:
    scratch.mkdir(parents=True, exist_ok=True)
    spec_path = scratch / "spec.py"
    spec_path.write_text(spec, encoding="utf-8")
    data_arg = "-"
    if data is not None:
        (scratch / "data.json").write_text(emit_generic_data(data), encoding="utf-8")
        data_arg = "data.json"
    result_path = scratch / "result"
    result_path.unlink(missing_ok=True)
    try:
        proc = subprocess.run(
            [*cfg.runtime_command, "spec.py", data_arg],
            cwd=scratch, capture_output=True, text=True, timeout=cfg.timeout,
        )
    except subprocess.TimeoutExpired:
        return _runtime_failure("unexpected-termination", f"the runtime did not finish within {cfg.timeout:g} s")
    except OSError as exc:
        return _runtime_failure("unexpected-termination", f"the runtime command could not start: {exc}")
    if proc.returncode != 0:
        return _runtime_failure(
            "unexpected-termination", f"the runtime exited with code {proc.returncode}", proc.stderr
        )
    if not result_path.is_file():
        return _runtime_failure("unexpected-termination", "the runtime exited without writing a result file")
    fields = _read_result(result_path)
    status = fields.get("status")
    message = fields.get("message", "")
    if status == "solved":
        try:
            value = float(fields.get("objective", ""))
        except ValueError:
            return _runtime_failure("unexpected-termination", "the result says solved but has no numeric objective")
        if not math.isfinite(value):
            return _runtime_failure("numeric-failure", f"the reported objective {fields['objective']} is not finite")
        return Execution(Solved(value, {}), "")
    if status in ("infeasible", "unbounded"):
        text = message or f"the problem is {status}"
        return _runtime_failure(status, text)
    if status == "error":
        kind = fields.get("kind", "")
        if kind in COMPILE_KINDS:
            return _compile_failure(CompileError(kind, message or "the specification does not compile"))
        return _runtime_failure(
            "unexpected-termination", message or "the specification failed while running", proc.stderr
        )
    return _runtime_failure("unexpected-termination", f"the result file has an unknown status {status!r}")


def execute_spec(
    spec: str, data: BoundData | None, cfg: VariantConfig, scratch: Path | None = None
) -> Execution:
    """Run ``spec`` with bound ``data``; ``data=None`` means inline (baseline) data.

    The external-runtime target needs a ``scratch`` directory for its files.
    """
    if cfg.target == "ampl":
        return _execute_ampl(spec, data, cfg, scratch)
    if scratch is None:
        raise ValueError("the external-runtime target needs a scratch directory")
    return _execute_external(spec, data, cfg, scratch)
