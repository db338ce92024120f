"""Prompt assembly for structuring, generation and refinement, plus response
extraction. Prompts are pure functions of their inputs, so identical inputs
give byte-identical prompts."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import TYPE_CHECKING, Union

from .gateway import Gateway, Transcript
from .structured import StructuredProblem, parse_structured, render_structured

if TYPE_CHECKING:
    from ..databind.bind import BoundData

TARGETS = ("ampl", "external-runtime")
Context = Union[StructuredProblem, str]

_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_SECTION = re.compile(r"^### ([A-Z ]+)\n", re.MULTILINE)


class ExtractionError(Exception):
    def __init__(self, message: str, kind: str = "no-spec-block") -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class FewShot:
    description: str
    data_interface: str
    specification: str


@dataclass(frozen=True)
class StructureShot:
    description: str
    structured: str


def _sections(text: str) -> dict[str, str]:
    parts = _SECTION.split(text)
    return {parts[i].strip(): parts[i + 1].strip("\n") for i in range(1, len(parts) - 1, 2)}


def _fixture_texts(folder: str) -> list[str]:
    root = resources.files("optspec.llm").joinpath("fewshots", folder)
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".md"))
    return [root.joinpath(n).read_text(encoding="utf-8") for n in names]


def load_few_shots(target: str) -> tuple[FewShot, ...]:
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    shots = []
    for text in _fixture_texts(target):
        s = _sections(text)
        shots.append(FewShot(s["DESCRIPTION"], s["DATA INTERFACE"], s["SPECIFICATION"]))
    return tuple(shots)


def load_structure_shots() -> tuple[StructureShot, ...]:
    shots = []
    for text in _fixture_texts("structure"):
        s = _sections(text)
        shots.append(StructureShot(s["DESCRIPTION"], s["STRUCTURED"]))
    return tuple(shots)


# -- prompt text ------------------------------------------------------------------

_STRUCTURE_INSTRUCTIONS = """\
You turn optimization problem descriptions into a structured summary.
Identify four components: the objectives, the parameters (known input
values), the decision variables, and the constraints. For every parameter
and variable give a short identifier, its dimension (scalar,
one-dimensional or two-dimensional) and a brief description. Then rewrite
the description, replacing each mention of a parameter with \\param{NAME}
and each mention of a variable with \\var{NAME}.

Answer in exactly this layout and nothing else:
OBJECTIVES:
- one objective per line
PARAMETERS:
NAME | dimension | description
VARIABLES:
NAME | dimension | description
CONSTRAINTS:
- one constraint per line
REWRITTEN:
the rewritten description"""

_TARGET_INSTRUCTIONS = {
    "ampl": """\
Write an optimization model in the AMPL modeling language for the problem
below. Use only: set and param declarations (scalar, one- or
two-dimensional, with optional >= / <= bounds), var declarations (scalar or
indexed, with bounds, integer or binary), subject to constraints, maximize
or minimize objectives, and sum {i in SET} expressions. Keep the model
linear. Do not put data values in the model; they come from a separate
data file that uses exactly the names listed under DATA INTERFACE.
Return the model in a single ``` code block.""",
    "external-runtime": """\
Write a Python module for the problem below that defines a function
solve(data) and returns a dict: {"status": "solved", "objective": value}
on success, or {"status": "infeasible"}, {"status": "unbounded"} or
{"status": "error", "message": text} otherwise. The data argument is
the parsed JSON data file described under DATA INTERFACE; read every value
from it instead of hard-coding numbers. You may use numpy and scipy.
Return the module in a single ``` code block.""",
}

_BASELINE_INSTRUCTIONS = {
    "ampl": """\
Write an optimization model in the AMPL modeling language for the problem
below. Use only: set and param declarations (scalar, one- or
two-dimensional, with optional >= / <= bounds), var declarations (scalar or
indexed, with bounds, integer or binary), subject to constraints, maximize
or minimize objectives, and sum {i in SET} expressions. Keep the model
linear. There is no separate data file: after the model write a line
containing only `data;` followed by set and param data statements with
every value taken from the description.
Return everything in a single ``` code block.""",
    "external-runtime": """\
Write a Python module for the problem below that defines a function
solve(data) and returns a dict: {"status": "solved", "objective": value}
on success, or {"status": "infeasible"}, {"status": "unbounded"} or
{"status": "error", "message": text} otherwise. There is no data file and
data will be an empty dict: take every value from the description and
write it into the code. You may use numpy and scipy.
Return the module in a single ``` code block.""",
}

_REFINE_INSTRUCTIONS = """\
The specification above did not run successfully. Analyze the solver
feedback, identify the parts of the specification that cause the problem,
and return a corrected specification in a single ``` code block."""


def structure_prompt(description: str, shots: tuple[StructureShot, ...]) -> str:
    parts = [_STRUCTURE_INSTRUCTIONS, ""]
    for i, shot in enumerate(shots, start=1):
        parts += [f"EXAMPLE {i} DESCRIPTION:", shot.description, "", f"EXAMPLE {i} ANSWER:", shot.structured, ""]
    parts += ["PROBLEM DESCRIPTION:", description.strip(), ""]
    return "\n".join(parts)


def data_interface(data: "BoundData", target: str) -> str:
    """One line per set/param with the names and shapes the data file uses."""
    lines = []
    for name, members in data.sets.items():
        if target == "ampl":
            lines.append(f"set {name}  # {len(members)} members")
        else:
            lines.append(f'data["{name}"]: list of {len(members)} members')
    for name, value in data.params.items():
        index = data.index.get(name)
        if not isinstance(value, dict):
            arity = 0
        elif value and isinstance(next(iter(value)), tuple):
            arity = 2
        else:
            arity = 1
        if target == "ampl":
            suffix = ""
            if arity:
                suffix = " {" + ", ".join(index) + "}" if index else f"  # {arity}-dimensional"
            lines.append(f"param {name}{suffix}")
        else:
            keys = "".join(f"[{(index[i] if index else f'key{i + 1}').lower()}]" for i in range(arity))
            lines.append(f'data["{name}"]{keys}: number')
    return "\n".join(lines)


def _context_text(context: Context) -> str:
    if isinstance(context, StructuredProblem):
        return "STRUCTURED PROBLEM:\n" + render_structured(context).rstrip("\n")
    return "PROBLEM DESCRIPTION:\n" + context.strip()


def generation_prompt(
    context: Context,
    target: str,
    shots: tuple[FewShot, ...],
    interface: str | None,
) -> str:
    """``interface=None`` selects inline-data (baseline) instructions."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if not shots:
        raise ValueError(f"no few-shot examples for target {target}")
    baseline = interface is None
    parts = [(_BASELINE_INSTRUCTIONS if baseline else _TARGET_INSTRUCTIONS)[target], ""]
    for i, shot in enumerate(shots, start=1):
        parts += [f"EXAMPLE {i} DESCRIPTION:", shot.description, ""]
        if not baseline:
            parts += [f"EXAMPLE {i} DATA INTERFACE:", shot.data_interface, ""]
        parts += [f"EXAMPLE {i} SPECIFICATION:", "```", shot.specification, "```", ""]
    parts += [_context_text(context), ""]
    if not baseline:
        parts += ["DATA INTERFACE:", interface, ""]
    return "\n".join(parts)


def refine_prompt(
    prev_spec: str,
    feedback: str,
    context: Context,
    target: str,
    shots: tuple[FewShot, ...],
    interface: str | None,
) -> str:
    """The generation prompt followed by the previous attempt and its feedback."""
    if not feedback.strip():
        raise ValueError("refinement needs nonempty feedback")
    base = generation_prompt(context, target, shots, interface)
    return "\n".join([
        base.rstrip("\n"), "",
        "PREVIOUS SPECIFICATION:", "```", prev_spec.rstrip("\n"), "```", "",
        "SOLVER FEEDBACK:", feedback.rstrip("\n"), "",
        _REFINE_INSTRUCTIONS, "",
    ])


def extract_spec(response: str) -> str:
    """First fenced code block, else the whole trimmed response."""
    m = _FENCE.search(response)
    body = m.group(1) if m else response
    body = body.strip("\n")
    if not body.strip():
        raise ExtractionError("the response contains no specification")
    return body.strip() + "\n" if not m else body + "\n"


# -- one call per pipeline step ------------------------------------------------------


def _call(gateway: Gateway, stage: str, prompt: str, transcript: Transcript | None) -> str:
    response = gateway.complete(prompt)
    if transcript is not None:
        transcript.add(stage, prompt, response)
    return response


def structure_problem(
    description: str,
    gateway: Gateway,
    shots: tuple[StructureShot, ...] | None = None,
    transcript: Transcript | None = None,
) -> StructuredProblem:
    """Step 1. Raises ParseError when the answer breaks the block layout."""
    if not description.strip():
        raise ValueError("description must be nonempty")
    prompt = structure_prompt(description, load_structure_shots() if shots is None else shots)
    response = _call(gateway, "structure", prompt, transcript)
    m = _FENCE.search(response)
    return parse_structured(m.group(1) if m else response)


def generate_spec(
    context: Context,
    target: str,
    few_shots: tuple[FewShot, ...],
    gateway: Gateway,
    interface: str | None,
    transcript: Transcript | None = None,
) -> str:
    prompt = generation_prompt(context, target, few_shots, interface)
    return extract_spec(_call(gateway, "generate", prompt, transcript))


def refine_spec(
    prev_spec: str,
    feedback: str,
    context: Context,
    target: str,
    few_shots: tuple[FewShot, ...],
    gateway: Gateway,
    interface: str | None,
    transcript: Transcript | None = None,
) -> str:
    prompt = refine_prompt(prev_spec, feedback, context, target, few_shots, interface)
    return extract_spec(_call(gateway, "refine", prompt, transcript))
