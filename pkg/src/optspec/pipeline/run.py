"""One problem under one variant: structure, generate, execute, refine."""
from __future__ import annotations

import hashlib
import json
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..ampl import CompileError
from ..databind import BoundData
from ..llm.gateway import Gateway, GatewayError, Transcript
from ..llm.prompts import ExtractionError, data_interface, generate_spec, load_few_shots, refine_spec, structure_problem
from ..llm.structured import ParseError, StructuredProblem
from ..solver import RuntimeFailure, Solved
from .bundle import BundleError, ProblemBundle
from .config import VariantConfig
from .execute import Execution, Outcome, execute_spec, outcome_class, outcome_from_dict, outcome_to_dict


@dataclass(frozen=True)
class SpecAttempt:
    spec: str
    outcome_class: str
    kind: str | None  # error kind, None when solved
    feedback: str


@dataclass
class RunRecord:
    problem_id: str
    variant: str
    model: str
    run_index: int
    target: str
    baseline: bool
    structured_problem: dict | None
    structure_error: str | None
    spec_history: list[SpecAttempt]
    final_outcome: dict
    refinement_count: int
    objective: float | None
    ground_truth: float
    wall_time: float
    prompt_transcript: list[dict] = field(default_factory=list)
    gateway_error: str | None = None
    config_digest: str = ""

    def __post_init__(self) -> None:
        if len(self.spec_history) != 1 + self.refinement_count:
            raise ValueError("spec_history must hold one attempt per generation or refinement")
        if self.final_outcome["class"] == "solved" and self.objective is None:
            raise ValueError("a solved record needs an objective")

    @property
    def outcome_class(self) -> str:
        return self.final_outcome["class"]

    @property
    def outcome(self) -> Outcome:
        return outcome_from_dict(self.final_outcome)

    @property
    def key(self) -> tuple[str, str, str, int]:
        return (self.problem_id, self.variant, self.model, self.run_index)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        d = dict(d)
        d["spec_history"] = [SpecAttempt(**a) for a in d["spec_history"]]
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def digest(self) -> str:
        """Content hash that ignores wall-clock time."""
        doc = self.to_dict()
        doc.pop("wall_time")
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _kind(outcome: Outcome) -> str | None:
    return None if isinstance(outcome, Solved) else outcome.kind


def _scratch_dir(root: Path, bundle_id: str, cfg: VariantConfig, model: str, run_index: int, attempt: int) -> Path:
    key = json.dumps([bundle_id, cfg.label, model, run_index, attempt])
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]
    return root / f"{bundle_id}-{cfg.label}-r{run_index}-a{attempt}-{digest}"


def _gateway_for(cfg: VariantConfig, gateway: Gateway | None) -> Gateway:
    if gateway is not None:
        return gateway
    if cfg.llm is None:
        raise ValueError(f"variant {cfg.label} has no LLM configuration and no gateway was given")
    return Gateway(cfg.llm)


def _loop(
    bundle: ProblemBundle,
    cfg: VariantConfig,
    gateway: Gateway,
    run_index: int,
    *,
    description: str,
    data: BoundData | None,
    scratch_root: Path,
) -> RunRecord:
    started = time.perf_counter()
    transcript = Transcript()
    structured: StructuredProblem | None = None
    structure_error = None
    history: list[SpecAttempt] = []
    gateway_error = None
    refinements = 0
    final: Outcome | None = None

    target = cfg.target
    shots = load_few_shots(target)
    interface = data_interface(data, target) if data is not None else None
    context: StructuredProblem | str = description

    def attempt(spec_text: str | None, error: ExtractionError | None) -> Execution:
        if error is not None:
            err = CompileError("no-spec-block", error.message)
            return Execution(err, f"ERROR no-spec-block\n{error.message}; return the specification in a code block.")
        scratch = _scratch_dir(scratch_root, bundle.id, cfg, gateway.model_name, run_index, len(history))
        return execute_spec(spec_text, data, cfg, scratch)

    try:
        if cfg.structured:
            try:
                structured = structure_problem(description, gateway, transcript=transcript)
                context = structured
            except ParseError as err:
                structure_error = str(err)  # generation falls back to the raw description
        spec: str = ""
        extraction: ExtractionError | None = None
        try:
            spec = generate_spec(context, target, shots, gateway, interface, transcript)
        except ExtractionError as err:
            extraction = err
        while True:
            execution = attempt(spec, extraction)
            final = execution.outcome
            history.append(SpecAttempt(spec, outcome_class(final), _kind(final), execution.feedback))
            if isinstance(final, Solved) or not cfg.refinement or refinements >= cfg.max_refinements:
                break
            refinements += 1
            extraction = None
            try:
                spec = refine_spec(spec, execution.feedback, context, target, shots, gateway, interface, transcript)
            except ExtractionError as err:
                spec, extraction = "", err
    except GatewayError as err:
        gateway_error = err.kind
        final = RuntimeFailure("unexpected-termination", f"LLM request failed: {err}")
        # the attempt that never received a specification still counts
        history.append(SpecAttempt("", final.outcome_class, final.kind, ""))
        refinements = len(history) - 1

    assert final is not None
    return RunRecord(
        problem_id=bundle.id,
        variant=cfg.label,
        model=gateway.model_name,
        run_index=run_index,
        target=target,
        baseline=data is None,
        structured_problem=structured.to_dict() if structured is not None else None,
        structure_error=structure_error,
        spec_history=history,
        final_outcome=outcome_to_dict(final),
        refinement_count=refinements,
        objective=final.objective if isinstance(final, Solved) else None,
        ground_truth=bundle.ground_truth,
        wall_time=round(time.perf_counter() - started, 6),
        prompt_transcript=transcript.digests(),
        gateway_error=gateway_error,
        config_digest=cfg.digest(),
    )


def _with_scratch(cfg: VariantConfig, fn):
    if cfg.scratch_root is not None:
        root = Path(cfg.scratch_root)
        root.mkdir(parents=True, exist_ok=True)
        return fn(root)
    with tempfile.TemporaryDirectory(prefix="optspec-") as tmp:
        return fn(Path(tmp))


def run_variant(
    bundle: ProblemBundle, cfg: VariantConfig, gateway: Gateway | None = None, run_index: int = 0
) -> RunRecord:
    """Steps 1 to 4 for one bundle. Failures are recorded, never raised."""
    if bundle.data is None or bundle.description is None:
        raise BundleError(f"{bundle.id} was loaded without bound data; load it in pipeline mode")
    gw = _gateway_for(cfg, gateway)
    return _with_scratch(cfg, lambda root: _loop(
        bundle, cfg, gw, run_index, description=bundle.description, data=bundle.data, scratch_root=root,
    ))


def run_baseline(
    bundle: ProblemBundle, cfg: VariantConfig, gateway: Gateway | None = None, run_index: int = 0
) -> RunRecord:
    """The same loop without Step 2: values come from the inline description.

    For the ampl target the generated text carries the model, a ``data;``
    line, and then the data statements.
    """
    if bundle.inline_description is None:
        raise BundleError(f"{bundle.id} has no inline/description.md for baseline mode")
    gw = _gateway_for(cfg, gateway)
    return _with_scratch(cfg, lambda root: _loop(
        bundle, cfg, gw, run_index, description=bundle.inline_description, data=None, scratch_root=root,
    ))
