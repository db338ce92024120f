"""Variant configuration and the eight built-in presets."""
from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..ampl import ObjectivePolicy
from ..llm.gateway import LlmConfig, RemoteBackend, ScriptedBackend
from ..llm.prompts import TARGETS
from ..solver import SolverParams

DEFAULT_RUNTIME = (sys.executable, "-m", "optspec.runtime")


@dataclass(frozen=True)
class VariantConfig:
    label: str
    target: str  # ampl | external-runtime
    structured: bool
    refinement: bool
    max_refinements: int = 5
    runs: int = 5
    objective_policy: ObjectivePolicy = field(default_factory=ObjectivePolicy)
    solver_params: SolverParams = field(default_factory=SolverParams)
    llm: LlmConfig | None = None
    runtime_command: tuple[str, ...] = DEFAULT_RUNTIME
    timeout: float = 60.0
    scratch_root: Path | None = None  # None: a fresh temporary directory per run

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("variant label must be nonempty")
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; expected one of {', '.join(TARGETS)}")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if not self.runtime_command:
            raise ValueError("runtime_command must name a program")

    def with_(self, **changes) -> "VariantConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """Everything that can change a run's outcome; machine paths excluded."""
        return {
            "label": self.label,
            "target": self.target,
            "structured": self.structured,
            "refinement": self.refinement,
            "max_refinements": self.max_refinements,
            "runs": self.runs,
            "objective_policy": str(self.objective_policy),
            "solver_params": vars(self.solver_params),
            "llm": describe_llm(self.llm),
            "timeout": self.timeout,
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def describe_llm(config: LlmConfig | None) -> dict | None:
    if config is None:
        return None
    backend = config.backend
    doc: dict = {
        "max_output_tokens": config.max_output_tokens,
        "request_timeout": config.request_timeout,
        "rate_limit": config.rate_limit,
        "retries": config.retries,
    }
    if isinstance(backend, RemoteBackend):
        doc["backend"] = {
            "kind": "remote", "endpoint": backend.endpoint, "model": backend.model,
            "auth_env": backend.auth_env, "adapter": backend.adapter,
        }
    else:
        assert isinstance(backend, ScriptedBackend)
        script = json.dumps(
            {"sequence": list(backend.sequence), "rules": [vars(r) for r in backend.rules]},
            sort_keys=True, default=list,
        )
        doc["backend"] = {
            "kind": "scripted", "name": backend.name,
            "sha256": hashlib.sha256(script.encode("utf-8")).hexdigest(),
        }
    return doc


def _preset(label: str, target: str, structured: bool, refinement: bool) -> VariantConfig:
    return VariantConfig(label, target, structured, refinement)


# (structured, refinement) per suffix: 1 neither, 2 refinement, 3 structuring, 4 both
_SUFFIXES = {1: (False, False), 2: (False, True), 3: (True, False), 4: (True, True)}

PRESETS: dict[str, VariantConfig] = {
    f"{prefix}{k}": _preset(f"{prefix}{k}", target, *flags)
    for prefix, target in (("Ampl", "ampl"), ("Python", "external-runtime"))
    for k, flags in _SUFFIXES.items()
}


def preset(label: str, **overrides) -> VariantConfig:
    if label not in PRESETS:
        raise KeyError(f"unknown variant {label!r}; presets are {', '.join(PRESETS)}")
    return PRESETS[label].with_(**overrides) if overrides else PRESETS[label]
