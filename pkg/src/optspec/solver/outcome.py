from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class SolverParams:
    feasibility_tol: float = 1e-6
    pivot_tol: float = 1e-9
    integrality_tol: float = 1e-6
    max_simplex_iterations: int = 100_000
    max_bb_nodes: int = 100_000

    def __post_init__(self) -> None:
        for name in ("feasibility_tol", "pivot_tol", "integrality_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_simplex_iterations", "max_bb_nodes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


@dataclass(frozen=True)
class Solved:
    objective: float
    assignment: dict[str, float]
    node_count: int = 0
    iterations: int = 0

    outcome_class = "solved"

    def to_dict(self) -> dict:
        return {
            "class": "solved",
            "objective": self.objective,
            "assignment": dict(self.assignment),
            "node_count": self.node_count,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class RuntimeFailure:
    """A spec that compiled but did not produce a solution.

    ``kind`` is one of ``infeasible``, ``unbounded``, ``iteration-limit``,
    ``node-limit``, ``numeric-failure`` or ``unexpected-termination``.
    """

    kind: str
    message: str
    vars: tuple[str, ...] = field(default=())

    outcome_class = "runtime-error"

    def to_dict(self) -> dict:
        return {"class": "runtime-error", "kind": self.kind, "message": self.message,
                "vars": list(self.vars)}


SolveOutcome = Union[Solved, RuntimeFailure]
