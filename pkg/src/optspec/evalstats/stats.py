"""Two-proportion Z-test, Mann-Whitney U, and the Vargha-Delaney A12 effect size.

All tests are one-sided. For the Z-test sample A is favored when Z > 0
(higher executability is better). For U and A12 smaller values are better
(they are applied to relative errors), so A is favored when its values tend
to be lower.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

EXACT_MAX_N = 8
_EPS = 1e-12

# Vargha-Delaney magnitude cutoffs below 0.5 (mirrored above it)
A12_SMALL = 0.44
A12_MEDIUM = 0.36
A12_LARGE = 0.29


@dataclass(frozen=True)
class StatTestResult:
    test: str  # z-proportion | mann-whitney-u
    statistic: float
    p_value: float
    direction: str  # a | b | none
    a12: float | None = None
    a12_magnitude: str | None = None
    degenerate: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value outside [0, 1]")
        if self.a12 is not None and not 0.0 <= self.a12 <= 1.0:
            raise ValueError("a12 outside [0, 1]")

    @property
    def significant(self) -> bool:
        return self.direction == "a" and self.p_value < 0.05

    def to_dict(self) -> dict:
        return asdict(self)


def _upper_tail(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def z_test_proportions(exec_a: int, n_a: int, exec_b: int, n_b: int) -> StatTestResult:
    """Pooled two-proportion Z-test, H1: p_a > p_b.

    A pooled proportion of 0 or 1 leaves the standard error at zero; the
    result is then flagged ``degenerate`` with Z = 0 and p = 0.5.
    """
    if n_a < 1 or n_b < 1:
        raise ValueError("sample sizes must be at least 1")
    if not (0 <= exec_a <= n_a and 0 <= exec_b <= n_b):
        raise ValueError("counts must lie between 0 and the sample size")
    pooled = (exec_a + exec_b) / (n_a + n_b)
    if pooled in (0.0, 1.0):
        return StatTestResult("z-proportion", 0.0, 0.5, "none", degenerate=True)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b))
    z = (exec_a / n_a - exec_b / n_b) / se
    direction = "a" if z > 0 else "b" if z < 0 else "none"
    return StatTestResult("z-proportion", z, _upper_tail(z), direction)


def _doubled_midranks(values: Sequence[float]) -> list[int]:
    """Midranks times two, so tied ranks stay integral."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = i + j + 2  # 2 * mean of 1-based ranks i+1..j+1
        i = j + 1
    return ranks


def _exact_lower_p(ranks: list[int], nx: int, observed: int) -> float:
    """P(sum of nx ranks <= observed) over all equally likely splits."""
    # ways[k][s]: subsets of size k with doubled rank sum s
    ways: list[Counter] = [Counter() for _ in range(nx + 1)]
    ways[0][0] = 1
    for r in ranks:
        for k in range(min(nx, len(ranks)) - 1, -1, -1):
            for s, c in ways[k].items():
                ways[k + 1][s + r] += c
    hits = sum(c for s, c in ways[nx].items() if s <= observed)
    total = math.comb(len(ranks), nx)
    return float(Fraction(hits, total))


def mann_whitney_u(xs: Sequence[float], ys: Sequence[float]) -> StatTestResult:
    """U test for "xs tend to be smaller than ys"; p = P(U <= U_obs) under H0.

    Exact enumeration when both samples have at most 8 values, otherwise
    the normal approximation with tie-corrected variance and a continuity
    correction of one half.
    """
    if not xs or not ys:
        raise ValueError("both samples must be nonempty")
    nx, ny = len(xs), len(ys)
    pooled = list(xs) + list(ys)
    ranks = _doubled_midranks(pooled)
    rx2 = sum(ranks[:nx])
    u = rx2 / 2.0 - nx * (nx + 1) / 2.0
    if max(nx, ny) <= EXACT_MAX_N:
        p = _exact_lower_p(ranks, nx, rx2)
    else:
        n = nx + ny
        ties = sum(t**3 - t for t in Counter(pooled).values())
        var = nx * ny / 12.0 * ((n + 1) - ties / (n * (n - 1)))
        mean = nx * ny / 2.0
        if var <= 0:
            p = 1.0 if u >= mean else 0.0
        else:
            z = (u + 0.5 - mean) / math.sqrt(var)
            p = min(1.0, 0.5 * math.erfc(-z / math.sqrt(2.0)))
    value, magnitude = a12(xs, ys)
    direction = "a" if value < 0.5 else "b" if value > 0.5 else "none"
    return StatTestResult("mann-whitney-u", u, p, direction, value, magnitude)


def a12_magnitude(value: float) -> str:
    """Map A12 to negligible/small/medium/large, symmetric around 0.5."""
    d = min(value, 1.0 - value)
    if d <= A12_LARGE + _EPS:
        return "large"
    if d <= A12_MEDIUM + _EPS:
        return "medium"
    if d <= A12_SMALL + _EPS:
        return "small"
    return "negligible"


def a12(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, str]:
    """Vargha-Delaney A12: P(x > y) + 0.5 P(x == y) over all pairs."""
    if not xs or not ys:
        raise ValueError("both samples must be nonempty")
    more = ties = 0
    for x in xs:
        for y in ys:
            if x > y:
                more += 1
            elif x == y:
                ties += 1
    value = (2 * more + ties) / (2 * len(xs) * len(ys))
    return value, a12_magnitude(value)
