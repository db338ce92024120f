"""Markdown and CSV reports over per-cell metrics and pairwise comparisons.

A cell is one (variant label, model name) pair. Variants named ``Ampl<k>``
and ``Python<k>`` are treated as the two targets of the same configuration,
and each such pair gets a delta row (AMPL minus Python) for the same model.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .metrics import MetricsSummary
from .stats import StatTestResult, mann_whitney_u, z_test_proportions

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

Cell = tuple[str, str]  # (variant, model)

CELL_COLUMNS = (
    "variant", "model", "n_total", "n_exec", "success_rate", "n_ce", "n_re",
    "relerr_mean", "relerr_median", "relerr_std", "n_zero", "n_undefined",
)
DELTA_COLUMNS = (
    "pair", "model", "n_exec", "success_rate", "n_ce", "n_re",
    "relerr_mean", "relerr_median", "relerr_std", "n_zero",
)
COMPARISON_COLUMNS = (
    "label", "test", "statistic", "p_value", "p_rounded", "direction",
    "a12", "a12_magnitude", "degenerate", "significant",
)

_TARGET_LABEL = re.compile(r"^(Ampl|Python)(.*)$")


class ReportConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Comparison:
    a: Cell
    b: Cell
    tests: tuple[str, ...] = ("z", "u")

    @property
    def label(self) -> str:
        if self.a[1] == self.b[1]:
            return f"{self.a[0]} vs {self.b[0]} [{self.a[1]}]"
        return f"{self.a[0]}[{self.a[1]}] vs {self.b[0]}[{self.b[1]}]"


@dataclass(frozen=True)
class Report:
    markdown: str
    cells_csv: str
    deltas_csv: str
    comparisons_csv: str

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "report.md": self.markdown,
            "cells.csv": self.cells_csv,
            "deltas.csv": self.deltas_csv,
            "comparisons.csv": self.comparisons_csv,
        }
        paths = []
        for name, text in files.items():
            path = out / name
            path.write_text(text, encoding="utf-8", newline="")
            paths.append(path)
        return paths


def load_comparisons(path: str | Path, cells: Mapping[Cell, MetricsSummary] | None = None) -> list[Comparison]:
    """Read a comparisons file.

    ::

        [[comparison]]
        a = "Ampl4"
        b = "Python4"
        model = "o4-mini"     # optional; default is every model having both
        tests = ["z", "u"]    # optional
    """
    try:
        doc = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ReportConfigError(f"cannot read comparisons file {path}: {exc}") from exc
    unknown = set(doc) - {"comparison"}
    if unknown:
        raise ReportConfigError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    out = []
    for i, entry in enumerate(doc.get("comparison", [])):
        extra = set(entry) - {"a", "b", "model", "model_a", "model_b", "tests"}
        if extra or "a" not in entry or "b" not in entry:
            raise ReportConfigError(f"comparison #{i + 1} needs keys a and b only (plus model/tests)")
        tests = tuple(entry.get("tests", ("z", "u")))
        if not tests or set(tests) - {"z", "u"}:
            raise ReportConfigError(f"comparison #{i + 1}: tests must be a subset of ['z', 'u']")
        if "model_a" in entry or "model_b" in entry:
            out.append(Comparison((entry["a"], entry["model_a"]), (entry["b"], entry["model_b"]), tests))
            continue
        if "model" in entry:
            models = [entry["model"]]
        else:
            models = sorted({m for (v, m) in (cells or {}) if v == entry["a"]}
                            & {m for (v, m) in (cells or {}) if v == entry["b"]})
        out.extend(Comparison((entry["a"], m), (entry["b"], m), tests) for m in models)
    return out


def run_comparisons(
    cells: Mapping[Cell, MetricsSummary], comparisons: Sequence[Comparison]
) -> list[StatTestResult]:
    results = []
    for cmp in comparisons:
        for cell in (cmp.a, cmp.b):
            if cell not in cells:
                raise ReportConfigError(f"no records for cell {cell[0]} / {cell[1]}")
        a, b = cells[cmp.a], cells[cmp.b]
        if "z" in cmp.tests:
            r = z_test_proportions(a.n_exec, a.n_total, b.n_exec, b.n_total)
            results.append(_labelled(r, f"{cmp.label} executability"))
        if "u" in cmp.tests and a.relerrs and b.relerrs:
            r = mann_whitney_u(a.relerrs, b.relerrs)
            results.append(_labelled(r, f"{cmp.label} RelErr"))
    return results


def _labelled(r: StatTestResult, label: str) -> StatTestResult:
    return StatTestResult(r.test, r.statistic, r.p_value, r.direction, r.a12,
                          r.a12_magnitude, r.degenerate, label)


def _num(v: float | int | None) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _fixed(v: float | None, digits: int = 4) -> str:
    return "n/a" if v is None else f"{v:.{digits}f}"


def _signed(v: float | int | None, digits: int = 4) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, int):
        return f"{v:+d}"
    return f"{v:+.{digits}f}"


def _diff(a, b):
    return None if a is None or b is None else a - b


def delta_rows(cells: Mapping[Cell, MetricsSummary]) -> list[dict]:
    """AMPL minus Python for every ``Ampl<k>``/``Python<k>`` pair of one model."""
    rows = []
    for variant, model in sorted(cells):
        m = _TARGET_LABEL.match(variant)
        if not m or m.group(1) != "Ampl":
            continue
        other = ("Python" + m.group(2), model)
        if other not in cells:
            continue
        a, b = cells[(variant, model)], cells[other]
        rows.append({
            "pair": f"{variant}-{other[0]}",
            "model": model,
            "n_exec": a.n_exec - b.n_exec,
            "success_rate": a.success_rate - b.success_rate,
            "n_ce": a.n_ce - b.n_ce,
            "n_re": a.n_re - b.n_re,
            "relerr_mean": _diff(a.relerr_mean, b.relerr_mean),
            "relerr_median": _diff(a.relerr_median, b.relerr_median),
            "relerr_std": _diff(a.relerr_std, b.relerr_std),
            "n_zero": a.n_zero - b.n_zero,
        })
    return rows


def _csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_num(row[c]) if not isinstance(row[c], str) else row[c] for c in columns])
    return buf.getvalue()


def _md_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return lines


def report(
    cells: Mapping[Cell, MetricsSummary], comparisons: Sequence[StatTestResult] = ()
) -> Report:
    """Render the cell tables, delta rows and comparison results.

    Output depends only on the inputs (cells are sorted), so identical
    inputs give byte-identical documents.
    """
    if not cells:
        raise ValueError("report needs at least one cell")
    keys = sorted(cells)
    deltas = delta_rows(cells)

    md = ["# Evaluation report", "", "## Executability", ""]
    exec_rows = []
    for v, m in keys:
        s = cells[(v, m)]
        exec_rows.append([v, m, str(s.n_total), str(s.n_exec), f"{100 * s.success_rate:.1f}%",
                          str(s.n_ce), str(s.n_re)])
    for d in deltas:
        exec_rows.append([f"Δ {d['pair']}", d["model"], "", _signed(d["n_exec"]),
                          f"{100 * d['success_rate']:+.1f}%", _signed(d["n_ce"]), _signed(d["n_re"])])
    md += _md_table(["Variant", "Model", "N", "#Exec", "Success", "#CE", "#RE"], exec_rows)

    md += ["", "## Correctness (RelErr over executed specifications)", ""]
    corr_rows = []
    for v, m in keys:
        s = cells[(v, m)]
        corr_rows.append([v, m, _fixed(s.relerr_mean), _fixed(s.relerr_median), _fixed(s.relerr_std),
                          str(s.n_zero), str(s.n_undefined)])
    for d in deltas:
        corr_rows.append([f"Δ {d['pair']}", d["model"], _signed(d["relerr_mean"]),
                          _signed(d["relerr_median"]), _signed(d["relerr_std"]), _signed(d["n_zero"]), ""])
    md += _md_table(["Variant", "Model", "Mean", "Med", "Std", "#Zero", "#Undef"], corr_rows)

    if deltas:
        md += ["", "Δ rows are AMPL minus Python for the same configuration and model."]

    comp_rows = []
    if comparisons:
        md += ["", "## Comparisons", ""]
        table = []
        for r in comparisons:
            table.append([r.label, r.test, f"{r.statistic:.4f}", f"{r.p_value:.6g}", f"{r.p_value:.2f}",
                          r.direction, _fixed(r.a12, 3), r.a12_magnitude or "",
                          "yes" if r.significant else "no"])
            comp_rows.append({
                "label": r.label, "test": r.test, "statistic": r.statistic, "p_value": r.p_value,
                "p_rounded": f"{r.p_value:.2f}", "direction": r.direction, "a12": r.a12,
                "a12_magnitude": r.a12_magnitude or "", "degenerate": str(r.degenerate).lower(),
                "significant": str(r.significant).lower(),
            })
        md += _md_table(["Comparison", "Test", "Statistic", "p", "p (2dp)", "Favors", "A12",
                         "Magnitude", "A better at 5%"], table)
        md += ["", "Favors: a = first cell, b = second cell. One-sided tests; "
               "executability favors the higher rate, RelErr the lower values."]

    cell_rows = []
    for v, m in keys:
        s = cells[(v, m)]
        cell_rows.append({
            "variant": v, "model": m, "n_total": s.n_total, "n_exec": s.n_exec,
            "success_rate": s.success_rate, "n_ce": s.n_ce, "n_re": s.n_re,
            "relerr_mean": s.relerr_mean, "relerr_median": s.relerr_median,
            "relerr_std": s.relerr_std, "n_zero": s.n_zero, "n_undefined": s.n_undefined,
        })
    return Report(
        markdown="\n".join(md) + "\n",
        cells_csv=_csv(CELL_COLUMNS, cell_rows),
        deltas_csv=_csv(DELTA_COLUMNS, deltas),
        comparisons_csv=_csv(COMPARISON_COLUMNS, comp_rows),
    )
