"""The ablation bench: every (bundle, variant, run) cell, resumable."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Sequence

from ..evalstats import MetricsSummary, summarize
from ..llm.gateway import Gateway
from .bundle import ProblemBundle
from .config import VariantConfig
from .run import RunRecord, run_baseline, run_variant
from .store import RecordStore

Cell = tuple[str, str]  # (variant, model)


def bench(
    bundles: Sequence[ProblemBundle],
    matrix: Sequence[VariantConfig],
    gateway: Gateway,
    *,
    store: RecordStore | None = None,
    jobs: int = 1,
    baseline: bool = False,
    on_record: Callable[[RunRecord], None] | None = None,
) -> list[RunRecord]:
    """Run all cells not already in ``store`` and return every record, sorted.

    Each finished record is persisted before ``on_record`` sees it, so an
    interrupted bench resumes where it stopped.
    """
    labels = [cfg.label for cfg in matrix]
    if len(set(labels)) != len(labels):
        raise ValueError("variant labels in a bench matrix must be unique")
    ids = [b.id for b in bundles]
    if len(set(ids)) != len(ids):
        raise ValueError("bundle ids in a bench must be unique")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    model = gateway.model_name
    runner = run_baseline if baseline else run_variant
    cells = [
        (bundle, cfg, run)
        for bundle in bundles for cfg in matrix for run in range(cfg.runs)
    ]
    done: list[RunRecord] = []
    pending = []
    for bundle, cfg, run in cells:
        key = (bundle.id, cfg.label, model, run)
        if store is not None and key in store:
            done.append(store.load(key))
        else:
            pending.append((bundle, cfg, run))

    def finish(record: RunRecord) -> None:
        if store is not None:
            store.put(record)
        done.append(record)
        if on_record is not None:
            on_record(record)

    if jobs == 1:
        for bundle, cfg, run in pending:
            finish(runner(bundle, cfg, gateway, run))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(runner, bundle, cfg, gateway, run) for bundle, cfg, run in pending]
            try:
                for future in as_completed(futures):
                    finish(future.result())
            except BaseException:
                for future in futures:
                    future.cancel()
                raise
    return sorted(done, key=lambda r: r.key)


def cell_summaries(records: Sequence[RunRecord]) -> dict[Cell, MetricsSummary]:
    """Metrics per (variant, model), in sorted cell order."""
    grouped: dict[Cell, list[RunRecord]] = {}
    for record in sorted(records, key=lambda r: r.key):
        grouped.setdefault((record.variant, record.model), []).append(record)
    out = {}
    for cell in sorted(grouped):
        rows = grouped[cell]
        truths = {r.problem_id: r.ground_truth for r in rows}
        out[cell] = summarize(rows, truths)
    return out
