"""Orchestration: variants, bundles, the refinement loop and the bench."""
from .bench import bench, cell_summaries
from .bundle import BundleError, ProblemBundle, load_bundles
from .config import PRESETS, VariantConfig, describe_llm, preset
from .execute import (
    DATA_DELIMITER,
    Execution,
    execute_spec,
    outcome_class,
    outcome_from_dict,
    outcome_to_dict,
    split_inline_spec,
)
from .run import RunRecord, SpecAttempt, run_baseline, run_variant
from .store import RecordStore

__all__ = [
    "DATA_DELIMITER",
    "PRESETS",
    "BundleError",
    "Execution",
    "ProblemBundle",
    "RecordStore",
    "RunRecord",
    "SpecAttempt",
    "VariantConfig",
    "bench",
    "cell_summaries",
    "describe_llm",
    "execute_spec",
    "load_bundles",
    "outcome_class",
    "outcome_from_dict",
    "outcome_to_dict",
    "preset",
    "run_baseline",
    "run_variant",
    "split_inline_spec",
]
