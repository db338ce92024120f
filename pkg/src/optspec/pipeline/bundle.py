"""Problem bundles: a directory with a description, data and a ground truth.

Layout::

    description.md        natural-language problem statement
    tables/*.csv          external data
    binding.manifest      which columns feed which sets and parameters
    ground_truth.txt      optimal objective, one decimal number
    inline/description.md optional; the statement with data values written in
    notes.md              optional
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ..databind import BindError, BoundData, IngestError, ManifestError, bind, load_manifest, load_tables
from ..databind.tables import parse_decimal


class BundleError(ValueError):
    """A bundle directory that cannot be used as configured."""


@dataclass(frozen=True)
class ProblemBundle:
    id: str
    root: Path
    description: str | None
    ground_truth: float
    manifest_path: Path | None = None
    inline_description: str | None = None
    notes: str | None = None
    data: BoundData | None = None

    @classmethod
    def load(cls, path: str | Path, *, baseline: bool = False) -> "ProblemBundle":
        """Read and bind a bundle. ``baseline`` needs only the inline description."""
        root = Path(path)
        if not root.is_dir():
            raise BundleError(f"{root} is not a bundle directory")
        truth_path = root / "ground_truth.txt"
        if not truth_path.is_file():
            raise BundleError(f"{root.name}: ground_truth.txt is missing")
        truth = parse_decimal(truth_path.read_text(encoding="utf-8").strip())
        if truth is None or not math.isfinite(truth):
            raise BundleError(f"{root.name}: ground_truth.txt must hold one decimal number")

        description = _text(root / "description.md")
        inline = _text(root / "inline" / "description.md")
        notes = _text(root / "notes.md")
        manifest_path = root / "binding.manifest"
        data = None
        if baseline:
            if inline is None:
                raise BundleError(f"{root.name}: baseline mode needs inline/description.md with the data values")
        else:
            if description is None:
                raise BundleError(f"{root.name}: description.md is missing or empty")
            if not manifest_path.is_file():
                raise BundleError(f"{root.name}: binding.manifest is missing")
            try:
                manifest = load_manifest(manifest_path)
                data = bind(manifest, None, load_tables(manifest.table_paths()))
            except (ManifestError, IngestError, BindError) as err:
                raise BundleError(f"{root.name}: {err}") from err
        return cls(
            root.name, root, description, truth,
            manifest_path if manifest_path.is_file() else None, inline, notes, data,
        )


def _text(path: Path) -> str | None:
    if not path.is_file():
        return None
    text = path.read_text(encoding="utf-8").strip()
    return text or None


def load_bundles(dataset: str | Path, *, baseline: bool = False) -> list[ProblemBundle]:
    """Every bundle directory under ``dataset``, sorted by id."""
    root = Path(dataset)
    if not root.is_dir():
        raise BundleError(f"{root} is not a directory")
    dirs = sorted(p for p in root.iterdir() if (p / "ground_truth.txt").is_file())
    if not dirs:
        raise BundleError(f"{root} contains no bundles")
    return [ProblemBundle.load(p, baseline=baseline) for p in dirs]
