"""Append-only record store: one JSON file per run plus an index."""
from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from pathlib import Path

from .run import RunRecord

_UNSAFE = re.compile(r"[^A-Za-z0-9_.-]+")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def record_filename(key: tuple[str, str, str, int]) -> str:
    problem, variant, model, run = key
    parts = [_UNSAFE.sub("_", str(p)) for p in (problem, variant, model)]
    return "__".join(parts) + f"__r{run}.json"


def key_text(key: tuple[str, str, str, int]) -> str:
    return "|".join(map(str, key))


class RecordStore:
    """Records live in ``root/records``; ``root/index.json`` maps keys to files.

    Each record file is written atomically before the index is updated, so a
    crash leaves at worst a record the index does not list yet; ``open``
    re-indexes such files.
    """

    INDEX = "index.json"

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.records_dir = self.root / "records"
        self.records_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[str, dict] = {}
        index_path = self.root / self.INDEX
        if index_path.is_file():
            self._index = json.loads(index_path.read_text(encoding="utf-8"))
        self._reindex_orphans()

    def _reindex_orphans(self) -> None:
        listed = {entry["file"] for entry in self._index.values()}
        changed = False
        for path in sorted(self.records_dir.glob("*.json")):
            if path.name in listed:
                continue
            record = RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8")))
            self._index[key_text(record.key)] = {"file": path.name, "digest": record.digest()}
            changed = True
        if changed:
            self._write_index()

    def _write_index(self) -> None:
        text = json.dumps(dict(sorted(self._index.items())), indent=2) + "\n"
        _atomic_write(self.root / self.INDEX, text)

    def __contains__(self, key: tuple[str, str, str, int]) -> bool:
        with self._lock:
            return key_text(key) in self._index

    def __len__(self) -> int:
        return len(self._index)

    def put(self, record: RunRecord) -> Path:
        path = self.records_dir / record_filename(record.key)
        _atomic_write(path, record.to_json())
        with self._lock:
            self._index[key_text(record.key)] = {"file": path.name, "digest": record.digest()}
            self._write_index()
        return path

    def digests(self) -> dict[str, str]:
        with self._lock:
            return {k: v["digest"] for k, v in sorted(self._index.items())}

    def load(self, key: tuple[str, str, str, int]) -> RunRecord:
        entry = self._index[key_text(key)]
        return RunRecord.from_dict(json.loads((self.records_dir / entry["file"]).read_text(encoding="utf-8")))

    def load_all(self) -> list[RunRecord]:
        """Every record, sorted by (problem, variant, model, run)."""
        with self._lock:
            files = [entry["file"] for entry in self._index.values()]
        records = [
            RunRecord.from_dict(json.loads((self.records_dir / f).read_text(encoding="utf-8"))) for f in files
        ]
        return sorted(records, key=lambda r: r.key)
