"""
The command line on the bundled test fixtures
=============================================

Every capability is also reachable through the ``optspec`` command. This
script drives it over the fixtures in ``tests/fixtures`` with the scripted
backend, so it needs no network access or credentials.
"""
from __future__ import annotations

import subprocess
import sys
import tempfile
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
BACKEND = f"scripted:{FIXTURES / 'scripts' / 'bench.json'}"
work = Path(tempfile.mkdtemp(prefix="optspec-cli-"))


def optspec(*args) -> int:
    cmd = [sys.executable, "-m", "optspec.cli", *map(str, args)]
    print("$ optspec", " ".join(map(str, args)))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout + proc.stderr, end="")
    print(f"[exit {proc.returncode}]\n")
    return proc.returncode


# %% Bind tables, then solve a hand-written model against them
optspec("bind", FIXTURES / "bundles" / "transport", "--check")
optspec("bind", FIXTURES / "bundles" / "transport", "--out", work / "transport.dat")
optspec("solve", FIXTURES / "specs" / "transport" / "model.mod", work / "transport.dat")
optspec("solve", FIXTURES / "specs" / "transport" / "model_infeasible.mod", work / "transport.dat")

# %% Single runs and a full bench; the bench resumes where it stopped
optspec("--llm-backend", BACKEND, "run", FIXTURES / "bundles" / "production", "Ampl2", "--records", work / "one")
optspec("--llm-backend", BACKEND, "bench", FIXTURES / "bundles", "--runs", "1", "--records", work / "bench")
optspec("--llm-backend", BACKEND, "bench", FIXTURES / "bundles", "--runs", "1", "--records", work / "bench")

# %% Tables and comparisons
(work / "cmp.toml").write_text('[[comparison]]\na = "Ampl4"\nb = "Python4"\n')
optspec("report", work / "bench", "--comparisons", work / "cmp.toml")
print((work / "bench" / "report" / "report.md").read_text())
