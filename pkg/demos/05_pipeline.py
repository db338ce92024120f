"""
From description to solved model, with refinement
=================================================

A problem bundle holds a description, a ground-truth optimum and a data
manifest. A variant decides the target language, whether the description
is structured first, and whether solver feedback is sent back for repair.
Here a scripted model first answers with a broken specification and then
with a fixed one.
"""
from __future__ import annotations

import tempfile
from pathlib import Path

from optspec.llm import Gateway, LlmConfig, ScriptedBackend
from optspec.pipeline import ProblemBundle, RecordStore, preset, run_variant

root = Path(tempfile.mkdtemp(prefix="optspec-bundle-"))
(root / "tables").mkdir()
(root / "tables" / "items.csv").write_text("item,profit,hours\nchair,30,2\ntable,50,5\n")
(root / "description.md").write_text(
    "A workshop builds chairs and tables. Each piece earns a profit and takes a "
    "number of hours; 40 hours are available. Maximize the total profit.\n"
)
(root / "ground_truth.txt").write_text("600\n")
(root / "binding.manifest").write_text("""
[sets.ITEMS]
table = "tables/items.csv"
column = "item"

[params.profit]
table = "tables/items.csv"
keys = ["item"]
value = "profit"

[params.hours]
table = "tables/items.csv"
keys = ["item"]
value = "hours"

[params.available]
inline = 40
""")

FIXED = """```ampl
set ITEMS;
param profit {ITEMS};
param hours {ITEMS};
param available;
var build {ITEMS} >= 0;
maximize Profit: sum {i in ITEMS} profit[i] * build[i];
subject to Time: sum {i in ITEMS} hours[i] * build[i] <= available;
```"""
BROKEN = FIXED.replace("<= available;", "<= available")

bundle = ProblemBundle.load(root)
gateway = Gateway(LlmConfig(ScriptedBackend((BROKEN, FIXED), name="demo")))

# %% Ampl2: raw description, refinement on
record = run_variant(bundle, preset("Ampl2"), gateway)
print(record.outcome_class, record.objective, "after", record.refinement_count, "refinement(s)")
for attempt in record.spec_history:
    print("-", attempt.outcome_class, attempt.kind)
print(record.spec_history[0].feedback)

# %% Every prompt and response is kept as a digest in the record
for entry in record.prompt_transcript:
    print(entry["stage"], entry["prompt_sha256"][:12], entry["response_sha256"][:12])

# %% Records go to an append-only store keyed by (problem, variant, model, run)
store = RecordStore(root / "records")
print(store.put(record))
print(len(store), "record(s) stored")
