"""
Talking to a language model
===========================

Every prompt goes through a gateway. A scripted backend replays canned
answers so that runs are reproducible offline; a remote backend speaks a
chat-completion HTTP protocol with retries and a rate limit. Prompts are
built from instructions, few-shot examples and the problem at hand.
"""
from __future__ import annotations

from optspec.llm import (
    Gateway,
    GatewayError,
    LlmConfig,
    RemoteBackend,
    ScriptedBackend,
    ScriptRule,
    load_few_shots,
    parse_structured,
    render_structured,
    structure_prompt,
    load_structure_shots,
)

DESCRIPTION = (
    "A bakery bakes loaves that sell for a fixed price each. Every loaf uses "
    "flour and only so much flour is on hand. Decide how many loaves to bake."
)

ANSWER = """OBJECTIVES:
- maximize the revenue from loaves sold
PARAMETERS:
price | scalar | selling price per loaf
flour | scalar | flour on hand
use | scalar | flour needed per loaf
VARIABLES:
loaves | scalar | loaves to bake
CONSTRAINTS:
- the loaves use no more flour than is on hand
REWRITTEN:
Bake \\var{loaves} loaves at \\param{price} each, using \\param{use} of the \\param{flour} on hand.
"""

# %% Rules match on prompt content; anything else falls through to the sequence
backend = ScriptedBackend(
    sequence=("fallback answer",),
    rules=(ScriptRule(ANSWER, contains=("Answer in exactly this layout",)),),
    name="demo",
)
prompt = structure_prompt(DESCRIPTION, load_structure_shots())
print(prompt[:400], "...\n")

with Gateway(LlmConfig(backend)) as gw:
    seen = []
    gw.hooks.append(lambda p, r: seen.append(len(r)))
    problem = parse_structured(gw.complete(prompt))
    print(render_structured(problem))
    print("fallback:", gw.complete("something else"))
    try:
        gw.complete("one more")
    except GatewayError as err:
        print("exhausted:", err.kind)
    print("response sizes seen by the hook:", seen)

# %% Few-shot examples ship with the package, one folder per target
for target in ("ampl", "external-runtime"):
    shots = load_few_shots(target)
    print(target, [shot.description.split(".")[0] for shot in shots])

# %% Remote backends read their token from the environment when built
remote = LlmConfig(RemoteBackend("https://llm.example.invalid/v1/chat/completions", "some-model", "DEMO_TOKEN"))
try:
    Gateway(remote)
except GatewayError as err:
    print(err.kind, "-", err.message)
