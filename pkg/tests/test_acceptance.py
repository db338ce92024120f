"""Acceptance suite: one test per criterion, each with its runtime budget.

Every check prints a PASS/FAIL/SKIP line with its wall time; the lines are
repeated in a block at the end of the module. Run with
``pytest tests/test_acceptance.py -v`` (or ``python tests/test_acceptance.py``).
"""
from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass
from typing import Callable

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportions_ztest

from conftest import BUNDLES, SHOP_POLICY, FIXTURES, SPECS, script_gateway, scripted_gateway
from oracles import close, exact_u_lower_p, lp_oracle, milp_oracle, random_lp
from optspec.ampl import ObjectivePolicy, instantiate, parse_data, parse_model, render_model, validate
from optspec.evalstats import a12, a12_magnitude, mann_whitney_u, relative_error, report, summarize, z_test_proportions
from optspec.llm import Gateway, LlmConfig, RemoteBackend
from optspec.pipeline import (
    PRESETS,
    ProblemBundle,
    RecordStore,
    RunRecord,
    bench,
    cell_summaries,
    load_bundles,
    preset,
    run_baseline,
    run_variant,
)
from optspec.solver import RuntimeFailure, Solved, solve_lp, solve_milp

RESULTS: dict[int, str] = {}


@pytest.fixture(scope="module", autouse=True)
def summary_block(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    lines = ["", "acceptance summary:"] + [RESULTS[k] for k in sorted(RESULTS)]
    for line in lines:
        if reporter is not None:
            reporter.write_line(line)
        else:
            print(line)


def check(number: int, title: str, budget: float, body: Callable[[], str | None]) -> None:
    """Run ``body``, enforce the time budget, print and record one line."""
    started = time.perf_counter()
    try:
        detail = body()
    except BaseException as exc:
        elapsed = time.perf_counter() - started
        if isinstance(exc, pytest.skip.Exception):
            line = f"criterion {number} SKIP {title}: {exc.msg}"
        else:
            line = f"criterion {number} FAIL {title} ({elapsed:.2f}s): {type(exc).__name__}: {exc}"
        RESULTS[number] = line
        print(line)
        raise
    elapsed = time.perf_counter() - started
    ok = elapsed < budget
    suffix = f"; {detail}" if detail else ""
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s of {budget:g}s{suffix})"
    RESULTS[number] = line
    print(line)
    assert ok, f"criterion {number} exceeded its {budget:g}s budget: {elapsed:.2f}s"


def status(outcome) -> str:
    if isinstance(outcome, Solved):
        return "optimal"
    assert isinstance(outcome, RuntimeFailure)
    return outcome.kind


# -- 1 ---------------------------------------------------------------------------------------


def test_criterion_1_shop_round_trip(shop_text):
    def body():
        model = parse_model(shop_text[0])
        data = parse_data(shop_text[1])
        rep = validate(model, data)  # fatal problems raise
        assert rep.warnings == []
        inst = instantiate(model, data, ObjectivePolicy.parse(SHOP_POLICY))
        assert (len(inst.variables), len(inst.rows)) == (8, 4)
        assert parse_model(render_model(model)) == model
        return "8 variables, 4 rows, render re-parses equal"

    check(1, "production model round-trip", 1.0, body)


# -- 2 ---------------------------------------------------------------------------------------


def test_criterion_2_lp_oracle():
    def body():
        rng = random.Random(2)
        counts: dict[str, int] = {}
        for i in range(200):
            inst = random_lp(rng)
            assert len(inst.variables) <= 4 and len(inst.rows) <= 5
            assert all(0 <= v.lower <= v.upper <= 10 for v in inst.variables)
            expected, value = lp_oracle(inst)
            out = solve_lp(inst)
            assert status(out) == expected, f"instance {i}: {status(out)} vs {expected}"
            if expected == "optimal":
                assert close(out.objective, float(value)), f"instance {i}: {out.objective} vs {value}"
            counts[expected] = counts.get(expected, 0) + 1
        return ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))

    check(2, "LP vs rational vertex enumeration, 200 instances", 30.0, body)


# -- 3 ---------------------------------------------------------------------------------------


def test_criterion_3_milp_oracle():
    def body():
        rng = random.Random(3)
        counts: dict[str, int] = {}
        for i in range(100):
            inst = random_lp(rng, integer=True)
            assert len(inst.variables) <= 3 and all(v.is_integer for v in inst.variables)
            assert all(0 <= v.lower <= v.upper <= 10 for v in inst.variables)
            expected, value = milp_oracle(inst)
            out = solve_milp(inst)
            assert status(out) == expected, f"instance {i}: {status(out)} vs {expected}"
            if expected == "optimal":
                assert out.objective == value, f"instance {i}: {out.objective} vs {value}"
            counts[expected] = counts.get(expected, 0) + 1
        return ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))

    check(3, "MILP vs exhaustive enumeration, 100 instances", 30.0, body)


# -- 4 ---------------------------------------------------------------------------------------


@dataclass
class Rec:
    problem_id: str
    outcome_class: str
    objective: float | None = None


_RECORDS = st.lists(
    st.builds(
        Rec,
        st.sampled_from(["p1", "p2", "p3"]),
        st.sampled_from(["solved", "compile-error", "runtime-error"]),
        st.floats(-1e6, 1e6, allow_nan=False),
    ),
    max_size=40,
)


@settings(max_examples=200, deadline=None, database=None)
@given(_RECORDS)
def _partition_identity(records):
    s = summarize(records, {"p1": 3.0, "p2": -2.0, "p3": 0.0})
    assert s.n_exec + s.n_ce + s.n_re == s.n_total == len(records)
    if s.n_total:
        assert s.success_rate == s.n_exec / s.n_total


def test_criterion_4_metrics_identities():
    def body():
        _partition_identity()
        assert relative_error(11, 10) == pytest.approx(0.1, abs=1e-15)
        rng = random.Random(4)
        for _ in range(1000):
            s, g = rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)
            c = rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3)
            assert relative_error(c * s, c * g) == pytest.approx(relative_error(s, g), rel=1e-12, abs=1e-15)
        return "200 fuzzed record sets, 1000 scale triples"

    check(4, "metric identities", 5.0, body)


# -- 5 ---------------------------------------------------------------------------------------


def test_criterion_5_statistics():
    def body():
        rng = random.Random(5)
        for _ in range(500):
            xs = [rng.randint(0, 6) for _ in range(rng.randint(1, 6))]
            ys = [rng.randint(0, 6) for _ in range(rng.randint(1, 6))]
            assert abs(mann_whitney_u(xs, ys).p_value - float(exact_u_lower_p(xs, ys))) <= 1e-12
            assert a12(xs, ys)[0] + a12(ys, xs)[0] == 1.0
        cutoffs = {0.43: "small", 0.35: "medium", 0.28: "large", 0.45: "negligible"}
        assert {v: a12_magnitude(v) for v in cutoffs} == cutoffs
        r = z_test_proportions(284, 300, 212, 300)
        z, p = proportions_ztest([284, 212], [300, 300], alternative="larger")
        assert r.statistic > 0 and r.p_value < 0.05
        assert abs(r.statistic - z) <= 1e-9 and abs(r.p_value - p) <= 1e-9
        return f"Z={r.statistic:.4f}, p={r.p_value:.3g}"

    check(5, "statistics exactness", 10.0, body)


# -- 6 ---------------------------------------------------------------------------------------


def test_criterion_6_pipeline_semantics():
    broken = (SPECS / "production" / "model_broken.mod").read_text()
    fixed = (FIXTURES / "shop" / "production.mod").read_text()
    policy = ObjectivePolicy.parse(SHOP_POLICY)

    def body():
        bundle = ProblemBundle.load(BUNDLES / "production")
        refine = preset("Ampl2", objective_policy=policy)
        one_off = preset("Ampl1", objective_policy=policy)
        a = run_variant(bundle, refine, scripted_gateway(broken, fixed))
        assert a.outcome_class == "solved" and a.refinement_count == 1
        b = run_variant(bundle, one_off, scripted_gateway(broken, fixed))
        assert b.outcome_class == "compile-error" and b.refinement_count == 0
        c = run_variant(bundle, refine, scripted_gateway(*[broken] * 6))
        assert c.outcome_class == "compile-error" and c.refinement_count == 5
        assert all(stage["stage"] != "structure" for r in (a, b, c) for stage in r.prompt_transcript)
        return "(a) solved after 1 refinement, (b) compile-error, (c) 5 refinements, (d) no structure prompt"

    check(6, "pipeline semantics with a scripted backend", 5.0, body)


# -- 7 ---------------------------------------------------------------------------------------


class Interrupt(Exception):
    pass


def test_criterion_7_bench_determinism(tmp_path):
    def body():
        matrix = [preset(label, runs=1) for label in PRESETS]
        bundles = load_bundles(BUNDLES)
        assert len(bundles) == 2
        first = bench(bundles, matrix, script_gateway("bench.json"), store=RecordStore(tmp_path / "one"))
        assert len(first) == 16
        first_report = report(cell_summaries(RecordStore(tmp_path / "one").load_all()))

        seen: list[RunRecord] = []

        def stop_at_eight(record: RunRecord) -> None:
            seen.append(record)
            if len(seen) == 8:
                raise Interrupt

        with pytest.raises(Interrupt):
            bench(bundles, matrix, script_gateway("bench.json"), store=RecordStore(tmp_path / "two"),
                  on_record=stop_at_eight)
        persisted = RecordStore(tmp_path / "two").digests()
        assert len(persisted) == 8
        rerun: list[RunRecord] = []
        bench(bundles, matrix, script_gateway("bench.json"), store=RecordStore(tmp_path / "two"),
              on_record=rerun.append)
        assert len(rerun) == 8
        assert not {r.key for r in rerun} & {r.key for r in seen}
        after = RecordStore(tmp_path / "two").digests()
        assert {k: after[k] for k in persisted} == persisted
        second_report = report(cell_summaries(RecordStore(tmp_path / "two").load_all()))

        out = {}
        for name, rep in (("one", first_report), ("two", second_report)):
            rep.write(tmp_path / f"{name}-report")
            out[name] = {p.name: p.read_bytes() for p in sorted((tmp_path / f"{name}-report").iterdir())}
        assert out["one"] == out["two"] and len(out["one"]) == 4
        return "16 records, identical report bytes, resume re-ran 8 of 16"

    check(7, "bench determinism and resumption", 10.0, body)


# -- 8 ---------------------------------------------------------------------------------------


def test_criterion_8_baseline(tmp_path):
    bakery = FIXTURES / "baseline" / "bakery"

    def body():
        bundle = ProblemBundle.load(bakery, baseline=True)
        record = run_baseline(bundle, preset("Ampl1", scratch_root=tmp_path / "scratch"),
                              script_gateway("baseline.json"))
        assert record.outcome_class == "solved" and record.baseline
        on_disk = [p for root in (bakery, tmp_path) for p in root.rglob("*") if p.is_file()]
        assert not [p for p in on_disk if p.suffix in (".dat", ".manifest")]
        unbound = (SPECS / "bakery" / "spec_unbound.mod").read_text()
        bad = run_baseline(bundle, preset("Ampl1"), scripted_gateway(unbound))
        assert bad.outcome_class == "compile-error" and bad.final_outcome["kind"] == "unresolved-symbol"
        return f"objective {record.objective:g}, unresolved symbol is a compile-error"

    check(8, "baseline mode with inline data", 2.0, body)


# -- 9 ---------------------------------------------------------------------------------------


def live_backend() -> RemoteBackend | None:
    endpoint = os.environ.get("OPTSPEC_LIVE_ENDPOINT")
    model = os.environ.get("OPTSPEC_LIVE_MODEL")
    token_env = os.environ.get("OPTSPEC_LIVE_TOKEN_ENV", "OPTSPEC_LIVE_TOKEN")
    if not (endpoint and model and os.environ.get(token_env)):
        return None
    return RemoteBackend(endpoint, model, token_env, os.environ.get("OPTSPEC_LIVE_ADAPTER", "openai-chat"))


def test_criterion_9_live_smoke(tmp_path):
    def body():
        backend = live_backend()
        if backend is None:
            pytest.skip("no live credentials (set OPTSPEC_LIVE_ENDPOINT, OPTSPEC_LIVE_MODEL, OPTSPEC_LIVE_TOKEN)")
        llm = LlmConfig(backend)
        bundle = ProblemBundle.load(BUNDLES / "production")
        with Gateway(llm) as gw:
            record = run_variant(bundle, preset("Ampl4", llm=llm, runs=1), gw)
        assert record.outcome_class in ("solved", "compile-error", "runtime-error")
        assert len(record.spec_history) == 1 + record.refinement_count
        assert RunRecord.from_dict(json.loads(record.to_json())) == record
        RecordStore(tmp_path / "store").put(record)
        return f"{record.outcome_class}, {record.refinement_count} refinement(s)"

    check(9, "live smoke against a remote backend", 300.0, body)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
