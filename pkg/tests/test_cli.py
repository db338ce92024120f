from __future__ import annotations

import argparse
import os
import subprocess
import sys
from pathlib import Path

import pytest
from conftest import BUNDLES, FIXTURES, SCRIPTS, SPECS

from optspec import cli
from optspec.cli import COMMANDS, CliConfig, main
from optspec.pipeline import RecordStore

GOLDEN = Path(__file__).parent / "golden"
BENCH_SCRIPT = f"scripted:{SCRIPTS / 'bench.json'}"


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def help_text(*argv: str) -> str:
    parser = cli.build_parser()
    if argv:
        sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        parser = sub.choices[argv[0]]
    return parser.format_help()


# -- help and usage -------------------------------------------------------------------------


@pytest.mark.parametrize("command", ["", *COMMANDS])
def test_help_matches_golden(command):
    name = f"help_{command or 'main'}.txt"
    text = help_text(*([command] if command else []))
    if os.environ.get("OPTSPEC_UPDATE_GOLDEN"):
        GOLDEN.mkdir(exist_ok=True)
        (GOLDEN / name).write_text(text, encoding="utf-8")
    assert text == (GOLDEN / name).read_text(encoding="utf-8")


def test_help_flag_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert capsys.readouterr().out == help_text()


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "optspec.cli", "solve", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == help_text("solve")


@pytest.mark.parametrize("argv", [
    ["--no-such-flag", "report", "x"],
    ["solve", "only-one-arg"],
    ["bogus"],
    ["--jobs", "many", "report", "x"],
])
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 64


def test_no_command_exits_64(capsys):
    code, _, err = run_cli(capsys)
    assert code == 64 and "usage:" in err


def test_nonexistent_path_exits_64(capsys, tmp_path):
    code, _, err = run_cli(capsys, "solve", tmp_path / "none.mod", tmp_path / "none.dat")
    assert code == 64 and "does not exist" in err


def test_bad_jobs_value_exits_64(capsys):
    code, _, _ = run_cli(capsys, "--jobs", "0", "report", BUNDLES)
    assert code == 64


def test_global_flags_accepted_after_command(capsys):
    code, _, err = run_cli(capsys, "solve", FIXTURES / "shop" / "production.mod",
                           FIXTURES / "shop" / "production.dat", "--timeout", "5", "--objective", "single")
    assert code == 2  # two objectives under the single policy
    assert "multiple-objectives" in err


# -- config ---------------------------------------------------------------------------------


def resolve(*argv: str) -> CliConfig:
    args = cli.build_parser().parse_args([*argv, "report", "x"])
    return CliConfig.resolve(args)


def test_config_precedence(tmp_path):
    conf = tmp_path / "optspec.toml"
    conf.write_text("[pipeline]\ntimeout = 30\njobs = 2\nseed = 7\n")
    assert resolve().timeout == 60.0
    assert resolve("--config", str(conf)).timeout == 30.0
    cfg = resolve("--config", str(conf), "--timeout", "10", "--seed", "1")
    assert (cfg.timeout, cfg.jobs, cfg.seed) == (10.0, 2, 1)


def test_digest_tracks_resolved_values(tmp_path):
    conf = tmp_path / "optspec.toml"
    conf.write_text("[pipeline]\ntimeout = 10\n")
    assert resolve("--timeout", "10").digest() == resolve("--config", str(conf)).digest()
    assert resolve().digest() != resolve("--seed", "3").digest()


@pytest.mark.parametrize("text", [
    "colour = 1\n",
    "[pipeline]\ntimeuot = 3\n",
    "[solver]\nmax_nodes = 3\n",
    "[llm]\nbackend = 'x'\n",
    "[llm.backends.a]\nendpoint = 'http://x'\nmodel = 'm'\nauth_env = 'T'\nextra = 1\n",
    "[variants.Mine]\ntarget = 'ampl'\nstructured = true\nrefinement = true\nfancy = 1\n",
    "[variants.Mine]\ntarget = 'ampl'\n",
    "not toml at all = = \n",
])
def test_bad_config_rejected(capsys, tmp_path, text):
    conf = tmp_path / "optspec.toml"
    conf.write_text(text)
    code, _, err = run_cli(capsys, "--config", conf, "report", BUNDLES)
    assert code == 64
    assert err.startswith("optspec: ")


def test_presets_overridable_by_config(tmp_path):
    conf = tmp_path / "optspec.toml"
    conf.write_text(
        "[pipeline]\nmax_refinements = 4\n"
        "[variants.Ampl4]\nmax_refinements = 2\n"
        "[variants.Mine]\ntarget = 'external-runtime'\nstructured = false\nrefinement = true\n"
    )
    cfg = resolve("--config", str(conf))
    assert cfg.variant("Ampl4", None).max_refinements == 2
    assert cfg.variant("Ampl4", None).structured is True
    assert cfg.variant("Ampl3", None).max_refinements == 4
    mine = cfg.variant("Mine", None)
    assert (mine.target, mine.structured, mine.refinement) == ("external-runtime", False, True)
    args = cli.build_parser().parse_args(["--config", str(conf), "run", "b", "Ampl4", "--max-refinements", "1"])
    assert CliConfig.resolve(args).variant("Ampl4", None).max_refinements == 1


def test_unknown_variant_exits_64(capsys, tmp_path):
    code, _, err = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "run", BUNDLES / "production", "Ampl9",
                           "--records", tmp_path)
    assert code == 64 and "Ampl9" in err


def test_digest_printed_on_every_command(capsys, tmp_path):
    for argv in (
        ["bind", BUNDLES / "transport", "--check"],
        ["solve", SPECS / "production" / "model.mod", tmp_path / "missing.dat"],
        ["report", tmp_path],
    ):
        _, _, err = run_cli(capsys, *argv)
        assert err.startswith("config digest: ")
        assert len(err.splitlines()[0].split()[-1]) == 64


# -- solve and bind -------------------------------------------------------------------------


def test_solve_shop_weighted(capsys):
    code, out, err = run_cli(capsys, "solve", FIXTURES / "shop" / "production.mod",
                             FIXTURES / "shop" / "production.dat", "--objective", "weighted:Revenue=1,Hold_Cost=-1")
    assert code == 0
    assert out == "solved objective=140\n"


def test_objective_printed_with_six_significant_digits(capsys, tmp_path):
    (tmp_path / "m.mod").write_text("param p;\nvar x >= 0, <= p;\nmaximize z: 1000 * x;\n")
    (tmp_path / "d.dat").write_text("param p := 0.123456789;\n")
    code, out, _ = run_cli(capsys, "solve", tmp_path / "m.mod", tmp_path / "d.dat", "--show-values")
    assert code == 0
    assert out.splitlines() == ["solved objective=123.457", "  x = 0.123457"]


def test_solve_compile_and_runtime_errors(capsys, tmp_path):
    dat = tmp_path / "p.dat"
    assert run_cli(capsys, "bind", BUNDLES / "production", "--out", dat)[0] == 0
    code, out, err = run_cli(capsys, "solve", SPECS / "production" / "model_broken.mod", dat)
    assert (code, out) == (2, "compile-error\n")
    assert "ERROR syntax" in err
    tdat = tmp_path / "t.dat"
    assert run_cli(capsys, "bind", BUNDLES / "transport", "--out", tdat)[0] == 0
    code, out, err = run_cli(capsys, "solve", SPECS / "transport" / "model_infeasible.mod", tdat)
    assert (code, out) == (3, "runtime-error infeasible\n")
    assert "ERROR infeasible" in err


def test_solve_iteration_limit_flag(capsys, tmp_path):
    tdat = tmp_path / "t.dat"
    run_cli(capsys, "bind", BUNDLES / "transport", "--out", tdat)
    code, out, _ = run_cli(capsys, "solve", SPECS / "transport" / "model.mod", tdat, "--max-iterations", "1")
    assert (code, out) == (3, "runtime-error iteration-limit\n")
    code, _, _ = run_cli(capsys, "solve", SPECS / "transport" / "model.mod", tdat, "--max-iterations", "0")
    assert code == 64


def test_bind_check_writes_nothing(capsys, tmp_path):
    before = sorted(p.name for p in (BUNDLES / "transport").rglob("*"))
    code, out, _ = run_cli(capsys, "bind", BUNDLES / "transport", "--check")
    assert code == 0
    assert out.splitlines()[-1] == "ok: 2 set(s), 3 param(s)"
    assert "param cost over PLANTS, MARKETS" in out
    assert sorted(p.name for p in (BUNDLES / "transport").rglob("*")) == before


def test_bind_json_and_structured_arity(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "bind", BUNDLES / "transport", "--format", "json")
    assert code == 0 and '"cost"' in out
    code, _, _ = run_cli(capsys, "bind", BUNDLES / "transport", "--check",
                         "--structured", SPECS / "transport" / "structured.txt")
    assert code == 0
    # the production structure declares other symbols, so binding against it fails
    code, _, err = run_cli(capsys, "bind", BUNDLES / "transport", "--check",
                           "--structured", SPECS / "production" / "structured.txt")
    assert code == 65 and err.startswith("config digest")


def test_bind_bad_manifest_exits_65(capsys, tmp_path):
    (tmp_path / "binding.manifest").write_text("[params.p]\ntable = 'missing'\ncolumn = 'v'\n")
    code, _, _ = run_cli(capsys, "bind", tmp_path)
    assert code == 65


# -- LLM-backed commands --------------------------------------------------------------------


def test_structure_and_generate(capsys):
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "structure", BUNDLES / "production")
    assert code == 0 and out.startswith("OBJECTIVES:")
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "structure", BUNDLES / "production", "--json")
    assert code == 0 and '"objectives"' in out
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "generate", BUNDLES / "transport",
                           "--variant", "Ampl4")
    assert code == 0
    assert out == (SPECS / "transport" / "model.mod").read_text()


def test_generate_baseline(capsys):
    code, out, _ = run_cli(capsys, "--llm-backend", f"scripted:{SCRIPTS / 'baseline.json'}", "generate",
                           FIXTURES / "baseline" / "bakery", "--variant", "Ampl1", "--baseline")
    assert code == 0 and "data;" in out


def test_llm_command_without_backend_exits_64(capsys):
    code, _, err = run_cli(capsys, "structure", BUNDLES / "production")
    assert code == 64 and "--llm-backend" in err


def test_missing_auth_token_exits_4_before_any_request(capsys, tmp_path, monkeypatch):
    import httpx

    def no_network(*args, **kwargs):
        raise AssertionError("a request was sent")

    monkeypatch.setattr(httpx.Client, "send", no_network)
    monkeypatch.delenv("OPTSPEC_TEST_ABSENT_TOKEN", raising=False)
    conf = tmp_path / "optspec.toml"
    conf.write_text(
        "[llm]\ndefault = 'remote'\n"
        "[llm.backends.remote]\nendpoint = 'http://127.0.0.1:9/v1/chat/completions'\n"
        "model = 'some-model'\nauth_env = 'OPTSPEC_TEST_ABSENT_TOKEN'\n"
    )
    for argv in (["structure", BUNDLES / "production"],
                 ["run", BUNDLES / "production", "Ampl4", "--records", tmp_path / "rec"],
                 ["bench", BUNDLES, "--records", tmp_path / "rec", "--runs", "1"]):
        code, _, err = run_cli(capsys, "--config", conf, *argv)
        assert code == 4
        assert "OPTSPEC_TEST_ABSENT_TOKEN" in err
    assert not (tmp_path / "rec" / "records").exists() or not any((tmp_path / "rec" / "records").iterdir())


def test_scripted_backend_from_config(capsys, tmp_path):
    conf = tmp_path / "optspec.toml"
    conf.write_text(f"[llm]\ndefault = 'replay'\n[llm.backends.replay]\nscript = '{SCRIPTS / 'bench.json'}'\n")
    code, out, _ = run_cli(capsys, "--config", conf, "run", BUNDLES / "transport", "Ampl3",
                           "--records", tmp_path / "rec")
    assert code == 0 and "objective=420" in out


@pytest.mark.parametrize("variant,code,fragment", [
    ("Ampl2", 0, "solved objective=140 refinements=1"),
    ("Ampl1", 2, "compile-error kind=syntax"),
    ("Python1", 3, "runtime-error kind=unexpected-termination"),
])
def test_run_exit_codes(capsys, tmp_path, variant, code, fragment):
    got, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "run", BUNDLES / "production", variant,
                          "--records", tmp_path)
    assert got == code
    assert fragment in out
    assert len(RecordStore(tmp_path)) == 1


def test_run_gateway_failure_exits_4_and_keeps_record(capsys, tmp_path):
    script = tmp_path / "empty.json"
    script.write_text('{"sequence": []}')
    code, out, err = run_cli(capsys, "--llm-backend", f"scripted:{script}", "run", BUNDLES / "production",
                             "Ampl1", "--records", tmp_path / "rec")
    assert code == 4
    assert "script-exhausted" in err
    (record,) = RecordStore(tmp_path / "rec").load_all()
    assert record.gateway_error == "script-exhausted"


def test_run_baseline(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "--llm-backend", f"scripted:{SCRIPTS / 'baseline.json'}", "run",
                           FIXTURES / "baseline" / "bakery", "Ampl1", "--baseline", "--records", tmp_path)
    assert code == 0 and "objective=120" in out


def test_internal_error_exits_70(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise ZeroDivisionError("unexpected")

    monkeypatch.setattr(cli, "solve_milp", boom)
    code, _, err = run_cli(capsys, "solve", FIXTURES / "shop" / "production.mod",
                           FIXTURES / "shop" / "production.dat", "--objective", "lexicographic")
    assert code == 70
    assert "internal error: ZeroDivisionError" in err


# -- bench and report -----------------------------------------------------------------------


def test_bench_partial_failure_exits_zero_and_resumes(capsys, tmp_path):
    rec = tmp_path / "rec"
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "bench", BUNDLES, "--records", rec, "--runs", "1")
    assert code == 0
    assert out.splitlines()[-1] == "16 record(s), 16 new; solved 13, compile-error 1, runtime-error 2"
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "bench", BUNDLES, "--records", rec, "--runs", "1")
    assert code == 0
    assert out.splitlines() == ["16 record(s), 0 new; solved 13, compile-error 1, runtime-error 2"]


def test_bench_matrix_file_and_variants_flag(capsys, tmp_path):
    matrix = tmp_path / "matrix.toml"
    matrix.write_text('variants = ["Ampl4", "Python4"]\n')
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "--jobs", "2", "bench", BUNDLES,
                           "--matrix", matrix, "--records", tmp_path / "a", "--runs", "1")
    assert code == 0 and out.splitlines()[-1].startswith("4 record(s)")
    code, out, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "bench", BUNDLES, "--variants", "Ampl3",
                           "--records", tmp_path / "b", "--runs", "1")
    assert code == 0 and out.splitlines()[-1].startswith("2 record(s)")
    matrix.write_text('variants = ["Ampl4"]\nextra = 1\n')
    code, _, _ = run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "bench", BUNDLES, "--matrix", matrix)
    assert code == 64


def test_report_is_byte_identical_across_executions(capsys, tmp_path):
    outputs = []
    for name in ("one", "two"):
        rec = tmp_path / name
        run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "bench", BUNDLES, "--records", rec, "--runs", "1")
        code, _, _ = run_cli(capsys, "report", rec, "--out", tmp_path / f"{name}-report")
        assert code == 0
        outputs.append({p.name: p.read_bytes() for p in sorted((tmp_path / f"{name}-report").iterdir())})
    assert outputs[0] == outputs[1]
    assert set(outputs[0]) == {"report.md", "cells.csv", "deltas.csv", "comparisons.csv"}


def test_report_with_comparisons(capsys, tmp_path):
    rec = tmp_path / "rec"
    run_cli(capsys, "--llm-backend", BENCH_SCRIPT, "bench", BUNDLES, "--records", rec, "--runs", "1")
    comparisons = tmp_path / "cmp.toml"
    comparisons.write_text('[[comparison]]\na = "Ampl1"\nb = "Ampl4"\n')
    code, _, _ = run_cli(capsys, "report", rec, "--comparisons", comparisons)
    assert code == 0
    assert "Ampl1 vs Ampl4" in (rec / "report" / "comparisons.csv").read_text()
    comparisons.write_text('[[comparison]]\na = "Ampl1"\nb = "Nope"\nmodel = "x"\n')
    code, _, _ = run_cli(capsys, "report", rec, "--comparisons", comparisons)
    assert code == 65


def test_report_on_empty_dir_exits_65_and_writes_nothing(capsys, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, _, err = run_cli(capsys, "report", empty)
    assert code == 65 and "no records" in err
    assert list(empty.iterdir()) == []
    RecordStore(tmp_path / "store")  # an initialised but empty store
    code, _, _ = run_cli(capsys, "report", tmp_path / "store")
    assert code == 65
    assert not (tmp_path / "store" / "report").exists()
