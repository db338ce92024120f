"""Command-line interface.

Exit codes: 0 success, 2 compile error, 3 runtime error, 4 LLM gateway
error, 64 usage or configuration error, 65 invalid input data, 70 internal
error. Every command that runs prints the resolved config digest to stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .ampl import CompileError, ObjectivePolicy, instantiate, parse_data, parse_model, render_compile_error, validate
from .databind import (
    BindError,
    IngestError,
    ManifestError,
    bind,
    emit_ampl_data,
    emit_generic_data,
    load_manifest,
    load_tables,
)
from .evalstats import ReportConfigError, load_comparisons, report, run_comparisons
from .llm import (
    ExtractionError,
    Gateway,
    GatewayError,
    LlmConfig,
    ParseError,
    RemoteBackend,
    ScriptedBackend,
    data_interface,
    generate_spec,
    load_few_shots,
    parse_structured,
    render_structured,
    structure_problem,
)
from .pipeline import (
    PRESETS,
    BundleError,
    ProblemBundle,
    RecordStore,
    VariantConfig,
    bench,
    cell_summaries,
    describe_llm,
    load_bundles,
    run_baseline,
    run_variant,
)
from .pipeline.config import DEFAULT_RUNTIME
from .solver import RuntimeFailure, Solved, SolverParams, render_diagnostics, solve_milp

EXIT_OK = 0
EXIT_COMPILE = 2
EXIT_RUNTIME = 3
EXIT_GATEWAY = 4
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70

OUTCOME_EXIT = {"solved": EXIT_OK, "compile-error": EXIT_COMPILE, "runtime-error": EXIT_RUNTIME}

HELP_WIDTH = 88


class UsageError(Exception):
    """Bad flags, paths or configuration; exits 64."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _formatter(prog: str) -> argparse.HelpFormatter:
    return argparse.HelpFormatter(prog, width=HELP_WIDTH, max_help_position=32)


# -- configuration --------------------------------------------------------------------------

_TOP_KEYS = {"llm", "solver", "pipeline", "variants"}
_LLM_KEYS = {"default", "max_output_tokens", "request_timeout", "rate_limit", "retries", "backends"}
_REMOTE_KEYS = {"endpoint", "model", "auth_env", "adapter"}
_SCRIPT_KEYS = {"script"}
_SOLVER_KEYS = set(vars(SolverParams()))
_PIPELINE_KEYS = {"max_refinements", "runs", "timeout", "jobs", "seed", "runtime_command", "scratch_root",
                  "objective_policy"}
_VARIANT_KEYS = {"target", "structured", "refinement", "max_refinements", "runs", "objective_policy"}


def _reject_unknown(section: str, doc: dict, allowed: set[str]) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise UsageError(f"unknown key(s) in {section}: {', '.join(unknown)}")


@dataclass
class CliConfig:
    """Resolved settings: flags override the config file, which overrides defaults."""

    llm_backend: str | None = None
    backends: dict[str, dict] = field(default_factory=dict)
    llm_options: dict = field(default_factory=dict)
    solver: SolverParams = field(default_factory=SolverParams)
    max_refinements: int = 5
    runs: int = 5
    timeout: float = 60.0
    jobs: int = 1
    seed: int = 0
    runtime_command: tuple[str, ...] = DEFAULT_RUNTIME
    scratch_root: Path | None = None
    objective_policy: ObjectivePolicy = field(default_factory=ObjectivePolicy)
    variants: dict[str, dict] = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)
    # variant fields set by flags; these win over per-variant file entries
    flag_overrides: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> "CliConfig":
        cfg = cls()
        if args.config is not None:
            cfg._apply_file(Path(args.config))
        if args.llm_backend is not None:
            cfg.llm_backend = args.llm_backend
        if args.jobs is not None:
            cfg.jobs = args.jobs
        if args.seed is not None:
            cfg.seed = args.seed
        if args.timeout is not None:
            cfg.timeout = args.timeout
        if getattr(args, "objective", None) is not None:
            cfg.objective_policy = _policy(args.objective)
            cfg.flag_overrides["objective_policy"] = cfg.objective_policy
        if getattr(args, "max_refinements", None) is not None:
            cfg.max_refinements = args.max_refinements
            cfg.flag_overrides["max_refinements"] = args.max_refinements
        if getattr(args, "runs", None) is not None:
            cfg.runs = args.runs
            cfg.flag_overrides["runs"] = args.runs
        if cfg.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if not cfg.timeout > 0:
            raise UsageError("--timeout must be positive")
        if cfg.max_refinements < 0 or cfg.runs < 1:
            raise UsageError("max_refinements must be >= 0 and runs >= 1")
        return cfg

    def _apply_file(self, path: Path) -> None:
        if not path.is_file():
            raise UsageError(f"config file {path} does not exist")
        try:
            doc = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as err:
            raise UsageError(f"{path}: {err}") from err
        self.base_dir = path.parent
        _reject_unknown("the config file", doc, _TOP_KEYS)
        llm = doc.get("llm", {})
        _reject_unknown("[llm]", llm, _LLM_KEYS)
        for name, backend in llm.get("backends", {}).items():
            keys = _SCRIPT_KEYS if "script" in backend else _REMOTE_KEYS
            _reject_unknown(f"[llm.backends.{name}]", backend, keys)
            if "script" not in backend and not {"endpoint", "model", "auth_env"} <= set(backend):
                raise UsageError(f"[llm.backends.{name}] needs endpoint, model and auth_env, or script")
            self.backends[name] = dict(backend)
        self.llm_backend = llm.get("default", self.llm_backend)
        self.llm_options = {k: v for k, v in llm.items() if k not in ("default", "backends")}
        solver = doc.get("solver", {})
        _reject_unknown("[solver]", solver, _SOLVER_KEYS)
        try:
            self.solver = SolverParams(**{**vars(self.solver), **solver})
        except (TypeError, ValueError) as err:
            raise UsageError(f"[solver]: {err}") from err
        pipe = doc.get("pipeline", {})
        _reject_unknown("[pipeline]", pipe, _PIPELINE_KEYS)
        for key in ("max_refinements", "runs", "jobs", "seed"):
            if key in pipe:
                setattr(self, key, int(pipe[key]))
        if "timeout" in pipe:
            self.timeout = float(pipe["timeout"])
        if "runtime_command" in pipe:
            command = pipe["runtime_command"]
            if isinstance(command, str) or not command:
                raise UsageError("[pipeline] runtime_command must be a nonempty list of strings")
            self.runtime_command = tuple(str(c) for c in command)
        if "scratch_root" in pipe:
            self.scratch_root = self.base_dir / pipe["scratch_root"]
        if "objective_policy" in pipe:
            self.objective_policy = _policy(pipe["objective_policy"])
        for label, spec in doc.get("variants", {}).items():
            _reject_unknown(f"[variants.{label}]", spec, _VARIANT_KEYS)
            if label not in PRESETS and not {"target", "structured", "refinement"} <= set(spec):
                raise UsageError(f"[variants.{label}] needs target, structured and refinement")
            self.variants[label] = dict(spec)

    # -- derived objects -----------------------------------------------------------------

    def llm_config(self) -> LlmConfig:
        name = self.llm_backend
        if name is None:
            raise UsageError("no LLM backend configured; pass --llm-backend NAME or scripted:PATH")
        options = dict(self.llm_options)
        if name.startswith("scripted:"):
            backend = _load_script(Path(name[len("scripted:"):]))
        elif name in self.backends:
            spec = self.backends[name]
            if "script" in spec:
                backend = _load_script(self.base_dir / spec["script"])
            else:
                try:
                    backend = RemoteBackend(spec["endpoint"], spec["model"], spec["auth_env"],
                                            spec.get("adapter", "openai-chat"))
                except ValueError as err:
                    raise UsageError(f"[llm.backends.{name}]: {err}") from err
        else:
            known = ", ".join(sorted(self.backends)) or "none"
            raise UsageError(f"unknown LLM backend {name!r} (configured: {known}; or use scripted:PATH)")
        try:
            return LlmConfig(backend, **options)
        except (TypeError, ValueError) as err:
            raise UsageError(f"[llm]: {err}") from err

    def variant(self, label: str, llm: LlmConfig | None) -> VariantConfig:
        common = dict(
            max_refinements=self.max_refinements, runs=self.runs, objective_policy=self.objective_policy,
            solver_params=self.solver, llm=llm, runtime_command=self.runtime_command, timeout=self.timeout,
            scratch_root=self.scratch_root,
        )
        if label in self.variants:
            spec = dict(self.variants[label])
            if "objective_policy" in spec:
                spec["objective_policy"] = _policy(spec["objective_policy"])
            spec.update(self.flag_overrides)
            try:
                if label in PRESETS:  # a partial override of a preset
                    return PRESETS[label].with_(**{**common, **spec})
                return VariantConfig(label, **{**common, **spec})
            except (TypeError, ValueError) as err:
                raise UsageError(f"[variants.{label}]: {err}") from err
        if label in PRESETS:
            return PRESETS[label].with_(**common)
        known = ", ".join([*PRESETS, *self.variants])
        raise UsageError(f"unknown variant {label!r}; choose one of {known}")

    def to_dict(self) -> dict:
        llm = None
        if self.llm_backend is not None:
            try:
                llm = describe_llm(self.llm_config())
            except UsageError:
                llm = {"unresolved": self.llm_backend}
        return {
            "llm": llm,
            "solver": vars(self.solver),
            "max_refinements": self.max_refinements,
            "runs": self.runs,
            "timeout": self.timeout,
            "jobs": self.jobs,
            "seed": self.seed,
            "runtime_command": list(self.runtime_command),
            "objective_policy": str(self.objective_policy),
            "variants": self.variants,
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _policy(text: str) -> ObjectivePolicy:
    try:
        return ObjectivePolicy.parse(text)
    except ValueError as err:
        raise UsageError(str(err)) from err


def _load_script(path: Path) -> ScriptedBackend:
    if not path.is_file():
        raise UsageError(f"script file {path} does not exist")
    try:
        return ScriptedBackend.load(path)
    except (ValueError, KeyError, TypeError) as err:
        raise UsageError(f"script file {path}: {err!r}") from err


# -- helpers --------------------------------------------------------------------------------


def _existing(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"{what} {p} does not exist")
    return p


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _description(path: Path) -> str:
    target = path / "description.md" if path.is_dir() else path
    if not target.is_file():
        raise UsageError(f"{target} does not exist")
    text = target.read_text(encoding="utf-8").strip()
    if not text:
        raise UsageError(f"{target} is empty")
    return text


def _fmt(value: float) -> str:
    return f"{value:.6g}"


# -- commands -------------------------------------------------------------------------------


def cmd_structure(args, cfg: CliConfig) -> int:
    description = _description(_existing(args.description, "description"))
    with Gateway(cfg.llm_config()) as gw:
        try:
            problem = structure_problem(description, gw)
        except ParseError as err:
            print(f"malformed structured response: {err}", file=sys.stderr)
            return EXIT_DATA
    text = json.dumps(problem.to_dict(), indent=2) + "\n" if args.json else render_structured(problem)
    _write_or_print(text, args.out)
    return EXIT_OK


def cmd_bind(args, cfg: CliConfig) -> int:
    path = _existing(args.manifest, "manifest")
    if path.is_dir():
        path = path / "binding.manifest"
    meta = None
    if args.structured is not None:
        problem = parse_structured(_existing(args.structured, "structured file").read_text(encoding="utf-8"))
        meta = [*problem.parameters, *problem.variables]
    manifest = load_manifest(path)
    data = bind(manifest, meta, load_tables(manifest.table_paths()))
    if args.check:
        for name, members in data.sets.items():
            print(f"set {name}: {len(members)} member(s) from {data.provenance[name]}")
        for name in data.params:
            index = data.index.get(name)
            where = f" over {', '.join(index)}" if index else ""
            print(f"param {name}{where} from {data.provenance[name]}")
        print(f"ok: {len(data.sets)} set(s), {len(data.params)} param(s)")
        return EXIT_OK
    text = emit_ampl_data(data) if args.format == "ampl" else emit_generic_data(data)
    _write_or_print(text, args.out)
    return EXIT_OK


def cmd_generate(args, cfg: CliConfig) -> int:
    llm = cfg.llm_config()
    variant = cfg.variant(args.variant, llm)
    bundle = ProblemBundle.load(_existing(args.bundle, "bundle"), baseline=args.baseline)
    with Gateway(llm) as gw:
        context: object = bundle.inline_description if args.baseline else bundle.description
        if variant.structured:
            try:
                context = structure_problem(context, gw)
            except ParseError as err:
                print(f"structuring failed, using the raw description: {err}", file=sys.stderr)
        interface = None if args.baseline else data_interface(bundle.data, variant.target)
        try:
            spec = generate_spec(context, variant.target, load_few_shots(variant.target), gw, interface)
        except ExtractionError as err:
            print(str(err), file=sys.stderr)
            return EXIT_COMPILE
    _write_or_print(spec, args.out)
    return EXIT_OK


def cmd_solve(args, cfg: CliConfig) -> int:
    model_path = _existing(args.model, "model file")
    data_path = _existing(args.data, "data file")
    params = cfg.solver
    overrides = {}
    if args.max_iterations is not None:
        overrides["max_simplex_iterations"] = args.max_iterations
    if args.max_nodes is not None:
        overrides["max_bb_nodes"] = args.max_nodes
    if overrides:
        try:
            params = SolverParams(**{**vars(params), **overrides})
        except ValueError as err:
            raise UsageError(str(err)) from err
    try:
        model = parse_model(model_path.read_text(encoding="utf-8"))
        data = parse_data(data_path.read_text(encoding="utf-8"))
        report_ = validate(model, data)
        instance = instantiate(model, data, cfg.objective_policy)
    except CompileError as err:
        print(render_compile_error(err), file=sys.stderr)
        print("compile-error")
        return EXIT_COMPILE
    for warning in report_.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    outcome = solve_milp(instance, params)
    if isinstance(outcome, Solved):
        print(f"solved objective={_fmt(outcome.objective)}")
        if args.show_values:
            for name, value in outcome.assignment.items():
                print(f"  {name} = {_fmt(value)}")
        return EXIT_OK
    assert isinstance(outcome, RuntimeFailure)
    print(f"runtime-error {outcome.kind}")
    print(render_diagnostics(outcome, instance, params), file=sys.stderr)
    return EXIT_RUNTIME


def _summary_line(record, path: Path | None) -> str:
    parts = [record.problem_id, record.variant, record.outcome_class]
    if record.objective is not None:
        parts.append(f"objective={_fmt(record.objective)}")
    elif record.final_outcome.get("kind"):
        parts.append(f"kind={record.final_outcome['kind']}")
    parts.append(f"refinements={record.refinement_count}")
    if path is not None:
        parts.append(f"record={path}")
    return " ".join(parts)


def cmd_run(args, cfg: CliConfig) -> int:
    llm = cfg.llm_config()
    variant = cfg.variant(args.variant, llm)
    bundle = ProblemBundle.load(_existing(args.bundle, "bundle"), baseline=args.baseline)
    with Gateway(llm) as gw:
        runner = run_baseline if args.baseline else run_variant
        record = runner(bundle, variant, gw, args.run_index)
    store = RecordStore(args.records)
    path = store.put(record)
    print(_summary_line(record, path))
    if record.gateway_error is not None:
        print(f"LLM gateway error: {record.final_outcome['message']}", file=sys.stderr)
        return EXIT_GATEWAY
    return OUTCOME_EXIT[record.outcome_class]


def _matrix(path: str | None, cfg: CliConfig, llm: LlmConfig, variants: str | None) -> list[VariantConfig]:
    labels = list(PRESETS)
    if path is not None:
        try:
            doc = tomllib.loads(_existing(path, "matrix file").read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as err:
            raise UsageError(f"{path}: {err}") from err
        _reject_unknown("the matrix file", doc, {"variants"})
        labels = list(doc.get("variants", labels))
    if variants is not None:
        labels = [v.strip() for v in variants.split(",") if v.strip()]
    if not labels:
        raise UsageError("the variant matrix is empty")
    if len(set(labels)) != len(labels):
        raise UsageError("variant labels in the matrix must be unique")
    return [cfg.variant(label, llm) for label in labels]


def cmd_bench(args, cfg: CliConfig) -> int:
    llm = cfg.llm_config()
    matrix = _matrix(args.matrix, cfg, llm, args.variants)
    bundles = load_bundles(_existing(args.dataset, "dataset"), baseline=args.baseline)
    store = RecordStore(args.records)
    before = len(store)
    with Gateway(llm) as gw:
        records = bench(
            bundles, matrix, gw, store=store, jobs=cfg.jobs, baseline=args.baseline,
            on_record=lambda r: print(_summary_line(r, None), flush=True),
        )
    counts = {cls: sum(r.outcome_class == cls for r in records) for cls in OUTCOME_EXIT}
    print(
        f"{len(records)} record(s), {len(store) - before} new; solved {counts['solved']},"
        f" compile-error {counts['compile-error']}, runtime-error {counts['runtime-error']}"
    )
    return EXIT_OK


def cmd_report(args, cfg: CliConfig) -> int:
    root = _existing(args.records, "records directory")
    if not (root / RecordStore.INDEX).is_file() and not (root / "records").is_dir():
        print(f"{root} holds no records", file=sys.stderr)
        return EXIT_DATA
    records = RecordStore(root).load_all()
    if not records:
        print(f"{root} holds no records", file=sys.stderr)
        return EXIT_DATA
    cells = cell_summaries(records)
    comparisons = []
    if args.comparisons is not None:
        comparisons = run_comparisons(cells, load_comparisons(_existing(args.comparisons, "comparisons file"), cells))
    result = report(cells, comparisons)
    out = Path(args.out) if args.out is not None else root / "report"
    result.write(out)
    print(f"wrote report for {len(records)} record(s) in {len(cells)} cell(s) to {out}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--config", metavar="PATH", default=default, help="TOML config file")
    g.add_argument("--llm-backend", metavar="NAME", default=default,
                   help="backend name from the config, or scripted:PATH")
    g.add_argument("--jobs", metavar="N", type=int, default=default, help="parallel bench cells (default 1)")
    g.add_argument("--seed", metavar="N", type=int, default=default,
                   help="seed recorded in the config digest (default 0)")
    g.add_argument("--timeout", metavar="SECS", type=float, default=default,
                   help="wall-clock limit for external runtimes (default 60)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="optspec", formatter_class=_formatter,
        description="Turn optimization problem descriptions into executable specifications.",
        epilog="Exit codes: 0 ok, 2 compile error, 3 runtime error, 4 LLM gateway error, "
               "64 usage, 65 invalid data, 70 internal error.",
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text, formatter_class=_formatter)
        _global_flags(p, suppress=True)
        return p

    p = command("structure", "Step 1: structure a problem description with the LLM.")
    p.add_argument("description", help="description file, or a bundle directory")
    p.add_argument("--json", action="store_true", help="print JSON instead of the block format")
    p.add_argument("--out", metavar="PATH", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_structure)

    p = command("bind", "Step 2: bind tables to parameters through a manifest.")
    p.add_argument("manifest", help="binding manifest, or a bundle directory")
    p.add_argument("--structured", metavar="PATH", help="structured problem used for the arity check")
    p.add_argument("--check", action="store_true", help="dry run: report bindings, write nothing")
    p.add_argument("--format", choices=("ampl", "json"), default="ampl", help="output format (default ampl)")
    p.add_argument("--out", metavar="PATH", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_bind)

    p = command("generate", "Step 3: generate a specification for a bundle.")
    p.add_argument("bundle", help="problem bundle directory")
    p.add_argument("--variant", metavar="LABEL", default="Ampl3", help="variant label (default Ampl3)")
    p.add_argument("--baseline", action="store_true", help="use inline/description.md, no data binding")
    p.add_argument("--out", metavar="PATH", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_generate)

    p = command("solve", "Step 4: solve a model and data file with the embedded solver.")
    p.add_argument("model", help="model file (.mod)")
    p.add_argument("data", help="data file (.dat)")
    p.add_argument("--objective", metavar="POLICY",
                   help="single, lexicographic or weighted:NAME=W,... (default single)")
    p.add_argument("--max-iterations", metavar="N", type=int, help="simplex iteration limit")
    p.add_argument("--max-nodes", metavar="N", type=int, help="branch-and-bound node limit")
    p.add_argument("--show-values", action="store_true", help="print the variable values")
    p.set_defaults(func=cmd_solve)

    p = command("run", "Run one variant on one bundle and store the record.")
    p.add_argument("bundle", help="problem bundle directory")
    p.add_argument("variant", help="variant label, e.g. Ampl4")
    p.add_argument("--records", metavar="DIR", default="records", help="record store (default ./records)")
    p.add_argument("--run-index", metavar="N", type=int, default=0, help="repetition number (default 0)")
    p.add_argument("--baseline", action="store_true", help="inline-data baseline mode")
    p.add_argument("--objective", metavar="POLICY", help="objective policy for the ampl target")
    p.add_argument("--max-refinements", metavar="N", type=int, help="refinement cap (default 5)")
    p.set_defaults(func=cmd_run)

    p = command("bench", "Run a variant matrix over every bundle in a dataset.")
    p.add_argument("dataset", help="directory of bundle directories")
    p.add_argument("--matrix", metavar="PATH", help="TOML file with variants = [...]")
    p.add_argument("--variants", metavar="LIST", help="comma-separated labels (overrides --matrix)")
    p.add_argument("--records", metavar="DIR", default="records", help="record store (default ./records)")
    p.add_argument("--runs", metavar="N", type=int, help="repetitions per cell (default 5)")
    p.add_argument("--baseline", action="store_true", help="inline-data baseline mode")
    p.add_argument("--objective", metavar="POLICY", help="objective policy for the ampl target")
    p.add_argument("--max-refinements", metavar="N", type=int, help="refinement cap (default 5)")
    p.set_defaults(func=cmd_bench)

    p = command("report", "Write metric tables and comparisons for a record store.")
    p.add_argument("records", help="record store directory")
    p.add_argument("--comparisons", metavar="PATH", help="TOML file of [[comparison]] entries")
    p.add_argument("--out", metavar="DIR", help="output directory (default RECORDS/report)")
    p.set_defaults(func=cmd_report)
    return parser


COMMANDS = ("structure", "bind", "generate", "solve", "run", "bench", "report")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    for name in ("config", "llm_backend", "jobs", "seed", "timeout"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        cfg = CliConfig.resolve(args)
        print(f"config digest: {cfg.digest()}", file=sys.stderr)
        return args.func(args, cfg)
    except UsageError as err:
        print(f"optspec: {err}", file=sys.stderr)
        return EXIT_USAGE
    except GatewayError as err:
        print(f"optspec: LLM gateway error: {err}", file=sys.stderr)
        return EXIT_GATEWAY
    except CompileError as err:
        print(render_compile_error(err), file=sys.stderr)
        return EXIT_COMPILE
    except (BundleError, ManifestError, IngestError, BindError, ParseError, ReportConfigError) as err:
        print(f"optspec: {err}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        print("optspec: interrupted", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as err:  # never let a traceback be the interface
        print(f"optspec: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
