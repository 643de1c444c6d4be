"""Command-line driver for the whole pipeline.

Subcommands: gen-graph, import-graph, gen-data, train, solve, bench,
report. Option precedence is flags, then `--config` file entries
(`key = value` lines), then built-in defaults; the LASTMILE_SEED
environment variable supplies the default seed only. Every run echoes the
resolved configuration and the master seed before doing anything.

Exit status: 0 on success, 1 on input errors (bad flags, unreadable or
malformed inputs), 2 on runtime errors (divergence, disconnection,
unwritable outputs).
"""

import argparse
import contextlib
import os
import sys

from .datasets import generate_synthetic_dataset, read_dataset, write_dataset
from .experiments import (
    ALGORITHMS,
    default_aggregate_path,
    read_results,
    run_benchmark,
    sample_scenario,
    scenario_matrix,
    write_aggregate,
    write_report,
)
from .graphs import (
    crop_to_k_nearest,
    generate_random_graph,
    read_graph,
    read_node_edge_files,
    write_graph,
)
from .mlp import MLPModel, load_model, save_model, train_mlp
from .satisfaction import EconParams, ProxyObjective
from .solvers import evaluate_assignment, optimal_assign, simsat
from .vehicles import format_assignment

SEED_ENV_VAR = "LASTMILE_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; our contract says input error = 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_n_range(text: str) -> tuple:
    """'6..10' (inclusive), '6,8,10', or a single '8'."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return tuple(range(lo, hi + 1))
    if "," in text:
        return tuple(int(p) for p in text.split(","))
    return (int(text),)


def _fmt_value(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        if len(v) > 1 and v == tuple(range(v[0], v[-1] + 1)):
            return f"{v[0]}..{v[-1]}"
        return ",".join(str(x) for x in v)
    return str(v)


def _read_config_file(path) -> dict:
    entries = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from None
    with fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {ln}: expected 'key = value'")
            key, value = line.split("=", 1)
            entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


# per-option converter and default; None defaults resolve at run time
_ECON_SPEC = {
    "alpha": (float, 0.3),
    "beta": (float, 1.0),
    "cost_per_min": (float, 1.0),
    "speed": (float, 1.0),
    "wait_const": (float, 5.0),
}

_COMMAND_SPECS = {
    "gen-graph": {
        "vertices": (int, 35),
        "seed": (int, None),
        "out": (str, None),
    },
    "import-graph": {
        "nodes": (str, None),
        "edges": (str, None),
        "origin": (int, None),
        "crop": (int, None),
        "out": (str, None),
    },
    "gen-data": {
        "n": (int, 5000),
        "seed": (int, None),
        "out": (str, None),
        **_ECON_SPEC,
    },
    "train": {
        "data": (str, None),
        "seed": (int, None),
        "learning_rate": (float, 0.01),
        "max_epochs": (int, 400),
        "patience": (int, 20),
        "batch_size": (int, 64),
        "hidden_layers": (int, 2),
        "hidden_width": (int, 100),
        "out": (str, None),
    },
    "solve": {
        "graph": (str, None),
        "model": (str, None),
        "n": (int, 8),
        "seed": (int, None),
        "algorithm": (str, "simsat"),
        "restarts": (int, None),
        "out": (str, None),
        **_ECON_SPEC,
    },
    "bench": {
        "model": (str, None),
        "graph": (str, None),
        "n": (_parse_n_range, (6, 7, 8, 9, 10)),
        "samples": (int, 100),
        "vertices": (int, 35),
        "seed": (int, None),
        "restarts": (int, None),
        "workers": (int, 1),
        "measure_timing": (_parse_bool, False),
        "out": (str, None),
        "aggregate": (str, None),
        "chart": (str, None),
        **_ECON_SPEC,
    },
    "report": {
        "results": (str, None),
        "out": (str, None),
        "chart": (str, None),
    },
}

_REQUIRED = {
    "gen-graph": ("out",),
    "import-graph": ("nodes", "edges", "origin", "out"),
    "gen-data": ("out",),
    "train": ("data", "out"),
    "solve": ("graph", "model"),
    "bench": ("model", "out"),
    "report": ("results", "out"),
}


def _resolve(command: str, args: argparse.Namespace) -> dict:
    spec = _COMMAND_SPECS[command]
    entries = {}
    if getattr(args, "config", None):
        entries = _read_config_file(args.config)
        for key in entries:
            if key not in spec:
                raise ValueError(f"unknown config key {key!r} for {command}")
    resolved = {}
    for key, (convert, default) in spec.items():
        value = getattr(args, key, None)
        if value is None and key in entries:
            try:
                value = convert(entries[key])
            except ValueError as exc:
                raise ValueError(f"config key {key!r}: {exc}") from None
        if value is None:
            value = _default_seed() if key == "seed" else default
        resolved[key] = value
    for key in _REQUIRED[command]:
        if resolved[key] is None:
            raise ValueError(f"{command}: missing required option --{key.replace('_', '-')}")
    return resolved


def _print_config(command: str, resolved: dict) -> None:
    pairs = " ".join(f"{k}={_fmt_value(v)}" for k, v in sorted(resolved.items()))
    print(f"{command}: {pairs}")
    print(f"master seed: {resolved.get('seed', 0)}")


def _econ(resolved: dict) -> EconParams:
    return EconParams(
        alpha=resolved["alpha"],
        beta=resolved["beta"],
        M=resolved["cost_per_min"],
        speed=resolved["speed"],
        wait_const=resolved["wait_const"],
    )


def _add_econ_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--cost-per-min", dest="cost_per_min", type=float)
    p.add_argument("--speed", type=float)
    p.add_argument("--wait-const", dest="wait_const", type=float)


def build_parser() -> _Parser:
    parser = _Parser(prog="lastmile", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value option file")
        return p

    p = add("gen-graph", "write a random planar-ish road graph")
    p.add_argument("--vertices", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out")

    p = add("import-graph", "combine node/edge CSVs into a graph file")
    p.add_argument("--nodes")
    p.add_argument("--edges")
    p.add_argument("--origin", type=int)
    p.add_argument("--crop", type=int, help="keep the K nodes nearest the origin")
    p.add_argument("-o", "--out")

    p = add("gen-data", "write a synthetic labeled ride dataset")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out")
    _add_econ_flags(p)

    p = add("train", "fit the satisfaction network on a dataset")
    p.add_argument("--data")
    p.add_argument("--seed", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--max-epochs", dest="max_epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--hidden-layers", dest="hidden_layers", type=int)
    p.add_argument("--hidden-width", dest="hidden_width", type=int)
    p.add_argument("-o", "--out")

    p = add("solve", "assign one sampled scenario and print the plan")
    p.add_argument("--graph")
    p.add_argument("--model")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--algorithm", choices=("simsat", "optimal", "cost", "time", "gain")
    )
    p.add_argument("--restarts", type=int)
    p.add_argument("-o", "--out")
    _add_econ_flags(p)

    p = add("bench", "run the five-algorithm benchmark matrix")
    p.add_argument("--model")
    p.add_argument("--graph", help="fixed graph file; omit for per-sample random graphs")
    p.add_argument("--n", type=_parse_n_range, help="range like 6..10")
    p.add_argument("--samples", type=int)
    p.add_argument("--vertices", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--measure-timing", dest="measure_timing",
                   action="store_true", default=None,
                   help="report wall-clock runtime_ms (output then varies run to run)")
    p.add_argument("-o", "--out")
    p.add_argument("--aggregate")
    p.add_argument("--chart")
    _add_econ_flags(p)

    p = add("report", "aggregate a results CSV (and optionally chart it)")
    p.add_argument("--results")
    p.add_argument("-o", "--out")
    p.add_argument("--chart")

    return parser


@contextlib.contextmanager
def _writing(path):
    """Failures while producing an output file are runtime errors (exit 2),
    unlike unreadable inputs (exit 1)."""
    try:
        yield
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from None


def _cmd_gen_graph(cfg) -> None:
    graph = generate_random_graph(cfg["vertices"], seed=cfg["seed"])
    with _writing(cfg["out"]):
        write_graph(graph, cfg["out"])
    print(f"wrote {cfg['out']}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")


def _cmd_import_graph(cfg) -> None:
    graph = read_node_edge_files(cfg["nodes"], cfg["edges"], cfg["origin"])
    if cfg["crop"] is not None:
        graph = crop_to_k_nearest(graph, cfg["crop"])
    with _writing(cfg["out"]):
        write_graph(graph, cfg["out"])
    print(f"wrote {cfg['out']}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")


def _cmd_gen_data(cfg) -> None:
    dataset = generate_synthetic_dataset(cfg["n"], _econ(cfg), seed=cfg["seed"])
    with _writing(cfg["out"]):
        write_dataset(dataset, cfg["out"])
    print(f"wrote {cfg['out']}: {len(dataset)} examples")


def _cmd_train(cfg) -> None:
    dataset = read_dataset(cfg["data"])
    result = train_mlp(
        dataset,
        learning_rate=cfg["learning_rate"],
        max_epochs=cfg["max_epochs"],
        patience=cfg["patience"],
        batch_size=cfg["batch_size"],
        hidden_layers=cfg["hidden_layers"],
        hidden_width=cfg["hidden_width"],
        seed=cfg["seed"],
    )
    with _writing(cfg["out"]):
        save_model(result.weights, cfg["out"])
    print(
        f"trained {cfg['out']}: train_rmse={result.train_rmse:.4f} "
        f"val_rmse={result.val_rmse:.4f} test_rmse={result.test_rmse:.4f} "
        f"epochs={result.epochs_run} best_epoch={result.best_epoch} "
        f"stopped_early={result.stopped_early}"
    )


def _cmd_solve(cfg) -> None:
    graph = read_graph(cfg["graph"])
    model = MLPModel(load_model(cfg["model"]))
    params = _econ(cfg)
    scenario = sample_scenario(graph, cfg["n"], seed=cfg["seed"])
    matrix = scenario_matrix(scenario)
    algorithm = cfg["algorithm"]
    if algorithm == "simsat":
        assignment = simsat(
            matrix, scenario.requests, model, params,
            restarts=cfg["restarts"], seed=cfg["seed"],
        )
    elif algorithm == "optimal":
        assignment = optimal_assign(matrix, scenario.requests, model, params)
    else:
        proxy = ProxyObjective(
            {"cost": "cost_only", "time": "time_only", "gain": "gain_proxy"}[algorithm],
            params,
        )
        assignment = optimal_assign(matrix, scenario.requests, proxy, params)
    text = format_assignment(assignment, evaluate_assignment(assignment, model))
    print(text, end="")
    if cfg["out"]:
        with _writing(cfg["out"]), open(
            cfg["out"], "w", encoding="utf-8", newline="\n"
        ) as fh:
            fh.write(text)


def _cmd_bench(cfg) -> None:
    model = MLPModel(load_model(cfg["model"]))
    graph = read_graph(cfg["graph"]) if cfg["graph"] else None
    result = run_benchmark(
        graph,
        model,
        n_values=cfg["n"],
        samples=cfg["samples"],
        params=_econ(cfg),
        algorithms=ALGORITHMS,
        restarts=cfg["restarts"],
        seed=cfg["seed"],
        workers=cfg["workers"],
        measure_timing=cfg["measure_timing"],
        vertices=cfg["vertices"],
    )
    aggregate = cfg["aggregate"] or default_aggregate_path(cfg["out"])
    with _writing(cfg["out"]):
        write_report(
            result, cfg["out"], aggregate_path=aggregate, chart_path=cfg["chart"]
        )
    print(f"wrote {cfg['out']} ({len(result.rows)} rows) and {aggregate}")


def _cmd_report(cfg) -> None:
    result = read_results(cfg["results"])
    with _writing(cfg["out"]):
        write_aggregate(result, cfg["out"])
    if cfg["chart"]:
        from .experiments import _write_chart, aggregate_rows

        with _writing(cfg["chart"]):
            _write_chart(aggregate_rows(result), cfg["chart"])
    print(f"wrote {cfg['out']}")


_HANDLERS = {
    "gen-graph": _cmd_gen_graph,
    "import-graph": _cmd_import_graph,
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "report": _cmd_report,
}


def dispatch(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        resolved = _resolve(args.command, args)
        _print_config(args.command, resolved)
        _HANDLERS[args.command](resolved)
    except (ValueError, FileNotFoundError) as exc:
        print(f"lastmile {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"lastmile {args.command}: runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
