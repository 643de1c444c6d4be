"""Benchmark harness: sampled scenarios, the five-algorithm matrix, reports.

Each benchmark cell (n passengers, sample id) draws a scenario on a seeded
random graph, builds one terminal travel-time matrix, then runs five
algorithms over shared subset-score tables: the exact solver under the
full model and under the three proxy objectives, plus the stochastic
restart solver under the full model. Every assignment is evaluated with
the full model regardless of what objective built it; that comparison is
the point of the exercise.

Sampled rider profiles follow fixed marginals: female with probability
147/257, employed 195/257, age log-normal with median 31 clamped to
[19, 67]. Destinations are uniform over all vertices.
"""

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datasets import sample_profile_columns
from .graphs import RoadGraph, build_travel_time_matrix, generate_random_graph
from .satisfaction import EconParams, Gender, PassengerProfile, ProxyObjective
from .solvers import (
    OPTIMAL_N_LIMIT,
    TABLE_N_LIMIT,
    build_subset_tables,
    evaluate_assignment,
    optimal_from_tables,
    simsat,
    simsat_from_tables,
)
from .vehicles import PassengerRequest

ALGORITHMS = (
    "optimal_full",
    "simsat_full",
    "optimal_cost",
    "optimal_time",
    "optimal_gain",
)

RESULTS_HEADER = "algorithm,n,sample,avg_sat,total_cost,vehicles,runtime_ms"
AGGREGATE_HEADER = "algorithm,n,mean_sat,stderr,mean_cost"

DEFAULT_VERTICES = 35
DEFAULT_N_VALUES = (6, 7, 8, 9, 10)
DEFAULT_SAMPLES = 100


@dataclass(frozen=True)
class Scenario:
    graph: RoadGraph
    requests: tuple
    seed: object


@dataclass(frozen=True)
class BenchmarkRow:
    algorithm: str
    n: int
    sample: int
    avg_sat: float
    total_cost: float
    vehicles: int
    runtime_ms: float

    @property
    def skipped(self) -> bool:
        """True for a solver that refused the instance (limit exceeded)."""
        return math.isnan(self.avg_sat)


@dataclass(frozen=True)
class BenchmarkResult:
    rows: tuple

    def __post_init__(self):
        if not self.rows:
            raise ValueError("benchmark produced no rows")


def sample_scenario(graph: RoadGraph, n: int, seed) -> Scenario:
    """n passenger requests on `graph`; deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    node_ids = graph.node_ids
    dests = rng.integers(len(node_ids), size=n)
    gender, employed, age = sample_profile_columns(rng, n)
    requests = tuple(
        PassengerRequest(
            pid=i,
            destination=node_ids[int(dests[i])],
            profile=PassengerProfile(
                age=int(age[i]),
                gender=Gender.MALE if gender[i] else Gender.FEMALE,
                employed=bool(employed[i]),
            ),
        )
        for i in range(n)
    )
    return Scenario(graph=graph, requests=requests, seed=seed)


def scenario_matrix(scenario: Scenario):
    """Terminal travel-time matrix: origin plus the scenario's destinations."""
    graph = scenario.graph
    dests = []
    for r in scenario.requests:
        if r.destination not in dests and r.destination != graph.origin:
            dests.append(r.destination)
    return build_travel_time_matrix(graph, (graph.origin, *dests))


def _simsat_seed(master, n: int, sample: int) -> int:
    ss = np.random.SeedSequence((_seed_ints(master)) + (n, sample, 2))
    return int(ss.generate_state(1, np.uint64)[0])


def _seed_ints(master) -> tuple:
    if isinstance(master, tuple):
        return master
    return (int(master),)


def _flagged_row(tag: str, n: int, sample: int) -> BenchmarkRow:
    return BenchmarkRow(
        algorithm=tag,
        n=n,
        sample=sample,
        avg_sat=float("nan"),
        total_cost=float("nan"),
        vehicles=0,
        runtime_ms=0.0,
    )


def run_benchmark_cell(
    graph: RoadGraph | None,
    model,
    n: int,
    sample: int,
    *,
    params: EconParams = EconParams(),
    algorithms=ALGORITHMS,
    restarts: int | None = None,
    seed=0,
    measure_timing: bool = False,
    vertices: int = DEFAULT_VERTICES,
) -> list:
    """All requested algorithm rows for one (n, sample) cell.

    graph=None draws a fresh seeded random graph for the cell. An exact
    solve past its size limit yields a flagged row (NaN satisfaction)
    instead of an answer. runtime_ms is reported as 0 unless
    measure_timing is set: wall clocks are not reproducible, and the
    default output must be byte-identical across reruns.
    """
    base = _seed_ints(seed)
    cell_graph = graph
    if cell_graph is None:
        cell_graph = generate_random_graph(vertices, seed=base + (n, sample, 0))
    scenario = sample_scenario(cell_graph, n, seed=base + (n, sample, 1))
    matrix = scenario_matrix(scenario)

    objectives = [
        model,
        ProxyObjective("cost_only", params),
        ProxyObjective("time_only", params),
        ProxyObjective("gain_proxy", params),
    ]
    # shared subset scoring is deliberately outside the per-row clocks
    tables = None
    if n <= TABLE_N_LIMIT:
        tables = build_subset_tables(matrix, scenario.requests, objectives, params)
    n_restarts = restarts if restarts is not None else n * n
    sim_seed = _simsat_seed(seed, n, sample)

    def solve(tag):
        if tag == "simsat_full":
            if tables is not None:
                return simsat_from_tables(
                    tables, 0, restarts=n_restarts, seed=sim_seed
                )
            return simsat(
                matrix,
                scenario.requests,
                model,
                params=params,
                restarts=n_restarts,
                seed=sim_seed,
            )
        idx = {"optimal_full": 0, "optimal_cost": 1,
               "optimal_time": 2, "optimal_gain": 3}[tag]
        return optimal_from_tables(tables, idx)

    rows = []
    for tag in algorithms:
        if tag not in ALGORITHMS:
            raise ValueError(f"unknown algorithm tag {tag!r}")
        if tag.startswith("optimal") and n > OPTIMAL_N_LIMIT:
            rows.append(_flagged_row(tag, n, sample))
            continue
        t0 = time.perf_counter()
        assignment = solve(tag)
        dt_ms = (time.perf_counter() - t0) * 1000.0
        rows.append(
            BenchmarkRow(
                algorithm=tag,
                n=n,
                sample=sample,
                avg_sat=evaluate_assignment(assignment, model),
                total_cost=assignment.total_cost(),
                vehicles=len(assignment.vehicles),
                runtime_ms=dt_ms if measure_timing else 0.0,
            )
        )
    return rows


def _cell_job(args):
    (graph, model, n, sample, params, algorithms, restarts, seed,
     measure_timing, vertices) = args
    return run_benchmark_cell(
        graph,
        model,
        n,
        sample,
        params=params,
        algorithms=algorithms,
        restarts=restarts,
        seed=seed,
        measure_timing=measure_timing,
        vertices=vertices,
    )


def run_benchmark(
    graph: RoadGraph | None,
    model,
    *,
    n_values=DEFAULT_N_VALUES,
    samples: int = DEFAULT_SAMPLES,
    params: EconParams = EconParams(),
    algorithms=ALGORITHMS,
    restarts: int | None = None,
    seed=0,
    workers: int = 1,
    measure_timing: bool = False,
    vertices: int = DEFAULT_VERTICES,
) -> BenchmarkResult:
    """The full matrix over n_values x samples; rows in deterministic order.

    Pass graph=None to draw an independent seeded random graph per cell.
    Cells are independent, so they may run in worker processes; results
    are ordered by (n, sample, algorithm) regardless of scheduling.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n_values = tuple(n_values)
    jobs = [
        (graph, model, n, s, params, tuple(algorithms), restarts, seed,
         measure_timing, vertices)
        for n in n_values
        for s in range(samples)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_cell_job, jobs, chunksize=4))
    else:
        per_cell = [_cell_job(j) for j in jobs]
    rows = [row for cell in per_cell for row in cell]
    order = {tag: i for i, tag in enumerate(ALGORITHMS)}
    rows.sort(key=lambda r: (r.n, r.sample, order[r.algorithm]))
    return BenchmarkResult(rows=tuple(rows))


def write_results(result: BenchmarkResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for r in result.rows:
            fh.write(
                f"{r.algorithm},{r.n},{r.sample},{r.avg_sat!r},"
                f"{r.total_cost!r},{r.vehicles},{r.runtime_ms!r}\n"
            )


def read_results(path) -> BenchmarkResult:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RESULTS_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for ln, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise ValueError(f"{path}: line {ln}: expected 7 fields")
            try:
                rows.append(
                    BenchmarkRow(
                        algorithm=parts[0],
                        n=int(parts[1]),
                        sample=int(parts[2]),
                        avg_sat=float(parts[3]),
                        total_cost=float(parts[4]),
                        vehicles=int(parts[5]),
                        runtime_ms=float(parts[6]),
                    )
                )
            except ValueError:
                raise ValueError(f"{path}: line {ln}: bad field") from None
    return BenchmarkResult(rows=tuple(rows))


def aggregate_rows(result: BenchmarkResult) -> list:
    """(algorithm, n, mean_sat, stderr, mean_cost) per algorithm and n.

    Output order: algorithms in their canonical order, then n ascending.
    The standard error uses the sample standard deviation (ddof 1); a
    single sample reports 0. Flagged (skipped) rows are left out.
    """
    cells = {}
    for r in result.rows:
        if r.skipped:
            continue
        cells.setdefault((r.algorithm, r.n), []).append(r)
    order = {tag: i for i, tag in enumerate(ALGORITHMS)}
    out = []
    for (tag, n), rows in sorted(
        cells.items(), key=lambda kv: (order.get(kv[0][0], len(order)), kv[0][1])
    ):
        rows = sorted(rows, key=lambda r: r.sample)
        sats = np.array([r.avg_sat for r in rows])
        costs = np.array([r.total_cost for r in rows])
        stderr = 0.0
        if len(rows) > 1:
            stderr = float(np.std(sats, ddof=1) / math.sqrt(len(rows)))
        out.append((tag, n, float(np.mean(sats)), stderr, float(np.mean(costs))))
    return out


def default_aggregate_path(results_path) -> str:
    stem, ext = os.path.splitext(os.fspath(results_path))
    return stem + "_agg" + (ext or ".csv")


def write_aggregate(result: BenchmarkResult, path) -> None:
    agg = aggregate_rows(result)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(AGGREGATE_HEADER + "\n")
        for tag, n, mean_sat, stderr, mean_cost in agg:
            fh.write(f"{tag},{n},{mean_sat!r},{stderr!r},{mean_cost!r}\n")


def write_report(
    result: BenchmarkResult, path, *, aggregate_path=None, chart_path=None
) -> None:
    """Write the row CSV plus the aggregate CSV, optionally a line chart.

    With no explicit aggregate_path the aggregate lands next to the row
    file with an `_agg` suffix.
    """
    if aggregate_path is None:
        aggregate_path = default_aggregate_path(path)
    write_results(result, path)
    write_aggregate(result, aggregate_path)
    if chart_path is not None:
        _write_chart(aggregate_rows(result), chart_path)


def _write_chart(agg, chart_path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for tag in ALGORITHMS:
        pts = [(n, m) for a, n, m, _, _ in agg if a == tag]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=tag)
    ax.set_xlabel("passengers")
    ax.set_ylabel("average satisfaction")
    ax.legend()
    fig.tight_layout()
    fig.savefig(chart_path, dpi=120)
    plt.close(fig)
