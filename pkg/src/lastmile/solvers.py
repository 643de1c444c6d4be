"""Assignment solvers: stochastic greedy restarts and exact enumeration.

All solvers maximize a sum of per-passenger scores under one scoring
interface. The exact solver walks every way to split n passengers into
vehicles of capacity 4: first the size profiles (coin-change partitions of
n into parts of at most 4), then for each profile every set partition with
those block sizes, treating equal-size blocks as unordered; each block is
routed by its best drop-off permutation. The stochastic solver (simsat)
shuffles passengers and greedily inserts each into the vehicle whose score
improves most, against the option of opening a fresh solo vehicle, keeping
the best of n^2 restarts.

For up to TABLE_N_LIMIT passengers every subset of at most 4 passengers is
scored once up front (best permutation and greedy-order values); both
solvers then work off those tables through the same canonical scoring
primitive, which is what makes exact cross-checks between them meaningful.
Larger instances switch to a vectorized restart engine in lockstep.py.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .satisfaction import EconParams, SatisfactionModel
from .vehicles import (
    VEHICLE_CAPACITY,
    Assignment,
    assemble_assignment,
    assignment_ride_batches,
    nn_drop_off_order,
    score_routed_vehicle,
    score_routed_vehicle_multi,
)

OPTIMAL_N_LIMIT = 10
BRUTE_N_LIMIT = 7
TABLE_N_LIMIT = 16

_partition_cache = {}
_set_partition_cache = {}


def enumerate_capacity_partitions(n: int, cap: int = VEHICLE_CAPACITY) -> tuple:
    """All multisets of vehicle sizes in 1..cap summing to n.

    Each partition is a non-increasing tuple. The sequence runs in
    ascending lexicographic order of those tuples, so the all-solo split
    comes first and profiles with fewer, larger vehicles come later; tie
    handling elsewhere leans on that order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    key = (n, cap)
    if key not in _partition_cache:

        def gen(remaining, max_part):
            if remaining == 0:
                yield ()
                return
            for largest in range(1, min(remaining, max_part) + 1):
                for rest in gen(remaining - largest, largest):
                    yield (largest,) + rest

        _partition_cache[key] = tuple(gen(n, cap))
    return _partition_cache[key]


def _set_partition_masks(n: int, shape: tuple) -> np.ndarray:
    """Canonical set partitions of {0..n-1} into blocks sized per `shape`.

    Rows are partitions; columns hold block bitmasks ordered by each
    block's smallest member. The lowest unassigned element always opens
    the next block and equal-size blocks are interchangeable, so every set
    partition appears exactly once. Cached per (n, shape); the structure
    is instance-independent.
    """
    key = (n, shape)
    if key in _set_partition_cache:
        return _set_partition_cache[key]
    rows = []

    def gen(avail, sizes, acc):
        if not sizes:
            rows.append(tuple(acc))
            return
        low = avail[0]
        rest = avail[1:]
        seen_sizes = set()
        for i, s in enumerate(sizes):
            if s in seen_sizes:
                continue
            seen_sizes.add(s)
            remaining_sizes = sizes[:i] + sizes[i + 1 :]
            for others in itertools.combinations(rest, s - 1):
                mask = 1 << low
                for o in others:
                    mask |= 1 << o
                chosen = set(others)
                gen(
                    tuple(x for x in rest if x not in chosen),
                    remaining_sizes,
                    acc + [mask],
                )

    sizes_desc = tuple(sorted(shape, reverse=True))
    gen(tuple(range(n)), sizes_desc, [])
    arr = np.array(rows, dtype=np.int64)
    _set_partition_cache[key] = arr
    return arr


def count_capacity_set_partitions(n: int, cap: int = VEHICLE_CAPACITY) -> int:
    """Number of set partitions of n elements with blocks of at most cap."""
    a = [1] + [0] * n
    for m in range(1, n + 1):
        a[m] = sum(
            math.comb(m - 1, k - 1) * a[m - k] for k in range(1, min(cap, m) + 1)
        )
    return a[n]


@dataclass
class SubsetTables:
    """Per-subset scores for every candidate vehicle load of at most 4.

    Subsets are bitmasks over passengers sorted by pid. For each model:
    val_best[mask] is the best score over drop-off permutations and
    best_stops[mask] the permutation achieving it (first found wins ties);
    val_nn[mask] scores the greedy nearest-neighbor order nn_stops[mask],
    which is what simsat's incremental deltas use.
    """

    requests: tuple  # sorted by pid
    matrix: object
    params: EconParams
    models: tuple
    n: int
    origin: object
    profiles: dict
    val_best: list
    val_nn: list
    best_stops: list
    nn_stops: dict


def build_subset_tables(matrix, requests, models, params: EconParams) -> SubsetTables:
    """Score every <=4-passenger subset under every model, once."""
    reqs = tuple(sorted(requests, key=lambda r: r.pid))
    n = len(reqs)
    if n > TABLE_N_LIMIT:
        raise ValueError(f"subset tables limited to {TABLE_N_LIMIT} passengers")
    profiles = {r.pid: r.profile for r in reqs}
    origin = matrix.terminals[0]
    n_models = len(models)
    size = 1 << n
    val_best = [np.full(size, -np.inf) for _ in range(n_models)]
    val_nn = [np.full(size, -np.inf) for _ in range(n_models)]
    best_stops = [dict() for _ in range(n_models)]
    nn_stops = {}

    bits = list(range(n))
    for k in range(1, min(VEHICLE_CAPACITY, n) + 1):
        for combo in itertools.combinations(bits, k):
            mask = 0
            for b in combo:
                mask |= 1 << b
            stops = tuple((reqs[b].pid, reqs[b].destination) for b in combo)
            nn_perm = nn_drop_off_order(matrix, origin, stops)
            nn_stops[mask] = nn_perm
            for perm in itertools.permutations(stops):
                scores, _, _, _ = score_routed_vehicle_multi(
                    matrix, origin, perm, models, params, profiles
                )
                for m in range(n_models):
                    if scores[m] > val_best[m][mask]:
                        val_best[m][mask] = scores[m]
                        best_stops[m][mask] = perm
                    if perm == nn_perm:
                        val_nn[m][mask] = scores[m]

    return SubsetTables(
        requests=reqs,
        matrix=matrix,
        params=params,
        models=tuple(models),
        n=n,
        origin=origin,
        profiles=profiles,
        val_best=val_best,
        val_nn=val_nn,
        best_stops=best_stops,
        nn_stops=nn_stops,
    )


def _mask_blocks_value(tables: SubsetTables, model_index: int, masks) -> float:
    """Canonical total for one set partition: flat fsum over all scores."""
    model = tables.models[model_index]
    flat = []
    for mask in masks:
        stops = tables.best_stops[model_index][int(mask)]
        _, per_passenger, _, _ = score_routed_vehicle_multi(
            tables.matrix, tables.origin, stops, [model], tables.params, tables.profiles
        )
        flat.extend(per_passenger[0])
    return math.fsum(flat)


def _assignment_from_blocks(tables: SubsetTables, stops_per_block) -> Assignment:
    routed = []
    for stops in stops_per_block:
        model = tables.models[0]
        _, _, vehicle, outcomes = score_routed_vehicle_multi(
            tables.matrix, tables.origin, stops, [model], tables.params, tables.profiles
        )
        routed.append((vehicle, outcomes))
    return assemble_assignment(tables.requests, routed, tables.params)


def optimal_from_tables(tables: SubsetTables, model_index: int) -> Assignment:
    """Exact maximizer over all capacity-respecting partitions.

    Size profiles are scanned in their canonical order and a candidate
    replaces the incumbent only on a strictly larger canonical total, so
    ties resolve to the earliest profile; with the all-solo profile first,
    a tied objective (time saved, say) keeps every passenger alone.
    """
    n = tables.n
    vals = tables.val_best[model_index]
    best_value = -math.inf
    best_masks = None
    for shape in enumerate_capacity_partitions(n):
        sp = _set_partition_masks(n, shape)
        totals = vals[sp].sum(axis=1)
        j = int(np.argmax(totals))
        value = _mask_blocks_value(tables, model_index, sp[j])
        if value > best_value:
            best_value = value
            best_masks = sp[j]
    stops = [tables.best_stops[model_index][int(m)] for m in best_masks]
    return _assignment_from_blocks(tables, stops)


def optimal_assign(
    matrix,
    passengers,
    objective: SatisfactionModel,
    params: EconParams,
    *,
    limit: int = OPTIMAL_N_LIMIT,
) -> Assignment:
    """Best assignment under `objective` by exhaustive partition search."""
    passengers = tuple(passengers)
    if not passengers:
        raise ValueError("no passengers")
    if len(passengers) > limit:
        raise ValueError(
            f"exact solver refuses {len(passengers)} passengers (limit {limit})"
        )
    tables = build_subset_tables(matrix, passengers, [objective], params)
    return optimal_from_tables(tables, 0)


def simsat_from_tables(
    tables: SubsetTables,
    model_index: int,
    *,
    restarts: int,
    seed: int = 0,
    literal: bool = False,
) -> Assignment:
    """Shuffle-and-greedy-insert restarts over precomputed subset scores.

    Every vehicle score is the greedy-drop-order value val_nn. Restart i
    draws from its own stream keyed (seed, i), so granting more restarts
    extends, never reshuffles, the search: the anytime property. Default
    mode inserts only when the best insertion delta strictly beats the
    score a fresh solo vehicle would add, and ranks restarts by their true
    score total. Literal mode reproduces the published pseudocode: the
    delta is compared against zero, a new vehicle's own score is never
    banked, and a restart beats the incumbent only if its banked delta sum
    is strictly positive; the first restart stands in when none is.
    """
    n = tables.n
    vals = tables.val_nn[model_index]
    best_key = -math.inf if not literal else 0.0
    best_vehicles = None
    for i in range(restarts):
        rng = np.random.default_rng((seed, i))
        order = rng.permutation(n)
        vehicles = []  # bitmasks in creation order
        banked = 0.0
        for b in order:
            bit = 1 << int(b)
            best_delta = -math.inf
            best_j = -1
            for j, mask in enumerate(vehicles):
                if mask.bit_count() >= VEHICLE_CAPACITY:
                    continue
                delta = vals[mask | bit] - vals[mask]
                if delta > best_delta:
                    best_delta = delta
                    best_j = j
            if literal:
                do_insert = best_j >= 0 and best_delta >= 0.0
            else:
                # strict: a tie with the fresh-vehicle option opens a vehicle
                do_insert = best_j >= 0 and best_delta > vals[bit]
            if do_insert:
                vehicles[best_j] |= bit
                banked += best_delta
            else:
                vehicles.append(bit)
        if best_vehicles is None:
            best_vehicles = list(vehicles)
        key = banked if literal else math.fsum(vals[m] for m in vehicles)
        if key > best_key:
            best_key = key
            best_vehicles = list(vehicles)
    stops = [tables.nn_stops[m] for m in best_vehicles]
    return _assignment_from_blocks(tables, stops)


def simsat(
    matrix,
    passengers,
    model: SatisfactionModel,
    params: EconParams,
    *,
    restarts: int | None = None,
    seed: int = 0,
    literal: bool = False,
    engine: str = "auto",
) -> Assignment:
    """Stochastic restart assignment; deterministic per seed.

    restarts defaults to n^2. Instances with at most TABLE_N_LIMIT
    passengers run on exact subset tables; larger ones switch to the
    vectorized single-precision engine (literal mode is table-path only).
    """
    passengers = tuple(sorted(passengers, key=lambda r: r.pid))
    if not passengers:
        raise ValueError("no passengers")
    n = len(passengers)
    if restarts is None:
        restarts = n * n
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if engine not in ("auto", "table", "sweep"):
        raise ValueError("engine must be auto, table or sweep")
    use_table = engine == "table" or (engine == "auto" and n <= TABLE_N_LIMIT)
    if literal and not use_table:
        raise ValueError("literal mode requires the table engine (small n)")
    if use_table:
        tables = build_subset_tables(matrix, passengers, [model], params)
        return simsat_from_tables(
            tables, 0, restarts=restarts, seed=seed, literal=literal
        )
    from .lockstep import simsat_sweep

    return simsat_sweep(
        matrix, passengers, model, params, restarts=restarts, seed=seed
    )


def _brute_partitions(elements):
    """Every set partition with blocks of at most 4, smallest element first.

    Independent of the table-driven enumeration on purpose: recursion
    peels the smallest remaining element into each possible block.
    """
    if not elements:
        yield []
        return
    head = elements[0]
    rest = elements[1:]
    for k in range(0, min(VEHICLE_CAPACITY - 1, len(rest)) + 1):
        for mates in itertools.combinations(rest, k):
            block = (head,) + mates
            chosen = set(mates)
            remaining = tuple(x for x in rest if x not in chosen)
            for tail in _brute_partitions(remaining):
                yield [block] + tail


def brute_force_oracle(
    matrix,
    passengers,
    objective: SatisfactionModel,
    params: EconParams,
    *,
    limit: int = BRUTE_N_LIMIT,
) -> Assignment:
    """Reference maximizer by direct enumeration; for cross-checks only."""
    passengers = tuple(sorted(passengers, key=lambda r: r.pid))
    if not passengers:
        raise ValueError("no passengers")
    if len(passengers) > limit:
        raise ValueError(
            f"brute force refuses {len(passengers)} passengers (limit {limit})"
        )
    profiles = {r.pid: r.profile for r in passengers}
    origin = matrix.terminals[0]
    stops_all = tuple((r.pid, r.destination) for r in passengers)
    best_value = -math.inf
    best_routes = None
    for partition in _brute_partitions(stops_all):
        flat = []
        routes = []
        for block in partition:
            block_best = None
            block_scores = None
            for perm in itertools.permutations(block):
                score, per_passenger, _, _ = score_routed_vehicle_multi(
                    matrix, origin, perm, [objective], params, profiles
                )
                if block_best is None or score[0] > block_best[0]:
                    block_best = (score[0], perm)
                    block_scores = per_passenger[0]
            routes.append(block_best[1])
            flat.extend(block_scores)
        value = math.fsum(flat)
        if value > best_value:
            best_value = value
            best_routes = routes
    routed = []
    for perm in best_routes:
        _, _, vehicle, outcomes = score_routed_vehicle_multi(
            matrix, origin, perm, [objective], params, profiles
        )
        routed.append((vehicle, outcomes))
    return assemble_assignment(passengers, routed, params)


def assignment_objective_value(assignment: Assignment, model: SatisfactionModel) -> float:
    """Total model score of an assignment over its stored routes."""
    flat = []
    for batch in assignment_ride_batches(assignment):
        flat.extend(model.score_rides(batch))
    return math.fsum(flat)


def evaluate_assignment(assignment: Assignment, full_model: SatisfactionModel) -> float:
    """Average satisfaction per passenger under the deployed (full) model,
    whatever objective built the assignment."""
    return assignment_objective_value(assignment, full_model) / assignment.n_passengers()
