"""Vehicles, routed outcomes, and the one scoring path every solver uses.

A vehicle leaves the shared origin and drops its 1..4 passengers in some
order. Drop-off order is chosen greedily (nearest unvisited destination,
ties to the lowest passenger id), seats are handed out in drop-off order
over the fixed priority front, right back, left back, middle back, and
payments come from the equal-gain split. score_routed_vehicle is the
single primitive that turns a routed vehicle into per-passenger outcomes
and model scores; exact-equality tests between solvers lean on every code
path funnelling through it with identical floating-point steps.
"""

import math
from dataclasses import dataclass

import numpy as np

from .graphs import TravelTimeMatrix
from .payments import VehicleBill, compute_equal_gain_payments
from .satisfaction import (
    SEAT_PRIORITY,
    EconParams,
    Gender,
    PassengerProfile,
    RideBatch,
    SatisfactionModel,
    Seat,
)

VEHICLE_CAPACITY = 4


@dataclass(frozen=True)
class PassengerRequest:
    pid: int
    destination: int
    profile: PassengerProfile


@dataclass(frozen=True)
class PassengerOutcome:
    """Everything one passenger experiences under an assignment."""

    pid: int
    destination: int
    t_o: float  # private door-to-door minutes
    c_o: float  # private price, dollars
    d_o: float  # private drive distance, km
    t_P: float  # shared door-to-door minutes
    c_P: float  # payment under the equal-gain split, dollars
    d_P: float  # shared drive distance to own drop-off, km
    seat: Seat
    n_additional: int


@dataclass(frozen=True)
class Vehicle:
    """One vehicle's route: passengers in drop-off order."""

    drop_pids: tuple
    drop_dests: tuple
    arrival_drive: tuple  # drive minutes from origin to each drop-off
    route_time: float  # drive minutes to the last drop-off
    total_cost: float  # M * route_time, dollars

    def __post_init__(self):
        if not 1 <= len(self.drop_pids) <= VEHICLE_CAPACITY:
            raise ValueError("vehicle must carry 1..4 passengers")


@dataclass(frozen=True)
class Assignment:
    """A full solution: every passenger in exactly one routed vehicle."""

    requests: tuple
    vehicles: tuple
    outcomes: dict  # pid -> PassengerOutcome
    params: EconParams

    def n_passengers(self) -> int:
        return len(self.requests)

    def total_cost(self) -> float:
        return math.fsum(v.total_cost for v in self.vehicles)


def nn_drop_off_order(matrix: TravelTimeMatrix, origin, stops) -> tuple:
    """Order (pid, destination) stops greedily by nearest next destination.

    From the current position the next drop-off is the unvisited
    destination with the smallest travel time, ties to the lowest pid.
    """
    if not stops:
        raise ValueError("no stops to order")
    remaining = list(stops)
    for _, dest in remaining:
        matrix.index_of(dest)  # raises on a destination outside the matrix
    ordered = []
    pos = origin
    while remaining:
        best = min(remaining, key=lambda s: (matrix.time(pos, s[1]), s[0]))
        remaining.remove(best)
        ordered.append(best)
        pos = best[1]
    return tuple(ordered)


def build_routed_vehicle(matrix: TravelTimeMatrix, origin, ordered_stops,
                         params: EconParams) -> Vehicle:
    """Vehicle quantities for an already-ordered drop-off sequence."""
    arrival = []
    drive = 0.0
    pos = origin
    for _, dest in ordered_stops:
        # the leg-by-leg sum can round an ulp below the all-pairs entry
        # when a stop lies on another's shortest path; floor it so a
        # detour never "beats" the direct trip by float dust
        drive = max(drive + matrix.time(pos, dest), matrix.time(origin, dest))
        arrival.append(drive)
        pos = dest
    route_time = arrival[-1]
    return Vehicle(
        drop_pids=tuple(pid for pid, _ in ordered_stops),
        drop_dests=tuple(dest for _, dest in ordered_stops),
        arrival_drive=tuple(arrival),
        route_time=route_time,
        total_cost=params.M * route_time,
    )


def _ride_batch(vehicle: Vehicle, matrix: TravelTimeMatrix, origin,
                params: EconParams, profiles) -> tuple:
    """(RideBatch, bill, payment result) for one routed vehicle."""
    k = len(vehicle.drop_pids)
    t_o, c_o, t_P = [], [], []
    for dest, arr in zip(vehicle.drop_dests, vehicle.arrival_drive):
        direct = matrix.time(origin, dest)
        t_o.append(params.wait_const + direct)
        c_o.append(params.M * direct)
        t_P.append(params.wait_const + arr)
    bill = VehicleBill(
        t_o=tuple(t_o), c_o=tuple(c_o), t_P=tuple(t_P), total_cost=vehicle.total_cost
    )
    payment = compute_equal_gain_payments(bill, params)
    prof = [profiles[pid] for pid in vehicle.drop_pids]
    batch = RideBatch(
        t_o=np.array(t_o),
        c_o=np.array(c_o),
        t_P=np.array(t_P),
        c_P=np.array(payment.payments),
        n_additional=np.full(k, float(k - 1)),
        seat=np.arange(k, dtype=np.int64),
        age=np.array([p.age for p in prof], dtype=float),
        gender=np.array([1.0 if p.gender is Gender.MALE else 0.0 for p in prof]),
        employed=np.array([1.0 if p.employed else 0.0 for p in prof]),
    )
    return batch, bill, payment


def score_routed_vehicle_multi(matrix: TravelTimeMatrix, origin, ordered_stops,
                               models, params: EconParams, profiles):
    """Score one routed vehicle under several models at once.

    Returns (scores, per_passenger, vehicle, outcomes): `scores` has one
    total per model, `per_passenger` one score row per model. Outcomes are
    computed once; models only differ in how they read them.
    """
    vehicle = build_routed_vehicle(matrix, origin, ordered_stops, params)
    batch, _, payment = _ride_batch(vehicle, matrix, origin, params, profiles)
    k = len(vehicle.drop_pids)
    outcomes = tuple(
        PassengerOutcome(
            pid=vehicle.drop_pids[i],
            destination=vehicle.drop_dests[i],
            t_o=float(batch.t_o[i]),
            c_o=float(batch.c_o[i]),
            d_o=float(batch.c_o[i] / params.M * params.speed),
            t_P=float(batch.t_P[i]),
            c_P=float(batch.c_P[i]),
            d_P=float(vehicle.arrival_drive[i] * params.speed),
            seat=SEAT_PRIORITY[i],
            n_additional=k - 1,
        )
        for i in range(k)
    )
    per_passenger = [model.score_rides(batch) for model in models]
    scores = [math.fsum(p) for p in per_passenger]
    return scores, per_passenger, vehicle, outcomes


def score_routed_vehicle(matrix, origin, ordered_stops, model,
                         params: EconParams, profiles):
    """Single-model convenience over score_routed_vehicle_multi."""
    scores, _, vehicle, outcomes = score_routed_vehicle_multi(
        matrix, origin, ordered_stops, [model], params, profiles
    )
    return scores[0], vehicle, outcomes


def vehicle_satisfaction(matrix: TravelTimeMatrix, origin, stops,
                         model: SatisfactionModel, params: EconParams,
                         profiles) -> float:
    """Total model score of one vehicle, drop-offs ordered greedily.

    The input listing order never matters; the greedy ordering and its
    lowest-pid tie rule fix the route. Likert-scale models give a solo
    vehicle exactly 4; proxy objectives give it 0.
    """
    ordered = nn_drop_off_order(matrix, origin, stops)
    score, _, _ = score_routed_vehicle(matrix, origin, ordered, model, params, profiles)
    return score


def assemble_assignment(requests, routed, params: EconParams) -> Assignment:
    """Build an Assignment from (vehicle, outcomes) pairs."""
    outcomes = {}
    vehicles = []
    for vehicle, outs in routed:
        vehicles.append(vehicle)
        for o in outs:
            if o.pid in outcomes:
                raise ValueError(f"passenger {o.pid} appears in two vehicles")
            outcomes[o.pid] = o
    missing = {r.pid for r in requests} - outcomes.keys()
    if missing:
        raise ValueError(f"passengers {sorted(missing)} unassigned")
    if len(outcomes) != len(requests):
        raise ValueError("outcome count does not match request count")
    return Assignment(
        requests=tuple(requests),
        vehicles=tuple(vehicles),
        outcomes=outcomes,
        params=params,
    )


def assignment_ride_batches(assignment: Assignment):
    """One RideBatch per vehicle, rebuilt from stored outcomes.

    Scores recomputed from these batches are bit-identical to the ones
    computed when the assignment was built, because the batch rows repeat
    the same values in the same order.
    """
    profiles = {r.pid: r.profile for r in assignment.requests}
    batches = []
    for vehicle in assignment.vehicles:
        k = len(vehicle.drop_pids)
        outs = [assignment.outcomes[pid] for pid in vehicle.drop_pids]
        prof = [profiles[pid] for pid in vehicle.drop_pids]
        batches.append(
            RideBatch(
                t_o=np.array([o.t_o for o in outs]),
                c_o=np.array([o.c_o for o in outs]),
                t_P=np.array([o.t_P for o in outs]),
                c_P=np.array([o.c_P for o in outs]),
                n_additional=np.full(k, float(k - 1)),
                seat=np.arange(k, dtype=np.int64),
                age=np.array([p.age for p in prof], dtype=float),
                gender=np.array([1.0 if p.gender is Gender.MALE else 0.0 for p in prof]),
                employed=np.array([1.0 if p.employed else 0.0 for p in prof]),
            )
        )
    return batches


def format_assignment(assignment: Assignment, avg_sat: float) -> str:
    """Text form: one `cab <k>: <pid@drop_min:pay_usd> ...` line per
    vehicle, then `avg_sat <x>`."""
    lines = []
    for k, vehicle in enumerate(assignment.vehicles):
        stops = " ".join(
            "%d@%.2f:%.2f"
            % (pid, assignment.outcomes[pid].t_P, assignment.outcomes[pid].c_P)
            for pid in vehicle.drop_pids
        )
        lines.append(f"cab {k}: {stops}")
    lines.append("avg_sat %.4f" % avg_sat)
    return "\n".join(lines) + "\n"
