"""Vectorized restart engine for simsat on large instances.

Running n^2 shuffle-and-insert restarts one by one in Python is hopeless
at n = 100, so all restarts advance in lockstep: step t inserts the t-th
passenger of every restart's shuffle at once, with the candidate scores
for a whole (restart x vehicle) grid gathered from precomputed tables.
Single and two-passenger loads are enumerated up front, three-passenger
loads too; four-passenger loads are scored on demand the first time any
restart proposes them and cached for the rest of the run.

Everything inside the engine is single precision for speed; the winning
restart is rebuilt through the canonical double-precision scoring path,
so only the choice of restart (and insertion ties closer than about 1e-6)
can differ from an exact replay.
"""

import itertools
import math

import numpy as np

from .satisfaction import EconParams, Gender, RideBatch, SatisfactionModel
from .vehicles import (
    assemble_assignment,
    nn_drop_off_order,
    score_routed_vehicle,
)

_EMPTY = np.int16(32000)  # sentinel occupant, sorts after every pid
_EVAL_CHUNK = 100_000


class _Instance:
    """Static per-passenger arrays the whole sweep reads from."""

    def __init__(self, matrix, passengers, model, params: EconParams):
        self.matrix = matrix
        self.params = params
        self.model = model
        self.requests = passengers
        self.origin = matrix.terminals[0]
        self.n = len(passengers)
        o_idx = matrix.index_of(self.origin)
        self.D = matrix.times.astype(np.float32)
        self.dest_idx = np.array(
            [matrix.index_of(r.destination) for r in passengers], dtype=np.intp
        )
        self.direct = self.D[o_idx, self.dest_idx]
        self.age = np.array([r.profile.age for r in passengers], dtype=np.float32)
        self.gender = np.array(
            [1.0 if r.profile.gender is Gender.MALE else 0.0 for r in passengers],
            dtype=np.float32,
        )
        self.employed = np.array(
            [1.0 if r.profile.employed else 0.0 for r in passengers], dtype=np.float32
        )
        # solo scores through the canonical interface so any model works
        self.solo_vals = model.score_rides(self._solo_batch()).astype(np.float32)

    def _solo_batch(self) -> RideBatch:
        t_o = np.asarray(self.params.wait_const + self.direct, dtype=float)
        c_o = np.asarray(self.params.M * self.direct, dtype=float)
        return RideBatch(
            t_o=t_o,
            c_o=c_o,
            t_P=t_o.copy(),
            c_P=c_o.copy(),
            n_additional=np.zeros(self.n),
            seat=np.zeros(self.n, dtype=np.int64),
            age=self.age.astype(float),
            gender=self.gender.astype(float),
            employed=self.employed.astype(float),
        )

    def subset_values(self, subsets: np.ndarray) -> np.ndarray:
        """Greedy-drop-order scores for (m, k) passenger subsets.

        Rows must be ascending; ties in the greedy order then resolve to
        the lowest pid exactly like nn_drop_off_order.
        """
        m, k = subsets.shape
        if m == 0:
            return np.empty(0, dtype=np.float32)
        out = np.empty(m, dtype=np.float32)
        for lo in range(0, m, _EVAL_CHUNK):
            out[lo : lo + _EVAL_CHUNK] = self._subset_values_chunk(
                subsets[lo : lo + _EVAL_CHUNK]
            )
        return out

    def _subset_values_chunk(self, subsets: np.ndarray) -> np.ndarray:
        p = self.params
        m, k = subsets.shape
        dests = self.dest_idx[subsets]  # (m, k) matrix indexes
        direct = self.direct[subsets]  # (m, k) by subset position

        # greedy drop order: nearest unvisited destination, first index wins
        remaining = np.ones((m, k), dtype=bool)
        order = np.empty((m, k), dtype=np.int64)
        arrival = np.empty((m, k), dtype=np.float32)
        rows = np.arange(m)
        cum = np.zeros(m, dtype=np.float32)
        cand = direct.copy()
        for step in range(k):
            masked = np.where(remaining, cand, np.float32(np.inf))
            choice = np.argmin(masked, axis=1)  # first minimum: lowest pid wins ties
            # same direct-time floor as the double-precision route builder
            cum = np.maximum(cum + masked[rows, choice], direct[rows, choice])
            order[:, step] = choice
            arrival[:, step] = cum
            remaining[rows, choice] = False
            cur = dests[rows, choice]
            cand = self.D[cur[:, None], dests]

        route_cost = np.float32(p.M) * arrival[:, k - 1]
        bits_d = np.take_along_axis(subsets, order, axis=1)
        direct_d = np.take_along_axis(direct, order, axis=1)
        t_o = np.float32(p.wait_const) + direct_d
        c_o = np.float32(p.M) * direct_d
        t_P = np.float32(p.wait_const) + arrival
        a = (
            np.float32(p.alpha) * t_o
            + np.float32(p.beta) * c_o
            - np.float32(p.alpha) * t_P
        )
        g = (a.sum(axis=1) - np.float32(p.beta) * route_cost) / np.float32(k)
        c_P = (a - g[:, None]) / np.float32(p.beta)

        F = np.zeros((m, k, 12), dtype=np.float32)
        F[:, :, 0] = t_o / 60.0
        F[:, :, 1] = c_o / 60.0
        F[:, :, 2] = t_P / 60.0
        F[:, :, 3] = c_P / 60.0
        F[:, :, 4] = np.float32((k - 1) / 3.0)
        for i in range(k):
            F[:, i, 5 + i] = 1.0
        F[:, :, 9] = self.age[bits_d] / 100.0
        F[:, :, 10] = self.gender[bits_d]
        F[:, :, 11] = self.employed[bits_d]
        scores = self.model.score_features_f32(F.reshape(m * k, 12)).reshape(m, k)
        return scores.sum(axis=1, dtype=np.float32)


def _combination_table(inst: _Instance, k: int):
    """Values for every k-subset, indexed by combinadic rank."""
    n = inst.n
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    if len(combos) == 0:
        return np.empty(0, dtype=np.float32)
    vals = inst.subset_values(combos)
    table = np.empty(len(combos), dtype=np.float32)
    table[_rank(combos)] = vals
    return table


_B2 = np.array([x * (x - 1) // 2 for x in range(128)], dtype=np.int64)
_B3 = np.array([x * (x - 1) * (x - 2) // 6 for x in range(128)], dtype=np.int64)


def _rank(combos: np.ndarray) -> np.ndarray:
    """Combinadic rank of ascending 2- or 3-subsets."""
    if combos.shape[1] == 2:
        return _B2[combos[:, 1]] + combos[:, 0]
    return _B3[combos[:, 2]] + _B2[combos[:, 1]] + combos[:, 0]


def _pack_quad(q0, q1, q2, q3) -> np.ndarray:
    return (
        (q0.astype(np.uint32) << 21)
        | (q1.astype(np.uint32) << 14)
        | (q2.astype(np.uint32) << 7)
        | q3.astype(np.uint32)
    )


class _QuadStore:
    """Sorted-key cache of four-passenger load scores, filled on demand."""

    def __init__(self, inst: _Instance):
        self.inst = inst
        self.keys = np.empty(0, dtype=np.uint32)
        self.vals = np.empty(0, dtype=np.float32)

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        """Values for packed quad keys, scoring unseen ones first."""
        uniq, inverse = np.unique(keys, return_inverse=True)
        if self.keys.size:
            pos_u = np.searchsorted(self.keys, uniq)
            pos_c = np.minimum(pos_u, self.keys.size - 1)
            miss_mask = self.keys[pos_c] != uniq
            missing = uniq[miss_mask]
            pos = pos_u[miss_mask]
        else:
            missing = uniq
            pos = np.zeros(len(uniq), dtype=np.int64)
        if missing.size:
            subsets = np.stack(
                [
                    (missing >> 21) & 127,
                    (missing >> 14) & 127,
                    (missing >> 7) & 127,
                    missing & 127,
                ],
                axis=1,
            ).astype(np.int64)
            new_vals = self.inst.subset_values(subsets)
            self.keys = np.insert(self.keys, pos, missing)
            self.vals = np.insert(self.vals, pos, new_vals)
        idx = np.searchsorted(self.keys, uniq)
        return self.vals[idx][inverse]


def simsat_sweep(
    matrix,
    passengers,
    model: SatisfactionModel,
    params: EconParams,
    *,
    restarts: int,
    seed: int = 0,
    chunk_restarts: int = 8192,
):
    """All-restart lockstep sweep; returns the winning restart's assignment."""
    inst = _Instance(matrix, passengers, model, params)
    n = inst.n
    if n < 2:
        stops = ((passengers[0].pid, passengers[0].destination),)
        _, vehicle, outcomes = score_routed_vehicle(
            matrix, inst.origin, stops, model, params,
            {passengers[0].pid: passengers[0].profile},
        )
        return assemble_assignment(passengers, [(vehicle, outcomes)], params)

    val_pair = _combination_table(inst, 2)
    val_tri = _combination_table(inst, 3) if n >= 3 else np.empty(0, np.float32)
    quads = _QuadStore(inst)

    best_total = -np.float32(np.inf)
    best_vehicles = None
    for base in range(0, restarts, chunk_restarts):
        r = min(chunk_restarts, restarts - base)
        total, vehicles = _sweep_chunk(
            inst, val_pair, val_tri, quads, base, r, seed
        )
        if total > best_total:
            best_total = total
            best_vehicles = vehicles

    profiles = {req.pid: req.profile for req in inst.requests}
    routed = []
    for members in best_vehicles:
        stops = tuple((inst.requests[b].pid, inst.requests[b].destination) for b in members)
        ordered = nn_drop_off_order(matrix, inst.origin, stops)
        _, vehicle, outcomes = score_routed_vehicle(
            matrix, inst.origin, ordered, model, params, profiles
        )
        routed.append((vehicle, outcomes))
    return assemble_assignment(inst.requests, routed, params)


def _sweep_chunk(inst, val_pair, val_tri, quads, base, R, seed):
    """Run restarts [base, base+R) together; return best (total, vehicles)."""
    n = inst.n
    shuffles = np.empty((R, n), dtype=np.int16)
    for i in range(R):
        shuffles[i] = np.random.default_rng((seed, base + i)).permutation(n)

    occ = np.full((R, n, 4), _EMPTY, dtype=np.int16)
    size = np.zeros((R, n), dtype=np.int8)
    val = np.zeros((R, n), dtype=np.float32)
    nveh = np.zeros(R, dtype=np.int16)
    rows = np.arange(R)

    for t in range(n):
        u = shuffles[:, t].astype(np.int16)
        solo_u = inst.solo_vals[u]
        V = int(nveh.max())
        if V > 0:
            sizes = size[:, :V]
            valid = (
                (np.arange(V)[None, :] < nveh[:, None])
                & (sizes >= 1)
                & (sizes < 4)
            )
            o = occ[:, :V, :]
            u_b = u[:, None]
            val_new = np.full((R, V), -np.inf, dtype=np.float32)

            is1 = valid & (sizes == 1)
            if is1.any():
                a = np.minimum(o[:, :, 0], u_b)
                b = np.maximum(o[:, :, 0], u_b)
                r2 = np.where(is1, _B2[np.where(is1, b, 1)] + a, 0)
                val_new[is1] = val_pair[r2[is1]]

            is2 = valid & (sizes == 2)
            if is2.any():
                t0 = np.minimum(o[:, :, 0], u_b)
                t2 = np.maximum(o[:, :, 1], u_b)
                t1 = (o[:, :, 0] + o[:, :, 1] + u_b - t0 - t2).astype(np.int16)
                r3 = _B3[np.where(is2, t2, 2)] + _B2[np.where(is2, t1, 1)] + t0
                val_new[is2] = val_tri[r3[is2]]

            is3 = valid & (sizes == 3)
            if is3.any():
                q0 = np.minimum(o[:, :, 0], u_b)
                q3 = np.maximum(o[:, :, 2], u_b)
                q1 = np.minimum(np.maximum(o[:, :, 0], u_b), o[:, :, 1])
                q2 = np.maximum(np.minimum(o[:, :, 2], u_b), o[:, :, 1])
                keys = _pack_quad(
                    np.where(is3, q0, 0),
                    np.where(is3, q1, 1),
                    np.where(is3, q2, 2),
                    np.where(is3, q3, 3),
                )
                val_new[is3] = quads.lookup(keys[is3])

            delta = np.where(valid, val_new - val[:, :V], -np.float32(np.inf))
            best_j = np.argmax(delta, axis=1)
            best_delta = delta[rows, best_j]
            insert = best_delta > solo_u
        else:
            insert = np.zeros(R, dtype=bool)
            best_j = None
            val_new = None

        if insert.any():
            ri = rows[insert]
            j = best_j[insert]
            s = size[ri, j].astype(np.intp)
            occ[ri, j, s] = u[insert]
            # one bubble pass restores the sorted occupant row
            for c in (2, 1, 0):
                a = occ[ri, j, c]
                b = occ[ri, j, c + 1]
                swap = a > b
                if swap.any():
                    occ[ri[swap], j[swap], c] = b[swap]
                    occ[ri[swap], j[swap], c + 1] = a[swap]
            size[ri, j] += 1
            val[ri, j] = val_new[ri, j]
        fresh = ~insert
        if fresh.any():
            rf = rows[fresh]
            slot = nveh[fresh].astype(np.intp)
            occ[rf, slot, 0] = u[fresh]
            size[rf, slot] = 1
            val[rf, slot] = solo_u[fresh]
            nveh[fresh] += 1

    V = int(nveh.max())
    mask = np.arange(V)[None, :] < nveh[:, None]
    totals = np.where(mask, val[:, :V], np.float32(0)).sum(axis=1, dtype=np.float32)
    best_r = int(np.argmax(totals))
    members = []
    for j in range(int(nveh[best_r])):
        k = int(size[best_r, j])
        members.append(tuple(int(b) for b in occ[best_r, j, :k]))
    return totals[best_r], members
