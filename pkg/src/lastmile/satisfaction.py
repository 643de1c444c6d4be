"""Satisfaction scoring: ride quantities, the gain formula, and objectives.

A ride is summarized by four numbers: door-to-door time and price of the
private alternative (t_o, c_o) and of the offered shared ride (t_P, c_P).
Inconvenience aggregates time and money linearly, i(t, c) = alpha*t +
beta*c, and a passenger's gain is the inconvenience saved by sharing:

    gain = (alpha*t_o + beta*c_o) - (alpha*t_P + beta*c_P)

Assignment objectives implement one common interface: score a batch of
rides, one score per passenger, higher is better. The trained network
scores on the 1..7 Likert scale with solo rides pinned at 4; the three
proxy objectives score relative improvement and give solo rides 0.
"""

import enum
from dataclasses import dataclass

import numpy as np

LIKERT_MIN = 1.0
LIKERT_MAX = 7.0
SOLO_SCORE = 4.0  # "neither satisfied nor dissatisfied"
N_FEATURES = 12


class Gender(enum.Enum):
    FEMALE = "female"
    MALE = "male"


class Seat(enum.Enum):
    FRONT = "front"
    RIGHT_BACK = "right_back"
    LEFT_BACK = "left_back"
    MIDDLE_BACK = "middle_back"


# cabin filling order: earlier drop-offs take earlier seats
SEAT_PRIORITY = (Seat.FRONT, Seat.RIGHT_BACK, Seat.LEFT_BACK, Seat.MIDDLE_BACK)
SEAT_INDEX = {seat: i for i, seat in enumerate(SEAT_PRIORITY)}


@dataclass(frozen=True)
class EconParams:
    """Time-money trade-off and operating-cost constants.

    alpha: dollars-per-minute value of travel time.
    beta: weight on money in the inconvenience aggregate.
    M: vehicle operating cost in dollars per drive minute.
    speed: km per minute, converting drive time to distance.
    wait_const: minutes added to every door-to-door time for boarding and
        waiting; it is not billed, so a solo ride has exactly zero gain.
    """

    alpha: float = 0.3
    beta: float = 1.0
    M: float = 1.0
    speed: float = 1.0
    wait_const: float = 5.0

    def __post_init__(self):
        for name in ("alpha", "beta", "M", "speed"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.wait_const < 0:
            raise ValueError("wait_const must be >= 0")


@dataclass(frozen=True)
class PassengerProfile:
    age: int
    gender: Gender
    employed: bool

    def __post_init__(self):
        if self.age <= 0:
            raise ValueError("age must be positive")


@dataclass(frozen=True)
class RideOffer:
    """One passenger's shared-ride terms next to their private baseline."""

    private_time: float  # t_o, minutes door to door
    private_cost: float  # c_o, dollars
    shared_time: float  # t_P, minutes door to door
    shared_cost: float  # c_P, dollars
    n_additional: int  # co-passengers, 0..3
    seat: Seat

    def __post_init__(self):
        if min(self.private_time, self.private_cost, self.shared_cost) < 0:
            raise ValueError("times and costs must be >= 0")
        if self.shared_time < self.private_time - 1e-9:
            raise ValueError("shared_time cannot beat the direct private time")
        if not 0 <= self.n_additional <= 3:
            raise ValueError("n_additional must be in 0..3")


def inconvenience(t: float, c: float, params: EconParams) -> float:
    """Linear time-money burden alpha*t + beta*c."""
    return params.alpha * t + params.beta * c


def gain(t_o: float, c_o: float, t_P: float, c_P: float, params: EconParams) -> float:
    """Inconvenience saved by taking the shared ride over riding alone."""
    return inconvenience(t_o, c_o, params) - inconvenience(t_P, c_P, params)


def encode_features(profile: PassengerProfile, offer: RideOffer) -> np.ndarray:
    """12-entry feature vector for the satisfaction network.

    Layout: [t_o/60, c_o/60, t_P/60, c_P/60, n_additional/3, seat one-hot
    (front, right_back, left_back, middle_back), age/100, gender (female 0,
    male 1), employed (0/1)].
    """
    x = np.zeros(N_FEATURES)
    x[0] = offer.private_time / 60.0
    x[1] = offer.private_cost / 60.0
    x[2] = offer.shared_time / 60.0
    x[3] = offer.shared_cost / 60.0
    x[4] = offer.n_additional / 3.0
    x[5 + SEAT_INDEX[offer.seat]] = 1.0
    x[9] = profile.age / 100.0
    x[10] = 1.0 if profile.gender is Gender.MALE else 0.0
    x[11] = 1.0 if profile.employed else 0.0
    return x


@dataclass
class RideBatch:
    """Struct-of-arrays form of rides, the unit every objective scores.

    All fields are 1-d arrays of one length. seat holds indexes into
    SEAT_PRIORITY, gender holds 0 for female and 1 for male.
    """

    t_o: np.ndarray
    c_o: np.ndarray
    t_P: np.ndarray
    c_P: np.ndarray
    n_additional: np.ndarray
    seat: np.ndarray
    age: np.ndarray
    gender: np.ndarray
    employed: np.ndarray

    def __len__(self) -> int:
        return len(self.t_o)

    @staticmethod
    def single(profile: PassengerProfile, offer: RideOffer) -> "RideBatch":
        return RideBatch(
            t_o=np.array([offer.private_time], dtype=float),
            c_o=np.array([offer.private_cost], dtype=float),
            t_P=np.array([offer.shared_time], dtype=float),
            c_P=np.array([offer.shared_cost], dtype=float),
            n_additional=np.array([offer.n_additional], dtype=float),
            seat=np.array([SEAT_INDEX[offer.seat]], dtype=np.int64),
            age=np.array([profile.age], dtype=float),
            gender=np.array([1.0 if profile.gender is Gender.MALE else 0.0]),
            employed=np.array([1.0 if profile.employed else 0.0]),
        )

    def features(self) -> np.ndarray:
        """Feature matrix with one encode_features row per ride."""
        n = len(self)
        x = np.zeros((n, N_FEATURES))
        x[:, 0] = self.t_o / 60.0
        x[:, 1] = self.c_o / 60.0
        x[:, 2] = self.t_P / 60.0
        x[:, 3] = self.c_P / 60.0
        x[:, 4] = self.n_additional / 3.0
        x[np.arange(n), 5 + self.seat] = 1.0
        x[:, 9] = self.age / 100.0
        x[:, 10] = self.gender
        x[:, 11] = self.employed
        return x


class SatisfactionModel:
    """Interface: score rides, one value per passenger, higher is better."""

    name = "abstract"

    def score_rides(self, batch: RideBatch) -> np.ndarray:
        raise NotImplementedError

    def score(self, profile: PassengerProfile, offer: RideOffer) -> float:
        return float(self.score_rides(RideBatch.single(profile, offer))[0])

    def score_features_f32(self, X32: np.ndarray) -> np.ndarray:
        """Bulk single-precision scoring of encoded feature rows.

        Only needed by the large-instance sweep engine; models without it
        are limited to the table-driven solvers.
        """
        raise NotImplementedError(
            f"{type(self).__name__} does not support the bulk sweep engine"
        )


PROXY_KINDS = ("cost_only", "time_only", "gain_proxy")


def proxy_objective_score(
    kind: str, t_o, c_o, t_P, c_P, params: EconParams
):
    """Simplified per-passenger objectives for the exact solver.

    cost_only: money saved, c_o - c_P. time_only: time saved, t_o - t_P,
    never positive since sharing cannot beat the direct route. gain_proxy:
    the gain formula itself standing in for satisfaction.
    """
    if kind == "cost_only":
        return c_o - c_P
    if kind == "time_only":
        return t_o - t_P
    if kind == "gain_proxy":
        return (params.alpha * t_o + params.beta * c_o) - (
            params.alpha * t_P + params.beta * c_P
        )
    raise ValueError(f"unknown proxy kind {kind!r}; expected one of {PROXY_KINDS}")


class ProxyObjective(SatisfactionModel):
    """Wraps one proxy kind as a scoring model.

    A solo ride has t_P = t_o and c_P = c_o, so every proxy scores it 0
    without special handling.
    """

    def __init__(self, kind: str, params: EconParams):
        if kind not in PROXY_KINDS:
            raise ValueError(f"unknown proxy kind {kind!r}; expected one of {PROXY_KINDS}")
        self.kind = kind
        self.params = params
        self.name = kind

    def score_rides(self, batch: RideBatch) -> np.ndarray:
        return np.asarray(
            proxy_objective_score(
                self.kind, batch.t_o, batch.c_o, batch.t_P, batch.c_P, self.params
            ),
            dtype=float,
        )

    def score_features_f32(self, X32: np.ndarray) -> np.ndarray:
        sixty = np.float32(60.0)
        return np.asarray(
            proxy_objective_score(
                self.kind,
                X32[:, 0] * sixty,
                X32[:, 1] * sixty,
                X32[:, 2] * sixty,
                X32[:, 3] * sixty,
                self.params,
            ),
            dtype=np.float32,
        )
