"""Equal-gain cost split for one vehicle.

The vehicle's operating cost must be covered exactly by its passengers,
and every passenger must end up with the same gain g. Writing a_u =
alpha*t_o(u) + beta*c_o(u) - alpha*t_P(u), the gain of passenger u paying
c_P(u) is a_u - beta*c_P(u); equating all gains and summing against the
cost constraint gives the closed form

    g = (sum_u a_u - beta * total_cost) / k
    c_P(u) = (a_u - g) / beta

Payments can go negative for pathological inputs (say, a passenger driven
far past their destination); they are returned as-is with a flag raised,
since clamping would break exact cost recovery.
"""

import math
from dataclasses import dataclass

import numpy as np

from .satisfaction import EconParams


@dataclass(frozen=True)
class VehicleBill:
    """Per-passenger ride quantities plus the vehicle's operating cost.

    t_o, c_o, t_P are parallel sequences, one entry per passenger;
    total_cost is M times the drive time from the origin to the last
    drop-off.
    """

    t_o: tuple
    c_o: tuple
    t_P: tuple
    total_cost: float

    def __post_init__(self):
        k = len(self.t_o)
        if not (len(self.c_o) == len(self.t_P) == k):
            raise ValueError("t_o, c_o, t_P must have equal length")
        if self.total_cost < 0:
            raise ValueError("total_cost must be >= 0")


@dataclass(frozen=True)
class PaymentResult:
    payments: tuple  # c_P per passenger, dollars, bill order
    gain: float  # the common gain g
    has_negative: bool


def compute_equal_gain_payments(bill: VehicleBill, params: EconParams) -> PaymentResult:
    """Split the vehicle cost so that every passenger's gain equals g."""
    k = len(bill.t_o)
    if k == 0:
        raise ValueError("bill has no passengers")
    alpha, beta = params.alpha, params.beta
    a = [
        math.fsum((alpha * t_o, beta * c_o, -alpha * t_P))
        for t_o, c_o, t_P in zip(bill.t_o, bill.c_o, bill.t_P)
    ]
    g = (math.fsum(a) - beta * bill.total_cost) / k
    payments = tuple((a_u - g) / beta for a_u in a)
    return PaymentResult(
        payments=payments,
        gain=g,
        has_negative=bool(np.any(np.asarray(payments) < 0)),
    )
