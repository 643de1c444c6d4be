"""Split a shared ride's cost so every rider gains the same amount."""

from lastmile import EconParams, VehicleBill, compute_equal_gain_payments, gain

params = EconParams()
print(f"alpha={params.alpha} beta={params.beta}")


def show(label, bill):
    result = compute_equal_gain_payments(bill, params)
    pays = ", ".join(f"{p:.2f}" for p in result.payments)
    print(f"{label}: payments [{pays}]  common gain {result.gain:.2f}"
          + ("  (negative payment!)" if result.has_negative else ""))
    # every rider realizes exactly the common gain
    for t_o, c_o, t_P, c_P in zip(bill.t_o, bill.c_o, bill.t_P, result.payments):
        assert abs(gain(t_o, c_o, t_P, c_P, params) - result.gain) < 1e-9
    assert abs(sum(result.payments) - bill.total_cost) < 1e-9
    return result


# two identical riders split the cab evenly
show("identical riders", VehicleBill(
    t_o=(10.0, 10.0), c_o=(10.0, 10.0), t_P=(10.0, 10.0), total_cost=10.0))

# the second rider sits through a detour and pays less for it
show("one detour     ", VehicleBill(
    t_o=(10.0, 10.0), c_o=(10.0, 10.0), t_P=(10.0, 14.0), total_cost=14.0))

# an absurd detour drives the payment below zero; the schedule reports it
# rather than clamping, so callers can reject the pooling
r = show("extreme detour ", VehicleBill(
    t_o=(10.0, 10.0), c_o=(10.0, 10.0), t_P=(10.0, 1000.0), total_cost=20.0))
assert r.has_negative and min(r.payments) < 0

# solo rider: no one to share with, pays the whole cost
show("solo           ", VehicleBill(
    t_o=(12.0,), c_o=(12.0,), t_P=(12.0,), total_cost=12.0))
