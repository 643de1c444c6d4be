import math

import pytest

from lastmile.graphs import RoadGraph, build_travel_time_matrix, generate_random_graph
from lastmile.satisfaction import (
    EconParams,
    Gender,
    PassengerProfile,
    ProxyObjective,
    SEAT_PRIORITY,
    gain,
)
from lastmile.vehicles import (
    Vehicle,
    assemble_assignment,
    build_routed_vehicle,
    format_assignment,
    nn_drop_off_order,
    score_routed_vehicle,
    vehicle_satisfaction,
)


def path_graph():
    # a 5-minute hop to node 1, then 6 more to node 2
    return RoadGraph(
        nodes=((0, 0.0, 0.0), (1, 5.0, 0.0), (2, 11.0, 0.0)),
        edges=((0, 1, 5.0), (1, 2, 6.0)),
        origin=0,
    )


def fork_graph():
    # nodes 1 and 2 tie at 5 minutes from the origin
    return RoadGraph(
        nodes=((0, 0.0, 0.0), (1, 5.0, 0.0), (2, -5.0, 0.0)),
        edges=((0, 1, 5.0), (0, 2, 5.0)),
        origin=0,
    )


def profiles_for(pids):
    return {
        pid: PassengerProfile(age=25 + pid, gender=Gender.FEMALE, employed=True)
        for pid in pids
    }


class TestDropOffOrder:
    def test_single_stop(self):
        m = build_travel_time_matrix(path_graph(), (0, 1))
        assert nn_drop_off_order(m, 0, ((4, 1),)) == ((4, 1),)

    def test_nearest_first_then_onward(self):
        m = build_travel_time_matrix(path_graph(), (0, 1, 2))
        order = nn_drop_off_order(m, 0, ((7, 2), (3, 1)))
        assert order == ((3, 1), (7, 2))

    def test_listing_order_never_matters(self, rng):
        g = generate_random_graph(25, seed=6)
        m = build_travel_time_matrix(g, g.node_ids)
        dests = [int(d) for d in rng.choice(g.node_ids[1:], size=4, replace=False)]
        stops = tuple(enumerate(dests))
        base = nn_drop_off_order(m, g.origin, stops)
        for _ in range(10):
            shuffled = tuple(stops[i] for i in rng.permutation(4))
            assert nn_drop_off_order(m, g.origin, shuffled) == base

    def test_distance_tie_goes_to_lowest_pid(self):
        m = build_travel_time_matrix(fork_graph(), (0, 1, 2))
        order = nn_drop_off_order(m, 0, ((3, 1), (1, 2)))
        assert order[0] == (1, 2)

    def test_empty_stops_rejected(self):
        m = build_travel_time_matrix(path_graph(), (0, 1))
        with pytest.raises(ValueError):
            nn_drop_off_order(m, 0, ())

    def test_unknown_destination_rejected(self):
        m = build_travel_time_matrix(path_graph(), (0, 1))
        with pytest.raises(ValueError, match="not a terminal"):
            nn_drop_off_order(m, 0, ((0, 9),))


class TestRoutedVehicle:
    def test_chain_arrivals_and_cost(self, params):
        m = build_travel_time_matrix(path_graph(), (0, 1, 2))
        v = build_routed_vehicle(m, 0, ((0, 1), (1, 2)), params)
        assert v.drop_pids == (0, 1)
        assert v.arrival_drive == (5.0, 11.0)
        assert v.route_time == 11.0
        assert v.total_cost == 11.0  # M = 1

    def test_operating_cost_scales_with_m(self):
        m = build_travel_time_matrix(path_graph(), (0, 1, 2))
        v = build_routed_vehicle(m, 0, ((0, 1), (1, 2)), EconParams(M=2.5))
        assert v.total_cost == pytest.approx(27.5)

    def test_capacity_bounds(self):
        with pytest.raises(ValueError):
            Vehicle(drop_pids=(), drop_dests=(), arrival_drive=(), route_time=0.0,
                    total_cost=0.0)
        with pytest.raises(ValueError):
            Vehicle(drop_pids=(0, 1, 2, 3, 4), drop_dests=(1,) * 5,
                    arrival_drive=(1.0,) * 5, route_time=1.0, total_cost=1.0)

    def test_outcome_quantities(self, params):
        m = build_travel_time_matrix(path_graph(), (0, 1, 2))
        _, vehicle, outcomes = score_routed_vehicle(
            m, 0, ((0, 1), (1, 2)), ProxyObjective("gain_proxy", params),
            params, profiles_for((0, 1)),
        )
        first, second = outcomes
        # door-to-door time = wait constant + drive to own drop-off
        assert first.t_P == 10.0 and second.t_P == 16.0
        assert first.t_o == 10.0 and second.t_o == 16.0
        assert (first.seat, second.seat) == SEAT_PRIORITY[:2]
        assert first.n_additional == 1 and second.n_additional == 1
        assert first.d_P == 5.0 and second.d_P == 11.0
        assert first.d_o == 5.0 and second.d_o == 11.0
        # equal-gain split of the $11 route: a = (5, 11), g = 2.5
        assert first.c_P == pytest.approx(2.5, abs=1e-12)
        assert second.c_P == pytest.approx(8.5, abs=1e-12)
        assert vehicle.total_cost == 11.0

    def test_same_destination_pair_gain(self, params):
        g = RoadGraph(nodes=((0, 0.0, 0.0), (1, 10.0, 0.0)),
                      edges=((0, 1, 10.0),), origin=0)
        m = build_travel_time_matrix(g, (0, 1))
        total = vehicle_satisfaction(
            m, 0, ((0, 1), (1, 1)), ProxyObjective("gain_proxy", params),
            params, profiles_for((0, 1)),
        )
        # both ride 10 minutes for $5 instead of $10: two gains of 5
        assert total == pytest.approx(10.0, abs=1e-12)


class TestVehicleSatisfaction:
    def test_solo_full_model_is_exactly_four(self, full_model, params):
        m = build_travel_time_matrix(path_graph(), (0, 1, 2))
        score = vehicle_satisfaction(m, 0, ((0, 2),), full_model, params,
                                     profiles_for((0,)))
        assert score == 4.0

    def test_score_invariant_to_listing_order(self, full_model, params, rng):
        g = generate_random_graph(25, seed=9)
        m = build_travel_time_matrix(g, g.node_ids)
        dests = [int(d) for d in rng.choice(g.node_ids[1:], size=4, replace=False)]
        stops = tuple(enumerate(dests))
        prof = profiles_for(range(4))
        base = vehicle_satisfaction(m, g.origin, stops, full_model, params, prof)
        for _ in range(5):
            shuffled = tuple(stops[i] for i in rng.permutation(4))
            assert vehicle_satisfaction(
                m, g.origin, shuffled, full_model, params, prof
            ) == base

    def test_payment_axioms_on_routed_vehicles(self, params, rng):
        # cost recovery and equal gains must survive the full routing path
        model = ProxyObjective("gain_proxy", params)
        for seed in range(5):
            g = generate_random_graph(30, seed=seed)
            m = build_travel_time_matrix(g, g.node_ids)
            k = int(rng.integers(2, 5))
            dests = [int(d) for d in rng.choice(g.node_ids[1:], size=k, replace=False)]
            ordered = nn_drop_off_order(m, g.origin, tuple(enumerate(dests)))
            _, vehicle, outcomes = score_routed_vehicle(
                m, g.origin, ordered, model, params, profiles_for(range(k)))
            assert math.fsum(o.c_P for o in outcomes) == pytest.approx(
                vehicle.total_cost, abs=1e-9)
            gains = [gain(o.t_o, o.c_o, o.t_P, o.c_P, params) for o in outcomes]
            assert max(gains) - min(gains) <= 1e-9


class TestAssembleAndFormat:
    def build_two_rider_assignment(self, params):
        from lastmile.vehicles import PassengerRequest

        m = build_travel_time_matrix(path_graph(), (0, 1, 2))
        prof = profiles_for((0, 1))
        requests = [PassengerRequest(pid, dest, prof[pid])
                    for pid, dest in ((0, 1), (1, 2))]
        _, vehicle, outcomes = score_routed_vehicle(
            m, 0, ((0, 1), (1, 2)), ProxyObjective("gain_proxy", params),
            params, prof)
        return requests, vehicle, outcomes

    def test_assemble_round_trip(self, params):
        requests, vehicle, outcomes = self.build_two_rider_assignment(params)
        a = assemble_assignment(requests, [(vehicle, outcomes)], params)
        assert a.n_passengers() == 2
        assert a.total_cost() == 11.0
        assert a.outcomes[1].c_P == pytest.approx(8.5)

    def test_duplicate_passenger_rejected(self, params):
        requests, vehicle, outcomes = self.build_two_rider_assignment(params)
        with pytest.raises(ValueError, match="two vehicles"):
            assemble_assignment(
                requests, [(vehicle, outcomes), (vehicle, outcomes)], params)

    def test_missing_passenger_rejected(self, params):
        requests, vehicle, outcomes = self.build_two_rider_assignment(params)
        with pytest.raises(ValueError, match="unassigned"):
            assemble_assignment(requests, [(vehicle, outcomes[:1])], params)

    def test_format_text(self, params):
        requests, vehicle, outcomes = self.build_two_rider_assignment(params)
        a = assemble_assignment(requests, [(vehicle, outcomes)], params)
        assert format_assignment(a, 4.2345) == (
            "cab 0: 0@10.00:2.50 1@16.00:8.50\n"
            "avg_sat 4.2345\n"
        )
