import cmath
import math
import random

import numpy as np
import pytest

import helpers
import surroundsim as ss
from surroundsim.dynamics import build_laplacian
from surroundsim.errors import (
    ConnectivityError,
    ConsistencyError,
    GraphError,
    MalformedCycleError,
    PreconditionError,
    ScaleLimitError,
    ScheduleError,
)
from surroundsim.topology import (
    ConfigurationGraph,
    Consistency,
    Segment,
    SwitchingSchedule,
    classify_consistency,
    cycle_holonomy,
    elementary_circuits,
    gauge_potentials,
    is_strongly_connected,
    union_graph,
    verify_ujsc,
)

W = lambda frac: cmath.exp(1j * math.pi * frac)


def ring5_consistent():
    return ConfigurationGraph(
        5,
        [
            (0, 1, W(0.5)),
            (1, 2, W(0.5)),
            (2, 3, W(0.5)),
            (3, 4, W(1 / 3)),
            (4, 0, W(1 / 6)),
        ],
    )


def ring5_inconsistent():
    return ConfigurationGraph(
        5,
        [
            (0, 1, W(0.5)),
            (1, 2, W(0.5)),
            (2, 3, W(0.5)),
            (3, 4, W(1 / 3)),
            (4, 0, W(1 / 3)),
            (0, 3, W(-0.5)),
        ],
    )


class TestGraphConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            ConfigurationGraph(2, [(0, 0, 1.0)])

    def test_rejects_duplicate_arc(self):
        with pytest.raises(GraphError):
            ConfigurationGraph(2, [(0, 1, 1.0), (0, 1, 1j)])

    def test_rejects_non_unit_weight_in_default_mode(self):
        with pytest.raises(GraphError):
            ConfigurationGraph(2, [(0, 1, 2.0)])

    def test_scaled_mode_allows_any_positive_modulus(self):
        g = ConfigurationGraph(2, [(0, 1, 2.0), (1, 0, 0.5)], unit_weights=False)
        assert g.weight(0, 1) == 2.0

    def test_rejects_zero_weight(self):
        with pytest.raises(GraphError):
            ConfigurationGraph(2, [(0, 1, 0.0)], unit_weights=False)


class TestCycleHolonomy:
    def test_consistent_ring(self):
        g = ring5_consistent()
        steps = [(0, 1, True), (1, 2, True), (2, 3, True), (3, 4, True), (4, 0, True)]
        assert abs(cycle_holonomy(g, steps) - 1.0) < 1e-12

    def test_inconsistent_triangle(self):
        g = ring5_inconsistent()
        steps = [(0, 3, True), (3, 4, True), (4, 0, True)]
        h = cycle_holonomy(g, steps)
        assert abs(h - W(1 / 6)) < 1e-12
        assert abs(h - 1.0) > 0.2

    def test_arc_forward_then_backward(self):
        g = ConfigurationGraph(2, [(0, 1, W(0.25))])
        assert cycle_holonomy(g, [(0, 1, True), (0, 1, False)]) == 1.0

    def test_missing_arc(self):
        g = ring5_consistent()
        with pytest.raises(MalformedCycleError):
            cycle_holonomy(g, [(0, 2, True), (2, 0, True)])

    def test_broken_chain(self):
        g = ring5_consistent()
        with pytest.raises(MalformedCycleError):
            cycle_holonomy(g, [(0, 1, True), (2, 3, True)])

    def test_open_sequence(self):
        g = ring5_consistent()
        with pytest.raises(MalformedCycleError):
            cycle_holonomy(g, [(0, 1, True), (1, 2, True)])

    def test_empty_sequence(self):
        with pytest.raises(MalformedCycleError):
            cycle_holonomy(ring5_consistent(), [])


class TestClassifyConsistency:
    def test_all_unit_weights(self):
        g = ConfigurationGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 3, 1.0)])
        assert classify_consistency(g) is Consistency.WEAKLY_CONSISTENT

    def test_consistent_ring(self):
        assert classify_consistency(ring5_consistent()) is Consistency.WEAKLY_CONSISTENT

    def test_inconsistent_ring_with_chord(self):
        assert classify_consistency(ring5_inconsistent()) is Consistency.DIRECTED_INCONSISTENT

    def test_directed_consistent_only(self):
        g = helpers.directed_consistent_only_example()
        assert classify_consistency(g) is Consistency.DIRECTED_CONSISTENT_ONLY

    def test_agrees_with_brute_force_inventory(self):
        rng = random.Random(42)
        for _ in range(150):
            n = rng.randint(2, 6)
            if rng.random() < 0.4:
                g = helpers.random_weakly_consistent_graph(rng, n, extra=rng.randint(0, 3))
            else:
                keys = set()
                target = rng.randint(1, min(10, n * (n - 1)))
                while len(keys) < target:
                    i, j = rng.randrange(n), rng.randrange(n)
                    if i != j:
                        keys.add((i, j))
                arcs = [(i, j, W(rng.randrange(-11, 12) / 12)) for i, j in keys]
                g = ConfigurationGraph(n, arcs)
            assert classify_consistency(g) is helpers.classify_by_inventory(g)

    def test_strongly_connected_never_directed_consistent_only(self):
        rng = random.Random(7)
        for _ in range(30):
            g = helpers.random_strongly_connected_graph(rng, rng.randint(2, 6), rng.random() < 0.3)
            assert classify_consistency(g) is not Consistency.DIRECTED_CONSISTENT_ONLY


class TestGaugePotentials:
    def test_identity_gauge_for_unit_weights(self):
        g = ConfigurationGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        gauge = gauge_potentials(g)
        assert np.allclose(gauge.p, np.ones(3))

    def test_consistent_ring_matches_hand_propagation(self):
        gauge = gauge_potentials(ring5_consistent())
        expected = [1.0, W(0.5), W(1.0), W(1.5), W(11 / 6)]
        assert np.abs(gauge.p - np.array(expected)).max() < 1e-12

    def test_two_node_pair(self):
        g = ConfigurationGraph(2, [(0, 1, 1j), (1, 0, -1j)])
        gauge = gauge_potentials(g)
        assert np.allclose(gauge.p, [1.0, 1j])

    def test_closure_on_every_arc(self):
        rng = random.Random(3)
        for _ in range(40):
            g = helpers.random_weakly_consistent_graph(rng, rng.randint(2, 6), extra=3)
            gauge = gauge_potentials(g)
            assert gauge.p[0] == 1.0
            for a in g.arcs:
                assert abs(gauge.p[a.i] * a.w - gauge.p[a.j]) < 1e-9

    def test_inconsistent_graph_rejected(self):
        with pytest.raises(ConsistencyError):
            gauge_potentials(ring5_inconsistent())

    def test_disconnected_graph_rejected(self):
        g = ConfigurationGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        with pytest.raises(ConnectivityError):
            gauge_potentials(g)

    def test_gauge_similarity_gives_real_laplacian(self):
        rng = random.Random(17)
        for _ in range(25):
            g = helpers.random_weakly_consistent_graph(rng, rng.randint(2, 6), extra=2)
            gauge = gauge_potentials(g)
            P = np.diag(gauge.p)
            keys = list(g.arc_keys())
            active = frozenset(k for k in keys if rng.random() < 0.7)
            L = build_laplacian(g, active)
            real_l = P @ L @ np.linalg.inv(P)
            for i in range(g.n):
                for j in range(g.n):
                    if i == j:
                        continue
                    want = -1.0 if (i, j) in active else 0.0
                    assert abs(real_l[i, j] - want) < 1e-9

    def test_tree_independence(self):
        rng = random.Random(23)
        for _ in range(20):
            g = helpers.random_weakly_consistent_graph(rng, rng.randint(3, 6), extra=3)
            gauge_a = gauge_potentials(g)
            reordered = ConfigurationGraph(g.n, tuple(reversed(g.arcs)), g.unit_weights)
            gauge_b = gauge_potentials(reordered)
            assert gauge_a.tree_arcs != gauge_b.tree_arcs or len(g.arcs) == g.n - 1
            assert np.abs(gauge_a.p - gauge_b.p).max() < 1e-12

    def test_scaled_mode_gauge(self):
        rng = random.Random(31)
        for _ in range(15):
            g = helpers.random_weakly_consistent_graph(rng, rng.randint(2, 5), extra=2, scaled=True)
            assert classify_consistency(g) is Consistency.WEAKLY_CONSISTENT
            gauge = gauge_potentials(g)
            for a in g.arcs:
                assert abs(gauge.p[a.i] * a.w - gauge.p[a.j]) < 1e-9 * abs(gauge.p[a.j])


class TestStrongConnectivity:
    def test_directed_ring(self):
        for n in (2, 3, 6):
            keys = [(k, (k + 1) % n) for k in range(n)]
            assert is_strongly_connected(keys, n)

    def test_single_arc(self):
        assert not is_strongly_connected([(0, 1)], 2)

    def test_single_node(self):
        assert is_strongly_connected([], 1)

    def test_ring_with_chord(self):
        keys = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 3)]
        assert is_strongly_connected(keys, 5)

    def test_matches_reachability_oracle(self):
        rng = random.Random(13)
        for _ in range(120):
            n = rng.randint(1, 6)
            keys = set()
            for _ in range(rng.randint(0, 10)):
                i, j = rng.randrange(n), rng.randrange(n)
                if i != j:
                    keys.add((i, j))
            assert is_strongly_connected(keys, n) == helpers.strongly_connected_oracle(keys, n)


class TestSchedules:
    def fig1_schedule(self):
        return SwitchingSchedule(
            (
                Segment(5.0, frozenset({(0, 1), (2, 3), (4, 0)})),
                Segment(5.0, frozenset({(1, 2), (3, 4)})),
            ),
            repeat=True,
            dwell_floor=5.0,
        )

    def test_dwell_floor_enforced(self):
        with pytest.raises(ScheduleError):
            SwitchingSchedule((Segment(1.0, frozenset()),), repeat=True, dwell_floor=2.0)

    def test_unknown_arc_rejected(self):
        g = ConfigurationGraph(2, [(0, 1, 1.0)])
        sched = SwitchingSchedule((Segment(1.0, frozenset({(1, 0)})),), True, 1.0)
        with pytest.raises(ScheduleError):
            sched.validate_arcs(g)

    def test_active_set_is_right_continuous(self):
        sched = SwitchingSchedule(
            (Segment(1.0, frozenset({(0, 1)})), Segment(1.0, frozenset({(1, 0)}))),
            repeat=True,
            dwell_floor=1.0,
        )
        assert sched.active_at(0.0) == frozenset({(0, 1)})
        assert sched.active_at(1.0) == frozenset({(1, 0)})
        assert sched.active_at(2.0) == frozenset({(0, 1)})

    def test_union_single_segment(self):
        sched = SwitchingSchedule((Segment(4.0, frozenset({(0, 1)})),), True, 4.0)
        assert union_graph(sched, 1.0, 2.5) == frozenset({(0, 1)})

    def test_union_full_period_is_whole_ring(self):
        ring = {(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)}
        assert union_graph(self.fig1_schedule(), 0.0, 10.0) == frozenset(ring)

    def test_union_straddling_repeat_boundary_matches_shifted_window(self):
        sched = self.fig1_schedule()
        assert union_graph(sched, 7.0, 12.0) == union_graph(sched, 17.0, 22.0)

    def test_union_rejects_bad_range(self):
        with pytest.raises(PreconditionError):
            union_graph(self.fig1_schedule(), 3.0, 3.0)

    def test_ujsc_fig1_window_10(self):
        assert verify_ujsc(self.fig1_schedule(), 10.0, 5)

    def test_ujsc_fails_for_empty_activity(self):
        sched = SwitchingSchedule((Segment(1.0, frozenset()),), True, 1.0)
        assert not verify_ujsc(sched, 5.0, 2)

    def test_ujsc_fixed_strongly_connected_any_window(self):
        ring = frozenset({(0, 1), (1, 2), (2, 0)})
        sched = SwitchingSchedule((Segment(1.0, ring),), True, 1.0)
        for window in (0.1, 1.0, 17.3):
            assert verify_ujsc(sched, window, 3)

    def test_ujsc_rejects_bad_window(self):
        with pytest.raises(PreconditionError):
            verify_ujsc(self.fig1_schedule(), 0.0, 5)

    def test_ujsc_short_window_fails_for_alternation(self):
        assert not verify_ujsc(self.fig1_schedule(), 5.0, 5)


class TestElementaryCircuits:
    def test_complete_digraph_k4(self):
        keys = [(i, j) for i in range(4) for j in range(4) if i != j]
        circuits = elementary_circuits(4, keys)
        assert len(circuits) == 20  # 6 two-cycles + 8 triangles + 6 four-cycles

    def test_node_cap(self):
        with pytest.raises(ScaleLimitError):
            elementary_circuits(13, [])

    def test_acyclic(self):
        assert elementary_circuits(4, [(0, 1), (0, 2), (1, 3), (2, 3)]) == []
