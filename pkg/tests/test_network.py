import numpy as np
import pytest

from dfosim import (
    DfoError,
    MixingSchedule,
    load_schedule,
    matching_cycle_schedule,
    mixing_bound,
    mixing_params,
    ring_schedule,
    save_schedule,
    transition,
    validate_assumption1,
)

# The two perfect matchings of the 4-cycle with half weights, written out by
# hand; used as an independent oracle for the generated schedule.
MATCH_A = np.array(
    [[0.5, 0.5, 0.0, 0.0], [0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5], [0.0, 0.0, 0.5, 0.5]]
)
MATCH_B = np.array(
    [[0.5, 0.0, 0.0, 0.5], [0.0, 0.5, 0.5, 0.0], [0.0, 0.5, 0.5, 0.0], [0.5, 0.0, 0.0, 0.5]]
)


def test_ring_two_agents():
    P = ring_schedule(2).matrix(1)
    np.testing.assert_array_equal(P, np.full((2, 2), 0.5))


def test_ring_three_agents_complete():
    P = ring_schedule(3).matrix(1)
    np.testing.assert_allclose(P, np.full((3, 3), 1 / 3), atol=1e-15)


def test_ring_four_agents_rows():
    P = ring_schedule(4).matrix(1)
    np.testing.assert_allclose(P[0], [1 / 3, 1 / 3, 0.0, 1 / 3], atol=1e-15)
    np.testing.assert_allclose(P[2], [0.0, 1 / 3, 1 / 3, 1 / 3], atol=1e-15)


def test_ring_too_few():
    with pytest.raises(DfoError, match="too-few-agents"):
        ring_schedule(1)


def test_ring_validates():
    report = validate_assumption1(ring_schedule(5), horizon=10)
    assert report.passed


def test_scaled_row_fails_validation():
    P = ring_schedule(5).matrix(1).copy()
    P[2] *= 0.9
    bad = MixingSchedule([P], B=1, zeta=1 / 3)
    report = validate_assumption1(bad, horizon=3)
    assert not report.passed
    assert any("row-sum" in msg for msg in report.issues)


def test_matching_cycle_matches_hand_matrices():
    sched = matching_cycle_schedule(4)
    np.testing.assert_array_equal(sched.matrix(1), MATCH_A)
    np.testing.assert_array_equal(sched.matrix(2), MATCH_B)
    assert sched.B == 2 and sched.zeta == 0.5


def test_matching_cycle_window_two_passes_window_one_fails():
    sched = matching_cycle_schedule(4)
    assert validate_assumption1(sched, horizon=8).passed
    tight = MixingSchedule(list(sched.matrices), B=1, zeta=0.5)
    report = validate_assumption1(tight, horizon=8)
    assert not report.passed
    assert any("strongly connected" in msg for msg in report.issues)


def test_matching_cycle_odd_m():
    with pytest.raises(DfoError, match="need-even-agents"):
        matching_cycle_schedule(5)


def test_transition_single_factor():
    sched = ring_schedule(4)
    np.testing.assert_array_equal(transition(sched, 3, 3), sched.matrix(3))


def test_transition_all_third_idempotent():
    sched = ring_schedule(3)
    Q = transition(sched, 7, 2)
    np.testing.assert_allclose(Q, np.full((3, 3), 1 / 3), atol=1e-14)


def test_transition_matching_product_hand_computed():
    # P_2 P_1 of the alternating matchings averages everything in two steps.
    sched = matching_cycle_schedule(4)
    np.testing.assert_allclose(transition(sched, 2, 1), MATCH_B @ MATCH_A, atol=0)
    np.testing.assert_allclose(transition(sched, 2, 1), np.full((4, 4), 0.25), atol=1e-15)


def test_transition_bad_window():
    with pytest.raises(DfoError, match="bad-window"):
        transition(ring_schedule(3), 2, 5)


def test_mixing_bound_at_zero_gap_is_omega():
    m, zeta, B = 3, 1 / 3, 1
    base = 1 - zeta / (4 * m * m)
    np.testing.assert_allclose(mixing_bound(m, zeta, B, 0), base**-2, rtol=1e-15)
    np.testing.assert_allclose(mixing_bound(3, 1 / 3, 1, 0), (108 / 107) ** 2, rtol=1e-12)


def test_mixing_bound_decay_example():
    expected = (108 / 107) ** 2 * (107 / 108) ** 108
    np.testing.assert_allclose(mixing_bound(3, 1 / 3, 1, 108), expected, rtol=1e-12)
    params = mixing_params(3, 1 / 3, 1)
    assert 0 < params.gamma < 1 and params.omega >= 1


def _max_bound_violation(sched, horizon):
    worst = -np.inf
    m = sched.m
    for s in range(1, horizon + 1):
        Q = sched.matrix(s).copy()
        for t in range(s, horizon + 1):
            if t > s:
                Q = sched.matrix(t) @ Q
            assert np.max(np.abs(Q.sum(axis=0) - 1)) <= 1e-10
            assert np.max(np.abs(Q.sum(axis=1) - 1)) <= 1e-10
            dev = np.max(np.abs(Q - 1.0 / m))
            worst = max(worst, dev - mixing_bound(m, sched.zeta, sched.B, t - s))
    return worst


def test_geometric_bound_rings():
    for m in range(2, 8):
        assert _max_bound_violation(ring_schedule(m), horizon=60) <= 0


def test_geometric_bound_matching_cycle():
    assert _max_bound_violation(matching_cycle_schedule(4), horizon=60) <= 0


def test_static_deviation_monotone():
    sched = ring_schedule(6)
    devs = []
    Q = sched.matrix(1).copy()
    for t in range(2, 40):
        Q = sched.matrix(t) @ Q
        devs.append(np.max(np.abs(Q - 1 / 6)))
    assert all(b <= a + 1e-15 for a, b in zip(devs, devs[1:]))


def test_save_load_roundtrip(tmp_path):
    sched = matching_cycle_schedule(4)
    path = tmp_path / "sched.txt"
    save_schedule(sched, path, horizon=4)
    loaded = load_schedule(path)
    assert loaded.m == 4
    assert loaded.B == 2
    np.testing.assert_allclose(loaded.zeta, 0.5)
    for t in range(1, 5):
        np.testing.assert_array_equal(loaded.matrix(t), sched.matrix(t))


def test_load_rejects_disconnected(tmp_path):
    # two isolated pairs, never connected
    path = tmp_path / "bad.txt"
    save_schedule(MixingSchedule([MATCH_A], B=1, zeta=0.5), path, horizon=2)
    with pytest.raises(DfoError, match="not-connected"):
        load_schedule(path)


def test_load_rejects_malformed(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text("4 2\n0.5 0.5\n")
    with pytest.raises(DfoError, match="bad-schedule"):
        load_schedule(path)
