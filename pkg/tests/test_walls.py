import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cohsys.numerics import CSType, CurveContext, SubTriple, slope_margin
from cohsys.walls import (
    CANDIDATE,
    PRUNED,
    VIRTUAL,
    AlphaWindow,
    alpha_of_subtype,
    chamber_partition,
    enumerate_virtual_criticals,
    margin_sign_profile,
    prune_by_brill_noether,
    witnesses_at,
)
from oracles import walls_by_scan

F = Fraction
T = CSType(2, 13, 4)
W01 = AlphaWindow(F(0), F(1))
G6 = CurveContext(6)


def _walls(cvs):
    return {cv.value: [w.as_list() for w in cv.witnesses] for cv in cvs}


def test_alpha_of_subtype_examples():
    assert alpha_of_subtype(T, SubTriple(1, 6, 3)) == F(1, 2)
    assert alpha_of_subtype(T, SubTriple(1, 6, 4)) == F(1, 4)
    for dp in range(-5, 20):
        assert alpha_of_subtype(T, SubTriple(1, dp, 2)) is None


def test_enumerate_g6_window():
    walls = enumerate_virtual_criticals(T, W01)
    assert _walls(walls) == {
        F(1, 4): [[1, 7, 0], [1, 6, 4]],
        F(1, 2): [[1, 7, 1], [1, 6, 3]],
        F(3, 4): [[1, 8, 0], [1, 5, 4]],
    }
    assert all(w.status == VIRTUAL for w in walls)


def test_enumerate_matches_closed_form_value_set():
    # walls are (2d'-13)/(4-2k') for 0 <= k' <= 4, intersected with the window
    expected = set()
    for kp in range(5):
        if 4 - 2 * kp == 0:
            continue
        for dp in range(-40, 40):
            if kp >= 1 and dp <= 0:
                continue
            a = F(2 * dp - 13, 4 - 2 * kp)
            if 0 < a < 3:
                expected.add(a)
    got = {w.value for w in enumerate_virtual_criticals(T, AlphaWindow(0, 3))}
    assert got == expected


def test_empty_window_has_no_walls():
    assert enumerate_virtual_criticals(T, AlphaWindow(F(1, 4), F(2, 7))) == []


def test_unbounded_window_needs_bound_when_k_ge_n():
    with pytest.raises(ValueError):
        enumerate_virtual_criticals(T, AlphaWindow(F(0)))
    with pytest.raises(ValueError):
        AlphaWindow.default_for(T)


def test_default_window_k_lt_n():
    T3 = CSType(3, 10, 1)
    assert AlphaWindow.default_for(T3) == AlphaWindow(F(0), F(5))
    assert enumerate_virtual_criticals(T3) == enumerate_virtual_criticals(T3, AlphaWindow(0, 5))


def test_window_endpoints_are_excluded():
    walls = enumerate_virtual_criticals(T, AlphaWindow(F(1, 4), F(3, 4)))
    assert [w.value for w in walls] == [F(1, 2)]


def test_prune_g6():
    pruned = prune_by_brill_noether(G6, T, enumerate_virtual_criticals(T, W01))
    status = {w.value: w.status for w in pruned}
    assert status == {F(1, 4): PRUNED, F(1, 2): CANDIDATE, F(3, 4): PRUNED}
    quarter = pruned[0]
    reasons = dict((w.as_list().__repr__(), r) for w, r in quarter.pruned_witnesses)
    assert "beta=-6" in reasons["[1, 7, 0]"] and "quotient (1,6,4)" in reasons["[1, 7, 0]"]
    assert "beta=-6" in reasons["[1, 6, 4]"]
    three_q = pruned[2]
    assert all("beta=-10" in r for _, r in three_q.pruned_witnesses)
    assert [w.as_list() for w in pruned[1].witnesses] == [[1, 7, 1], [1, 6, 3]]


def test_prune_disabled_on_non_general_curve():
    walls = enumerate_virtual_criticals(T, W01)
    assert prune_by_brill_noether(CurveContext(6, False), T, walls) == walls


def test_chamber_partition():
    walls = enumerate_virtual_criticals(T, W01)
    part = chamber_partition(T, W01, walls)
    assert [(c.label, c.lo, c.hi) for c in part.chambers] == [
        ("G_0", 0, F(1, 4)), ("G_1", F(1, 4), F(1, 2)),
        ("G_2", F(1, 2), F(3, 4)), ("G_3", F(3, 4), 1)]
    part = chamber_partition(T, W01, prune_by_brill_noether(G6, T, walls))
    assert [(c.label, c.lo, c.hi) for c in part.chambers] == [
        ("G_0", 0, F(1, 2)), ("G_1", F(1, 2), 1)]
    part = chamber_partition(T, W01, [])
    assert [(c.lo, c.hi) for c in part.chambers] == [(0, 1)]


def test_chamber_partition_rejects_outside_wall():
    walls = enumerate_virtual_criticals(T, AlphaWindow(0, 2))
    with pytest.raises(ValueError):
        chamber_partition(T, W01, walls)


def test_margin_sign_profile_examples():
    assert margin_sign_profile(T, SubTriple(1, 6, 3), F(1, 2)) == (1, 0, -1)
    assert margin_sign_profile(T, SubTriple(1, 7, 1), F(1, 2)) == (-1, 0, 1)
    assert margin_sign_profile(CSType(4, 10, 6), SubTriple(2, 5, 3), None) == (0, 0, 0)
    with pytest.raises(ValueError):
        margin_sign_profile(T, SubTriple(1, 6, 3), F(1, 4))


def _sgn(x):
    return (x > 0) - (x < 0)


@settings(max_examples=300, derandomize=True)
@given(st.integers(2, 4), st.integers(-30, 30), st.integers(0, 6), st.data())
def test_sign_profile_matches_finite_difference(n, d, k, data):
    amb = CSType(n, d, k)
    m = data.draw(st.integers(1, n - 1))
    t = data.draw(st.integers(0, k))
    dp = data.draw(st.integers(-30, 30))
    sub = SubTriple(m, dp, t)
    wall = alpha_of_subtype(amb, sub)
    if wall is None or wall <= 0:
        return
    eps = min(F(1, 1000), wall / 2)
    expected = tuple(_sgn(slope_margin(amb, sub, a)) for a in (wall - eps, wall, wall + eps))
    assert margin_sign_profile(amb, sub, wall) == expected


def test_witnesses_at():
    assert witnesses_at(T, F(1, 2)).witnesses == (SubTriple(1, 7, 1), SubTriple(1, 6, 3))
    assert witnesses_at(T, F(1, 3)) is None


def _random_case(rng):
    n = rng.randint(2, 4)
    return CSType(n, rng.randint(-30, 30), rng.randint(0, 6))


def test_bruteforce_wall_equivalence():
    rng = random.Random(20260101)
    for _ in range(400):
        amb = _random_case(rng)
        win = AlphaWindow(0, 5)
        got = enumerate_virtual_criticals(amb, win)
        expected = walls_by_scan(amb.n, amb.d, amb.k, F(0), F(5))
        assert {cv.value: [tuple(w.as_list()) for w in cv.witnesses] for cv in got} == expected
        for cv in got:
            for w in cv.witnesses:
                assert alpha_of_subtype(amb, w) == cv.value


def test_bruteforce_audit_mode():
    rng = random.Random(7)
    for _ in range(100):
        amb = _random_case(rng)
        got = enumerate_virtual_criticals(amb, AlphaWindow(0, 3), positive_degree=False)
        expected = walls_by_scan(amb.n, amb.d, amb.k, F(0), F(3), positive_degree=False)
        assert {cv.value: [tuple(w.as_list()) for w in cv.witnesses] for cv in got} == expected


def test_parallel_enumeration_is_identical():
    rng = random.Random(3)
    for _ in range(30):
        amb = _random_case(rng)
        win = AlphaWindow(0, 5)
        assert (enumerate_virtual_criticals(amb, win, workers=4)
                == enumerate_virtual_criticals(amb, win))


def test_pruning_only_removes():
    rng = random.Random(11)
    for _ in range(200):
        amb = _random_case(rng)
        ctx = CurveContext(rng.randint(2, 8))
        walls = enumerate_virtual_criticals(amb, AlphaWindow(0, 5))
        pruned = prune_by_brill_noether(ctx, amb, walls)
        assert [w.value for w in pruned] == [w.value for w in walls]
        for before, after in zip(walls, pruned):
            kept = set(after.witnesses)
            gone = {w for w, _ in after.pruned_witnesses}
            assert kept | gone == set(before.witnesses) and not kept & gone
            assert (after.status == PRUNED) == (not kept)
        part = chamber_partition(amb, AlphaWindow(0, 5), pruned)
        assert len(part.chambers) == len([w for w in pruned if w.status != PRUNED]) + 1
