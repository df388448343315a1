import math
import random

import pytest
from hypothesis import given, strategies as st

from biaslab.arith import summatory
from biaslab.errors import InvalidArgument
from biaslab.euler import constants_report
from biaslab.race import (
    RaceConfig,
    RacePoint,
    SignChangeReport,
    detect_sign_changes,
    error_term,
    oscillation_stats,
    race_csv,
    run_race,
)


def pts(diffs):
    return [RacePoint(i + 1, 0.0, 0.0, float(d), float(d)) for i, d in enumerate(diffs)]


def brute_changes(diffs):
    signs = [d for d in ((x > 0) - (x < 0) for x in diffs) if d]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def test_race_example(small_table):
    cfg = RaceConfig(3, 1, 2, 2, 10, sample_stride=1)
    last = run_race(cfg, small_table)[-1]
    assert last.s1 == pytest.approx(1 + 2**0.5 + 7 + 10, rel=1e-15)
    assert last.s2 == pytest.approx(2 + 5 + 2 ** (1 / 3), rel=1e-15)
    assert last.diff == pytest.approx(11.154292512478223, rel=1e-14)


def test_race_antisymmetric(small_table):
    a = run_race(RaceConfig(5, 1, 3, 2, 10**6), small_table)
    b = run_race(RaceConfig(5, 3, 1, 2, 10**6), small_table)
    assert all(x.diff == -y.diff and x.normalized == -y.normalized for x, y in zip(a, b))


def test_race_empty_prefix(small_table):
    points = run_race(RaceConfig(10, 7, 9, 2, 6, sample_stride=1), small_table)
    assert [p.diff for p in points] == [0.0] * 6


def test_race_matches_summatory(small_table):
    cfg = RaceConfig(4, 1, 3, 3, 10**6, sample_stride=77_777)
    for pt in run_race(cfg, small_table):
        assert pt.s1 == pytest.approx(summatory(pt.Q, 4, 1, 3, small_table).sum, rel=1e-12)
        assert pt.s2 == pytest.approx(summatory(pt.Q, 4, 3, 3, small_table).sum, rel=1e-12)


def test_config_defaults_and_errors():
    cfg = RaceConfig(5, 0, 1, 2, 10**7)
    assert cfg.sample_stride == 10**4
    assert cfg.normalization_exponent == 1.25
    assert cfg.sample_points()[-1] == 10**7
    with pytest.raises(InvalidArgument):
        RaceConfig(5, 1, 6, 2, 100)


def test_sign_change_examples():
    assert detect_sign_changes(pts([1, -1, 2])).count == 2
    assert detect_sign_changes(pts([1, 0, 1])).count == 0
    assert detect_sign_changes(pts([0, 0, -3])).count == 0
    with pytest.raises(InvalidArgument):
        detect_sign_changes([RacePoint(2, 0, 0, 1, 1), RacePoint(2, 0, 0, -1, -1)])


def test_sign_changes_random_sequences():
    rng = random.Random(12345)
    for _ in range(1000):
        diffs = [rng.choice((-1, 0, 1)) * rng.random() for _ in range(rng.randint(0, 60))]
        assert detect_sign_changes(pts(diffs)).count == brute_changes(diffs)


@given(st.lists(st.sampled_from([-2.0, -1.0, 0.0, 1.0, 3.0]), max_size=40))
def test_sign_changes_property(diffs):
    rep = detect_sign_changes(pts(diffs))
    assert rep.count == brute_changes(diffs) == len(rep.changes)


def test_oscillation_stats():
    assert oscillation_stats(SignChangeReport((), 0, 0.0, 0.0), 100.0) == 0
    rep = SignChangeReport(tuple(range(10)), 10, 0.0, 0.0)
    assert oscillation_stats(rep, math.e**10) == pytest.approx(1.0)


def test_error_term(small_table):
    c = constants_report(5, 2)
    assert error_term(0, 5, 1, 2, c, small_table) == 0.0
    Q = 10**6
    S = summatory(Q, 5, 1, 2, small_table).sum
    assert error_term(Q, 5, 1, 2, c, small_table) == pytest.approx(S - c.c_unit * Q * Q)
    with pytest.raises(InvalidArgument):
        error_term(Q, 3, 1, 2, c, small_table)


def test_csv_deterministic(small_table):
    cfg = RaceConfig(3, 1, 2, 2, 10**5)
    a = race_csv(cfg, run_race(cfg, small_table))
    b = race_csv(cfg, run_race(cfg, small_table))
    assert a == b
    lines = a.splitlines()
    assert lines[0].startswith("# ") and lines[1] == "Q,s1,s2,diff,normalized"
    assert len(lines) == 2 + 1000
