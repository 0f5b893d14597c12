import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublecircle.circle import (
    GOLDEN,
    CirclePoint,
    circle_dist,
    circle_embed,
    continued_fraction,
    gap_statistics,
    normalize,
    rationality_diagnostic,
    rotate,
    rotation_orbit,
    rotation_period,
    star_discrepancy,
)
from doublecircle.errors import DomainError

reals = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
unit = st.floats(0.0, 1.0, allow_nan=False, exclude_max=True)


# --- oracles ---------------------------------------------------------------

def euclid_expansion(x, n):
    """Plain float expansion x -> 1/x - floor(1/x)."""
    out = []
    for _ in range(n):
        inv = 1.0 / x
        a = math.floor(inv)
        out.append(a)
        x = inv - a
        if x == 0:
            break
    return out


def brute_gaps(points):
    s = sorted(points)
    return [b - a for a, b in zip(s, s[1:])] + [1.0 - s[-1] + s[0]]


def brute_discrepancy(points):
    """sup_t |#{x < t}/N - t| by counting at every candidate t."""
    x = np.asarray(points, dtype=float)
    n = len(x)
    best = 0.0
    for t in list(x) + [1.0]:
        below = np.count_nonzero(x < t) / n
        best = max(best, abs(below - t))
        # right limit just above t
        at_or_below = np.count_nonzero(x <= t) / n
        best = max(best, abs(at_or_below - t))
    return best


# --- normalize / rotate / dist / embed -------------------------------------

@pytest.mark.parametrize("x, rep", [(0.25, 0.25), (1.25, 0.25), (-0.1, 0.9)])
def test_normalize(x, rep):
    assert normalize(x).rep == pytest.approx(rep, abs=1e-15)


def test_normalize_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(DomainError):
            normalize(bad)


def test_normalize_clamps_rounding_to_one():
    p = normalize(-1e-20)
    assert p.rep == 0.0


def test_rotate_examples():
    assert rotate(CirclePoint(0.9), 0.2).rep == pytest.approx(0.1, abs=1e-15)
    assert rotate(CirclePoint(0.0), 0.0).rep == 0.0
    assert rotate(CirclePoint(0.3), 0.618033988) .rep == pytest.approx(0.918033988, abs=1e-15)


def test_dist_examples():
    assert circle_dist(CirclePoint(0.1), CirclePoint(0.9)) == pytest.approx(0.2, abs=1e-15)
    assert circle_dist(CirclePoint(0.37), CirclePoint(0.37)) == 0.0
    assert circle_dist(CirclePoint(0.0), CirclePoint(0.5)) == 0.5


@pytest.mark.parametrize("rep, xy", [(0.0, (1, 0)), (0.25, (0, 1)), (0.5, (-1, 0))])
def test_embed(rep, xy):
    assert circle_embed(CirclePoint(rep)) == pytest.approx(xy, abs=1e-15)


@given(reals)
def test_embed_unit_norm(x):
    c, s = circle_embed(normalize(x))
    assert math.hypot(c, s) == pytest.approx(1.0, abs=1e-15)


@given(reals)
def test_normalize_range_and_idempotent(x):
    p = normalize(x)
    assert 0.0 <= p.rep < 1.0
    assert normalize(p.rep) == p


@given(reals, st.integers(-1000, 1000))
def test_integer_shift_invariance(x, k):
    assert circle_dist(normalize(x), normalize(x + k)) < 1e-9


@given(unit, unit, unit)
def test_metric_axioms(a, b, c):
    p, q, r = CirclePoint(a), CirclePoint(b), CirclePoint(c)
    assert circle_dist(p, p) == 0.0
    assert circle_dist(p, q) == circle_dist(q, p)
    assert 0.0 <= circle_dist(p, q) <= 0.5
    assert circle_dist(p, r) <= circle_dist(p, q) + circle_dist(q, r) + 1e-12


@given(unit, unit, reals)
def test_rotation_isometry(a, b, t):
    p, q = CirclePoint(a), CirclePoint(b)
    assert abs(circle_dist(rotate(p, t), rotate(q, t)) - circle_dist(p, q)) < 1e-9


@given(unit, st.floats(-10, 10, allow_nan=False))
def test_rotation_inverse(a, t):
    p = CirclePoint(a)
    assert circle_dist(rotate(rotate(p, t), -t), p) < 1e-12


# --- continued fractions ---------------------------------------------------

def test_continued_fraction_examples():
    assert continued_fraction(0.618033988749895, 8) == [1] * 8
    assert continued_fraction(0.5) == [2]
    x = 0.4142135623730951
    assert continued_fraction(x, 5) == euclid_expansion(x, 5) == [2, 2, 2, 2, 2]


def test_continued_fraction_stops_on_float_rationals():
    assert continued_fraction(1 / 3) == [3]
    assert continued_fraction(0.375) == [2, 1, 2]


@pytest.mark.parametrize("x", [0.0, 1.0, -0.3, 1.5])
def test_continued_fraction_domain(x):
    with pytest.raises(DomainError):
        continued_fraction(x, 4)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000), max_denominator=1000))
def test_continued_fraction_reconstructs(fr):
    x = float(fr)
    terms = continued_fraction(x, 60)
    val = Fraction(0)
    for a in reversed(terms):
        val = 1 / (a + val)
    assert abs(float(val) - x) <= 4 * np.finfo(float).eps


# --- rationality -----------------------------------------------------------

def brute_rational(x, m):
    """Smallest-q p/q with |x - p/q| < 1/(2 q m) over every q <= m."""
    for q in range(1, m + 1):
        for p in (math.floor(x * q), math.ceil(x * q)):
            if abs(Fraction(x) - Fraction(p, q)) < Fraction(1, 2 * q * m):
                return p, q
    return None


def test_rationality_examples():
    assert rationality_diagnostic(0.5, 100) == (1, 2)
    assert rationality_diagnostic(0.618033988749895, 100) is None
    assert brute_rational(0.618033988749895, 100) is None
    assert rationality_diagnostic(2 / 7 + 1e-15, 100) == (2, 7)


@settings(max_examples=200)
@given(st.floats(1e-6, 1 - 1e-6), st.integers(1, 300))
def test_rationality_matches_brute_force(x, m):
    assert rationality_diagnostic(x, m) == brute_rational(x, m)


def test_rotation_period():
    assert rotation_period(0.0) == 1
    assert rotation_period(3.0) == 1
    assert rotation_period(0.25) == 4
    assert rotation_period(1.5) == 2
    assert rotation_period(GOLDEN) is None


# --- gaps / discrepancy ----------------------------------------------------

def test_gap_examples():
    st4 = gap_statistics([CirclePoint(x) for x in (0.0, 0.25, 0.5, 0.75)])
    assert np.allclose(st4.sorted_gaps, 0.25)
    assert st4.distinct_gap_count == 1
    assert st4.max_gap == 0.25

    st2 = gap_statistics([CirclePoint(0.0), CirclePoint(0.1)])
    assert list(st2.sorted_gaps) == pytest.approx([0.1, 0.9])
    assert st2.max_gap == pytest.approx(0.9)

    with pytest.raises(DomainError):
        gap_statistics([CirclePoint(0.3)])


def test_gap_golden_orbit_three_distances():
    pts = rotation_orbit(GOLDEN, 100)
    gaps = brute_gaps(list(pts))
    stats = gap_statistics(pts)
    assert stats.distinct_gap_count <= 3
    assert stats.max_gap == pytest.approx(max(gaps), abs=1e-15)
    assert sum(stats.sorted_gaps) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=150)
@given(st.floats(1e-4, 1 - 1e-4), st.integers(2, 2000))
def test_three_distance_property(alpha, n):
    stats = gap_statistics(rotation_orbit(alpha, n), merge_tol=1e-9)
    assert stats.distinct_gap_count <= 3
    assert abs(stats.sorted_gaps.sum() - 1.0) < 1e-12
    assert stats.max_gap == stats.sorted_gaps[-1]


def test_star_discrepancy_examples():
    assert star_discrepancy([CirclePoint(0.0)]) == 1.0
    for n in (1, 2, 7, 100):
        pts = np.arange(n) / n
        assert star_discrepancy(pts) == pytest.approx(brute_discrepancy(pts), abs=1e-15)
        assert star_discrepancy(pts) == pytest.approx(1.0 / n, abs=1e-15)
    gold = rotation_orbit(GOLDEN, 1000)
    d = star_discrepancy(gold)
    assert d == pytest.approx(brute_discrepancy(gold), abs=1e-15)
    assert d < 0.01
    with pytest.raises(DomainError):
        star_discrepancy([])


@settings(max_examples=50)
@given(st.lists(unit, min_size=1, max_size=40))
def test_star_discrepancy_matches_counting(points):
    assert star_discrepancy(points) == pytest.approx(brute_discrepancy(points), abs=1e-12)


def test_discrepancy_decreases():
    assert star_discrepancy(rotation_orbit(GOLDEN, 10000)) < star_discrepancy(rotation_orbit(GOLDEN, 100))


def test_max_gap_shrinks_for_irrational_alpha():
    assert rationality_diagnostic(GOLDEN) is None
    gaps = [gap_statistics(rotation_orbit(GOLDEN, n)).max_gap for n in (10, 100, 1000, 10000, 100000)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4
