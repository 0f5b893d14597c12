"""Arithmetic, metric and statistics on the circle S^1 = R/Z.

Points are stored as a single float representative in [0, 1).  Functions that
take collections of points accept either ``CirclePoint`` objects or plain
floats (including numpy arrays); the latter are wrapped onto [0, 1) first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_MAX_DENOMINATOR = 10**6
DEFAULT_MERGE_TOL = 1e-9


def wrap(x: float) -> float:
    """Representative of ``x`` mod 1 in [0, 1)."""
    if not math.isfinite(x):
        raise DomainError(f"circle coordinate must be finite, got {x!r}")
    rep = x - math.floor(x)
    # floor of a value just below an integer can leave exactly 1.0
    if rep >= 1.0:
        rep = 0.0
    return rep


def wrap_array(x) -> np.ndarray:
    """Vectorized ``x - floor(x)`` onto [0, 1)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("circle coordinates must be finite")
    rep = x - np.floor(x)
    rep[rep >= 1.0] = 0.0
    return rep


@dataclass(frozen=True, order=True)
class CirclePoint:
    """A class [theta] in R/Z, held by its representative in [0, 1)."""

    rep: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "rep", wrap(float(self.rep)))

    def __float__(self):
        return self.rep

    def __repr__(self):
        return f"[{self.rep!r}]"


PointLike = Union[CirclePoint, float]


def normalize(x: float) -> CirclePoint:
    return CirclePoint(x)


def rotate(p: PointLike, a: float) -> CirclePoint:
    if not math.isfinite(a):
        raise DomainError(f"rotation amount must be finite, got {a!r}")
    return CirclePoint(float(p) + a)


def circle_dist(p: PointLike, q: PointLike) -> float:
    """Length of the shorter arc between ``p`` and ``q``; lies in [0, 0.5]."""
    d = abs(wrap(float(p)) - wrap(float(q)))
    return min(d, 1.0 - d)


def circle_dist_array(p, q) -> np.ndarray:
    d = np.abs(wrap_array(p) - wrap_array(q))
    return np.minimum(d, 1.0 - d)


def circle_embed(p: PointLike) -> Tuple[float, float]:
    t = 2.0 * math.pi * wrap(float(p))
    return math.cos(t), math.sin(t)


def as_reps(points: Union[Iterable[PointLike], np.ndarray]) -> np.ndarray:
    """Representatives of a point collection as a float array in [0, 1)."""
    if isinstance(points, np.ndarray):
        return wrap_array(points)
    return wrap_array([float(p) for p in points])


# --- rationality -----------------------------------------------------------

def _expansion(x: float):
    """Yield (a_k, p_k, q_k): partial quotients of x in (0,1) with convergents.

    Runs on the exact binary value of ``x``, so it terminates.
    """
    frac = Fraction(x)
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    while frac != 0:
        inv = 1 / frac
        a = inv.numerator // inv.denominator
        frac = inv - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        yield a, p, q


def continued_fraction(x: float, max_terms: int = 20) -> list:
    """Partial quotients ``[a1, a2, ...]`` of ``x = 1/(a1 + 1/(a2 + ...))``.

    The expansion stops after ``max_terms`` quotients or once a convergent
    reproduces ``x`` to within a few ulps, so floating-point noise in the tail
    never shows up as spurious large quotients.
    """
    if not (0.0 < x < 1.0):
        raise DomainError(f"continued_fraction needs 0 < x < 1, got {x!r}")
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")
    guard = 4.0 * np.finfo(float).eps * x
    terms = []
    for a, p, q in _expansion(x):
        terms.append(a)
        if len(terms) >= max_terms or abs(x - p / q) <= guard:
            break
    return terms


def convergents(x: float, max_denominator: int) -> list:
    """Convergents ``(p, q)`` of ``x`` with ``q <= max_denominator``,
    starting with ``0/1``."""
    out = [(0, 1)]
    for _, p, q in _expansion(x):
        if q > max_denominator:
            break
        out.append((p, q))
    return out


def rationality_diagnostic(
    x: float, max_denominator: int = DEFAULT_MAX_DENOMINATOR
) -> Optional[Tuple[int, int]]:
    """Return ``(p, q)`` if ``x`` is indistinguishable from ``p/q``, else None.

    ``x`` counts as ``p/q`` when ``|x - p/q| < 1 / (2 q max_denominator)`` for
    some ``q <= max_denominator``.  Such a ``p/q`` always satisfies Legendre's
    bound ``|x - p/q| < 1/(2 q^2)`` and is therefore a convergent, so scanning
    convergents is exhaustive.  The smallest such denominator is returned.
    """
    if not (0.0 < x < 1.0):
        raise DomainError(f"rationality_diagnostic needs 0 < x < 1, got {x!r}")
    exact = Fraction(x)
    for p, q in convergents(x, max_denominator):
        if abs(exact - Fraction(p, q)) < Fraction(1, 2 * q * max_denominator):
            return p, q
    return None


def rotation_period(beta: float, max_denominator: int = DEFAULT_MAX_DENOMINATOR):
    """Period of the rotation by ``beta`` at working resolution, or None.

    Unlike ``rationality_diagnostic`` this accepts any real; integer rotations
    have period 1.
    """
    b = wrap(beta)
    if b == 0.0:
        return 1
    diag = rationality_diagnostic(b, max_denominator)
    return None if diag is None else diag[1]


# --- statistics ------------------------------------------------------------

@dataclass(frozen=True)
class GapStats:
    sorted_gaps: np.ndarray
    distinct_gap_count: int
    max_gap: float
    merge_tol: float = DEFAULT_MERGE_TOL

    @property
    def distinct_points(self) -> int:
        """Number of distinct points, i.e. gaps that are not (near) zero."""
        return max(1, int(np.count_nonzero(self.sorted_gaps >= self.merge_tol)))


def circular_gaps(reps: np.ndarray) -> np.ndarray:
    """Arc lengths between circularly adjacent points (wraparound included)."""
    s = np.sort(reps)
    gaps = np.empty_like(s)
    gaps[:-1] = np.diff(s)
    gaps[-1] = 1.0 - s[-1] + s[0]
    return gaps


def count_distinct(values: np.ndarray, merge_tol: float) -> int:
    """Number of clusters in ``values`` when neighbours closer than merge_tol merge."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0
    return 1 + int(np.count_nonzero(np.diff(v) >= merge_tol))


def gap_statistics(points, merge_tol: float = DEFAULT_MERGE_TOL) -> GapStats:
    reps = as_reps(points)
    if reps.size < 2:
        raise DomainError("gap_statistics needs at least 2 points")
    gaps = np.sort(circular_gaps(reps))
    return GapStats(
        sorted_gaps=gaps,
        distinct_gap_count=count_distinct(gaps, merge_tol),
        max_gap=float(gaps[-1]),
        merge_tol=merge_tol,
    )


def star_discrepancy(points) -> float:
    """Exact star discrepancy sup_t |#{x < t}/N - t| of points in [0, 1)."""
    reps = np.sort(as_reps(points))
    n = reps.size
    if n == 0:
        raise DomainError("star_discrepancy needs at least one point")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - reps), np.max(reps - (i - 1) / n)))


def rotation_orbit(alpha: float, n: int, start: float = 0.0) -> np.ndarray:
    """``{start + k alpha mod 1 : 0 <= k < n}`` evaluated in closed form."""
    k = np.arange(n, dtype=float)
    return wrap_array(start + k * alpha)


__all__: Sequence[str] = [
    "GOLDEN",
    "CirclePoint",
    "GapStats",
    "normalize",
    "rotate",
    "circle_dist",
    "circle_dist_array",
    "circle_embed",
    "continued_fraction",
    "convergents",
    "rationality_diagnostic",
    "rotation_period",
    "gap_statistics",
    "star_discrepancy",
    "rotation_orbit",
    "wrap",
    "wrap_array",
    "as_reps",
]
