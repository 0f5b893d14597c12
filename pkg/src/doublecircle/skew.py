"""Skew products F(r, [theta]) = (f(lam, r), [theta + rotation(lam, r)]).

The base map never sees theta, so the r-dynamics is that of the 1-D family.
With a constant rotation this is the logistic-times-rotation system; with a
rotation g(lam, r) that depends on r the angle advance is taken at the r the
base map consumes (the pre-step r).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .circle import (
    DEFAULT_MAX_DENOMINATOR,
    CirclePoint,
    circle_embed,
    rationality_diagnostic,
    wrap_array,
    wrap,
)
from .errors import DomainError, OrbitEscaped
from .map1d import MapFamily, TwoCycle

MAX_ORBIT_STATES = 10**6
DEFAULT_TRANSIENT = 1000


def _diagnose(x, max_denominator=DEFAULT_MAX_DENOMINATOR):
    rep = wrap(x)
    if rep == 0.0:
        return (0, 1)
    return rationality_diagnostic(rep, max_denominator)


@dataclass(frozen=True)
class ConstantRotation:
    """theta -> theta + alpha.  ``diagnostic`` is the rationality diagnostic
    of alpha mod 1, evaluated once at construction."""

    alpha: float
    max_denominator: int = DEFAULT_MAX_DENOMINATOR
    diagnostic: Optional[Tuple[int, int]] = field(init=False, default=None)

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "diagnostic", _diagnose(self.alpha, self.max_denominator))

    def amount(self, lam, r):
        return self.alpha


@dataclass(frozen=True)
class VariableRotation:
    """theta -> theta + g(lam, r); ``g`` must be pure and accept arrays in r."""

    g: Callable[[float, float], float]
    max_denominator: int = DEFAULT_MAX_DENOMINATOR
    label: str = "g"

    def amount(self, lam, r):
        return self.g(lam, r)

    def diagnose(self, lam: float, cyc: TwoCycle) -> dict:
        g1 = float(self.g(lam, cyc.r1))
        g2 = float(self.g(lam, cyc.r2))
        return {
            "g_r1": g1,
            "g_r2": g2,
            "g_r1_diagnostic": _diagnose(g1, self.max_denominator),
            "g_r2_diagnostic": _diagnose(g2, self.max_denominator),
        }


RotationSpec = Union[ConstantRotation, VariableRotation]


@dataclass(frozen=True)
class SkewState:
    r: float
    theta: CirclePoint

    @classmethod
    def at(cls, r: float, theta: float = 0.0) -> "SkewState":
        return cls(float(r), CirclePoint(theta))


@dataclass(frozen=True)
class SkewSystem:
    family: MapFamily
    rotation: RotationSpec
    lam: float
    lambda_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise DomainError("lambda must be finite")
        if self.lambda_range is not None:
            lo, hi = self.lambda_range
            if not lo <= self.lam <= hi:
                raise DomainError(f"lambda {self.lam} outside {self.lambda_range}")

    def rotation_at(self, r):
        return self.rotation.amount(self.lam, r)


def _advance(sys: SkewSystem, r: float, theta: float, index: int) -> Tuple[float, float]:
    r_next = float(sys.family.eval(sys.lam, r))
    if not (math.isfinite(r_next) and sys.family.contains(r_next)):
        raise OrbitEscaped(index, r_next)
    return r_next, wrap(theta + float(sys.rotation_at(r)))


def step(sys: SkewSystem, s: SkewState, index: int = 1) -> SkewState:
    """One application of the skew map.  ``index`` labels the image in the
    OrbitEscaped error when the r-part leaves the family's domain."""
    r, theta = _advance(sys, s.r, s.theta.rep, index)
    return SkewState(r, CirclePoint(theta))


def orbit_arrays(
    sys: SkewSystem, s0: SkewState, n: int, transient: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """Like ``orbit`` but returns ``(r, theta)`` float arrays."""
    if n < 1 or transient < 0:
        raise DomainError("need n >= 1 and transient >= 0")
    if n > MAX_ORBIT_STATES:
        raise DomainError(f"orbit length {n} exceeds cap {MAX_ORBIT_STATES}")
    r, theta = s0.r, s0.theta.rep
    for i in range(transient):
        r, theta = _advance(sys, r, theta, i + 1)
    rs = np.empty(n)
    ths = np.empty(n)
    rs[0], ths[0] = r, theta
    for j in range(1, n):
        r, theta = _advance(sys, r, theta, transient + j)
        rs[j], ths[j] = r, theta
    return rs, ths


def orbit(sys: SkewSystem, s0: SkewState, n: int, transient: int = 0) -> List[SkewState]:
    """``n`` consecutive states after discarding ``transient`` steps.

    The first recorded state is the post-transient one (``s0`` itself when
    ``transient == 0``).
    """
    rs, ths = orbit_arrays(sys, s0, n, transient)
    return [SkewState(float(r), CirclePoint(t)) for r, t in zip(rs, ths)]


def split_parity(states: Sequence) -> Tuple[list, list]:
    return list(states[0::2]), list(states[1::2])


def exact_circle_reps(alpha: float, k_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Arrays ``2k alpha`` and ``(2k+1) alpha`` mod 1 for ``0 <= k < k_max``."""
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    k = np.arange(k_max, dtype=float)
    return wrap_array(2 * k * alpha), wrap_array((2 * k + 1) * alpha)


def exact_circle_orbit(cyc: Optional[TwoCycle], alpha: float, k_max: int):
    """Closed-form angles of the orbit of ``(r1, [0])`` under the constant
    rotation: even iterates sit on the r1-circle at ``[2k alpha]``, odd ones on
    the r2-circle at ``[(2k+1) alpha]``.  No map iteration is involved.

    ``cyc`` only identifies the circles and is not needed for the angles.
    """
    even, odd = exact_circle_reps(alpha, k_max)
    return [CirclePoint(t) for t in even], [CirclePoint(t) for t in odd]


def parity_circle_reps(g1: float, g2: float, k_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form angles for a rotation advancing ``g1`` on the r1-circle and
    ``g2`` on the r2-circle, starting from ``(r1, [0])``.

    The 2k-th iterate is at ``k (g1 + g2)`` and the (2k+1)-th at
    ``g1 + k (g1 + g2)``.  When ``g1 == g2`` the orbit is a plain rotation and
    is evaluated exactly as for a constant rotation.
    """
    if g1 == g2:
        return exact_circle_reps(g1, k_max)
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    k = np.arange(k_max, dtype=float)
    beta = g1 + g2
    return wrap_array(k * beta), wrap_array(g1 + k * beta)


def rotation_amounts(sys: SkewSystem, cyc: TwoCycle) -> Tuple[float, float]:
    """Angle advance of one F-step taken from the r1- and the r2-circle."""
    return float(sys.rotation_at(cyc.r1)), float(sys.rotation_at(cyc.r2))


def double_step_rotation(sys: SkewSystem, cyc: TwoCycle) -> float:
    """Rotation number of F^2 restricted to either invariant circle, in [0, 1)."""
    g1, g2 = rotation_amounts(sys, cyc)
    return wrap(g1 + g2)


# --- CSV -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_orbit_csv(
    out: TextIO, states: Sequence[SkewState], embed: bool = False, start_index: int = 0
) -> None:
    """Write ``k, r, theta`` rows (plus ``x, y`` on the unit circle when
    ``embed``) with a header and 17 significant digits."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["k", "r", "theta"] + (["x", "y"] if embed else []))
    for k, s in enumerate(states, start=start_index):
        row = [str(k), _fmt(s.r), _fmt(s.theta.rep)]
        if embed:
            row += [_fmt(v) for v in circle_embed(s.theta)]
        w.writerow(row)


def orbit_csv(states: Sequence[SkewState], embed: bool = False) -> str:
    buf = io.StringIO()
    write_orbit_csv(buf, states, embed=embed)
    return buf.getvalue()


def read_orbit_csv(src: TextIO) -> List[SkewState]:
    rows = csv.DictReader(src)
    return [SkewState(float(row["r"]), CirclePoint(float(row["theta"]))) for row in rows]
