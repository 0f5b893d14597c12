"""One-parameter families of interval maps, their fixed points and 2-cycles.

Root finding follows one deterministic recipe everywhere: a uniform sign scan
over ``GRID_CELLS`` cells of the family's domain, bisection of every bracket
down to ``BISECT_WIDTH``, then at most ``NEWTON_STEPS`` Newton steps that are
kept only when they stay in the bracket and shrink the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AmbiguousCycles, DomainError, NoFixedPoint, NoTwoCycle, WindowNotFound

GRID_CELLS = 4096
BISECT_WIDTH = 1e-13
NEWTON_STEPS = 5
ROOT_TOL = 1e-12
WINDOW_TOL = 1e-6
FD_STEP = 1e-5
FD_STEP_HIGH = 1e-3
# minimal separation of a 2-cycle's points
CYCLE_SEPARATION = 1e-8
# a cycle whose rounding uncertainty exceeds this fraction of its separation
# cannot be told apart from the fixed point it bifurcates from
UNRESOLVED_FRACTION = 0.1

MapFn = Callable[[float, float], float]


@dataclass(frozen=True)
class MapFamily:
    """A map family ``(lam, r) -> f(lam, r)``.

    ``eval`` (and ``deriv`` when given) must accept numpy arrays for ``r``.
    Without an analytic ``deriv`` the r-derivative falls back to a central
    difference with step ``h``.
    """

    eval: MapFn
    domain: Tuple[float, float]
    name: str = "custom"
    deriv: Optional[MapFn] = None
    h: float = FD_STEP

    def __call__(self, lam, r):
        return self.eval(lam, r)

    def df(self, lam, r):
        if self.deriv is not None:
            return self.deriv(lam, r)
        return (self.eval(lam, r + self.h) - self.eval(lam, r - self.h)) / (2 * self.h)

    def contains(self, r) -> bool:
        lo, hi = self.domain
        return bool(lo <= r <= hi)


def logistic_family() -> MapFamily:
    return MapFamily(
        eval=lambda lam, r: lam * r * (1.0 - r),
        deriv=lambda lam, r: lam * (1.0 - 2.0 * r),
        domain=(0.0, 1.0),
        name="logistic",
    )


def linear_family(domain=(-1.0, 1.0)) -> MapFamily:
    """f(lam, r) = lam * r; degenerate (all higher derivatives vanish)."""
    return MapFamily(
        eval=lambda lam, r: lam * r,
        deriv=lambda lam, r: lam + 0.0 * r,
        domain=domain,
        name="linear",
    )


FAMILIES = {"logistic": logistic_family}


def get_family(name: str) -> MapFamily:
    try:
        return FAMILIES[name]()
    except KeyError:
        raise DomainError(f"unknown map family {name!r}; known: {sorted(FAMILIES)}") from None


# --- root finding ----------------------------------------------------------

def _bisect(g, a, b, ga):
    while b - a > BISECT_WIDTH:
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def _newton(g, dg, x, a, b):
    best, best_res = x, abs(g(x))
    for _ in range(NEWTON_STEPS):
        if best_res == 0.0:
            break
        d = dg(best)
        if d == 0.0 or not math.isfinite(d):
            break
        nxt = best - g(best) / d
        if not (a <= nxt <= b):
            break
        res = abs(g(nxt))
        if res >= best_res:
            break
        best, best_res = nxt, res
    return best


def _roots_in(scan, polish, dpolish, a, b, sa, depth=0):
    """Roots of ``scan`` in the sign-change bracket [a, b], splitting around
    each hit so several crossings packed into one grid cell are recovered."""
    x = _newton(polish, dpolish, _bisect(scan, a, b, sa), a, b)
    found = [x]
    if depth > 8:
        return found
    gap = 1e3 * BISECT_WIDTH
    for lo, hi in ((a, x - gap), (x + gap, b)):
        if hi <= lo:
            continue
        slo, shi = scan(lo), scan(hi)
        if slo * shi < 0:
            found += _roots_in(scan, polish, dpolish, lo, hi, slo, depth + 1)
    return found


def _hidden_dips(scan, grid, vals):
    """Brackets for pairs of close roots that share a grid cell.

    Such a pair leaves no sign change on the grid but shows up as a local
    minimum of |scan|; minimizing across the neighbouring cells exposes it.
    Yields (a, m, b) with a sign change on both [a, m] and [m, b].
    """
    mag = np.abs(vals)
    inner = np.arange(1, len(grid) - 1)
    dips = inner[(mag[inner] < mag[inner - 1]) & (mag[inner] < mag[inner + 1])]
    for i in dips:
        s = np.sign(vals[i])
        if s == 0 or not np.isfinite(vals[i]):
            continue
        a, b = float(grid[i - 1]), float(grid[i + 1])
        res = minimize_scalar(lambda x: s * scan(x), bounds=(a, b), method="bounded",
                              options={"xatol": BISECT_WIDTH})
        if np.isfinite(res.fun) and res.fun < 0:
            yield a, float(res.x), b


def _find_roots(scan_vec, scan, polish, dpolish, domain, tol) -> List[float]:
    """Roots of ``polish`` located through sign changes of ``scan``.

    ``scan`` must share the roots of interest with ``polish``; it may differ
    from it by a positive-or-negative smooth factor (deflation).
    """
    lo, hi = domain
    grid = np.linspace(lo, hi, GRID_CELLS + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = scan_vec(grid)
    roots = [float(x) for x in grid[vals == 0.0]]
    signs = np.sign(vals)
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        roots += _roots_in(scan, polish, dpolish, float(grid[i]), float(grid[i + 1]), float(vals[i]))
    for a, m, b in _hidden_dips(scan, grid, vals):
        roots += _roots_in(scan, polish, dpolish, a, m, scan(a))
        roots += _roots_in(scan, polish, dpolish, m, b, scan(m))
    roots = sorted(r for r in roots if abs(polish(r)) < tol)
    merged: List[float] = []
    for r in roots:
        if merged and r - merged[-1] < 10 * tol:
            continue
        merged.append(r)
    return merged


def find_fixed_points(fam: MapFamily, lam: float, tol: float = ROOT_TOL) -> List[float]:
    if tol <= 0:
        raise DomainError("tol must be positive")
    g = lambda r: float(fam.eval(lam, r) - r)
    return _find_roots(
        lambda r: fam.eval(lam, r) - r,
        g,
        g,
        lambda r: float(fam.df(lam, r) - 1.0),
        fam.domain,
        tol,
    )


# --- 2-cycles --------------------------------------------------------------

@dataclass(frozen=True)
class TwoCycle:
    """A period-2 orbit ``f(r1) = r2, f(r2) = r1`` with ``r1 < r2``."""

    lam: float
    r1: float
    r2: float
    multiplier: float
    residual: float

    @property
    def attracting(self) -> bool:
        return abs(self.multiplier) < 1.0

    @property
    def separation(self) -> float:
        return self.r2 - self.r1


def make_two_cycle(fam: MapFamily, lam: float, r1: float, r2: float) -> TwoCycle:
    """Build a TwoCycle from given points, computing multiplier and residual."""
    r1, r2 = sorted((float(r1), float(r2)))
    f = lambda r: float(fam.eval(lam, r))
    residual = max(abs(f(f(r1)) - r1), abs(f(f(r2)) - r2))
    mult = float(fam.df(lam, r1)) * float(fam.df(lam, r2))
    return TwoCycle(lam=float(lam), r1=r1, r2=r2, multiplier=mult, residual=residual)


def find_two_cycles(fam: MapFamily, lam: float, tol: float = ROOT_TOL) -> List[TwoCycle]:
    """Every 2-cycle of ``f(lam, .)`` in the domain (possibly none)."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    f = lambda r: float(fam.eval(lam, r))
    f2 = lambda r: f(f(r))
    df2 = lambda r: float(fam.df(lam, f(r))) * float(fam.df(lam, r))

    # f(f(r)) - r vanishes at every fixed point too; dividing by f(r) - r
    # removes those roots so near-tangent fixed points cannot pose as cycles
    def deflated(r):
        fr = f(r)
        den = fr - r
        return (f(fr) - r) / den if den != 0.0 else math.nan

    def deflated_vec(r):
        fr = fam.eval(lam, r)
        return (fam.eval(lam, fr) - r) / (fr - r)

    roots = _find_roots(
        deflated_vec,
        deflated,
        lambda r: f2(r) - r,
        lambda r: df2(r) - 1.0,
        fam.domain,
        tol,
    )
    fixed = find_fixed_points(fam, lam, tol)
    survivors = [r for r in roots if all(abs(r - x) >= 10 * tol for x in fixed)]

    cycles: List[TwoCycle] = []
    for r in survivors:
        partner = f(r)
        if abs(partner - r) <= CYCLE_SEPARATION or not fam.contains(partner):
            continue
        cyc = make_two_cycle(fam, lam, r, partner)
        if cyc.residual >= tol:
            continue
        rho = _root_uncertainty(cyc)
        # unresolved from the fixed point it is about to merge with
        if not rho < UNRESOLVED_FRACTION * cyc.separation:
            continue
        radius = max(CYCLE_SEPARATION, 10 * rho)
        if any(abs(c.r1 - cyc.r1) < radius and abs(c.r2 - cyc.r2) < radius for c in cycles):
            continue
        cycles.append(cyc)
    return cycles


def _root_uncertainty(cyc: TwoCycle) -> float:
    """How far rounding noise in f(f(r)) - r can move a cycle point.

    The noise is a few ulps; it is amplified by 1 / |(f^2)'(r) - 1|, which
    blows up as the multiplier approaches 1 at the cycle's birth.
    """
    slope = abs(cyc.multiplier - 1.0)
    if slope == 0.0:
        return math.inf
    return 8 * np.finfo(float).eps * max(1.0, abs(cyc.r1), abs(cyc.r2)) / slope


def find_two_cycle(fam: MapFamily, lam: float, tol: float = ROOT_TOL) -> TwoCycle:
    """The unique 2-cycle of ``f(lam, .)``.

    Raises NoTwoCycle when there is none and AmbiguousCycles (carrying all of
    them) when there are several.
    """
    cycles = find_two_cycles(fam, lam, tol)
    if not cycles:
        raise NoTwoCycle(f"{fam.name}: no 2-cycle at lambda = {lam!r}")
    if len(cycles) > 1:
        raise AmbiguousCycles(cycles)
    return cycles[0]


def cycle_multiplier(fam: MapFamily, cyc: TwoCycle) -> float:
    return float(fam.df(cyc.lam, cyc.r1)) * float(fam.df(cyc.lam, cyc.r2))


# --- doubling window -------------------------------------------------------

@dataclass(frozen=True)
class DoublingWindow:
    lambda_c: float
    lambda_0: float

    def __contains__(self, lam) -> bool:
        return self.lambda_c < lam < self.lambda_0


def _cycle_or_none(fam, lam):
    cycles = find_two_cycles(fam, lam)
    if not cycles:
        return None
    # past the window other periodic orbits are irrelevant; keep the one
    # closest to stability
    return min(cycles, key=lambda c: abs(c.multiplier))


def doubling_window(
    fam: MapFamily,
    lam_lo: float,
    lam_hi: float,
    tol: float = WINDOW_TOL,
    scan_points: int = 129,
) -> DoublingWindow:
    """Locate where the 2-cycle is born (``lambda_c``) and where its
    multiplier leaves the unit disc (``lambda_0``) inside [lam_lo, lam_hi].

    A coarse scan brackets both events and bisection refines each to ``tol``.
    """
    if not lam_lo < lam_hi:
        raise DomainError(f"need lam_lo < lam_hi, got [{lam_lo}, {lam_hi}]")
    grid = np.linspace(lam_lo, lam_hi, scan_points)
    cycles = [_cycle_or_none(fam, float(lam)) for lam in grid]

    first = next((i for i, c in enumerate(cycles) if c is not None), None)
    if first is None:
        raise WindowNotFound(f"{fam.name}: no 2-cycle in [{lam_lo}, {lam_hi}]")
    if first == 0:
        lambda_c = float(grid[0])
    else:
        a, b = float(grid[first - 1]), float(grid[first])
        while b - a > tol / 4:
            m = 0.5 * (a + b)
            if _cycle_or_none(fam, m) is None:
                a = m
            else:
                b = m
        lambda_c = 0.5 * (a + b)

    unstable = next(
        (i for i in range(first + 1, len(grid))
         if cycles[i] is not None and abs(cycles[i].multiplier) >= 1.0
         and cycles[i - 1] is not None and abs(cycles[i - 1].multiplier) < 1.0),
        None,
    )
    if unstable is None:
        raise WindowNotFound(f"{fam.name}: 2-cycle never loses stability in [{lam_lo}, {lam_hi}]")
    a, b = float(grid[unstable - 1]), float(grid[unstable])
    while b - a > tol / 4:
        m = 0.5 * (a + b)
        cyc = _cycle_or_none(fam, m)
        if cyc is not None and abs(cyc.multiplier) < 1.0:
            a = m
        else:
            b = m
    return DoublingWindow(lambda_c=lambda_c, lambda_0=0.5 * (a + b))


# --- doubling conditions ---------------------------------------------------

@dataclass(frozen=True)
class ConditionReport:
    """Finite-difference check of the period-doubling hypotheses at ``lambda_c``.

    ``derivative_gap`` is |f'(x*) + 1|; ``transversality`` is the lambda-rate
    of (f^2)'(x*(lambda)); ``nondegeneracy`` is -2 f''' - 3 (f'')^2 at x*.
    """

    lambda_c: float
    fixed_point: float
    derivative_gap: float
    transversality: float
    nondegeneracy: float
    derivative_ok: bool
    transversality_ok: bool
    nondegeneracy_ok: bool

    @property
    def passed(self) -> bool:
        return self.derivative_ok and self.transversality_ok and self.nondegeneracy_ok


def _closest_fixed_point(fam, lam, near=None):
    fixed = find_fixed_points(fam, lam)
    if not fixed:
        raise NoFixedPoint(f"{fam.name}: no fixed point at lambda = {lam!r}")
    if near is None:
        return min(fixed, key=lambda x: abs(float(fam.df(lam, x)) + 1.0))
    return min(fixed, key=lambda x: abs(x - near))


def check_doubling_condition(
    fam: MapFamily,
    lam_c: float,
    h: float = FD_STEP,
    h_high: float = FD_STEP_HIGH,
    derivative_tol: float = 1e-6,
    min_transversality: float = 1e-6,
    min_nondegeneracy: float = 1e-6,
) -> ConditionReport:
    if h <= 0 or h_high <= 0:
        raise DomainError("finite-difference steps must be positive")
    x = _closest_fixed_point(fam, lam_c)
    gap = abs(float(fam.df(lam_c, x)) + 1.0)

    def f2_slope(lam):
        xs = _closest_fixed_point(fam, lam, near=x)
        return float(fam.df(lam, xs)) ** 2

    transversality = (f2_slope(lam_c + h) - f2_slope(lam_c - h)) / (2 * h)

    f = lambda r: float(fam.eval(lam_c, r))
    d2 = (f(x + h_high) - 2 * f(x) + f(x - h_high)) / h_high**2
    d3 = (f(x + 2 * h_high) - 2 * f(x + h_high) + 2 * f(x - h_high) - f(x - 2 * h_high)) / (2 * h_high**3)
    nondegeneracy = -2.0 * d3 - 3.0 * d2**2

    return ConditionReport(
        lambda_c=float(lam_c),
        fixed_point=x,
        derivative_gap=gap,
        transversality=transversality,
        nondegeneracy=nondegeneracy,
        derivative_ok=gap < derivative_tol,
        transversality_ok=abs(transversality) > min_transversality,
        nondegeneracy_ok=abs(nondegeneracy) > min_nondegeneracy,
    )
