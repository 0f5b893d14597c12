"""Numerical certificates for the invariant double circle of a skew product.

Given a 2-cycle ``r1 < r2`` of the base map, the circles are the level sets
``{r1} x S^1`` and ``{r2} x S^1``.  Every check here samples those level sets,
pushes samples through the skew map and measures how far the images land from
where they should; each pass/fail carries the measured margin behind it.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .circle import (
    DEFAULT_MAX_DENOMINATOR,
    DEFAULT_MERGE_TOL,
    CirclePoint,
    circle_dist_array,
    gap_statistics,
    rotation_period,
    star_discrepancy,
    wrap,
    wrap_array,
)
from .errors import DomainError, RationalRotation
from .map1d import TwoCycle
from .skew import (
    ConstantRotation,
    SkewState,
    SkewSystem,
    VariableRotation,
    double_step_rotation,
    exact_circle_reps,
    orbit_arrays,
    parity_circle_reps,
    rotation_amounts,
)

SCHEMA_VERSION = 1

DEFAULT_SAMPLES = 512
DEFAULT_TOL = 1e-9
DEFAULT_EPS = 1e-3
DEFAULT_K_MAX = 10**5
DEFAULT_DELTA = 1e-6
DEFAULT_STARTS = 100
DEFAULT_ATTRACTION_TRANSIENT = 10**4
DEFAULT_ATTRACTION_TOL = 1e-6
DEFAULT_MIN_ATTRACTION = 0.95
ATTRIBUTION_TOL = 1e-8
# the simulated orbit compared against the closed form in variable-rotation runs
DRIFT_PROBE_STEPS = 2 * 10**4


@dataclass(frozen=True)
class InvariantCircle:
    r_level: float
    samples: List[CirclePoint]


def attribute_orbit(states: Sequence[SkewState], cyc: TwoCycle, tol: float = ATTRIBUTION_TOL):
    """Split an orbit started on the r1-circle into the two circles by parity.

    Raises DomainError if any state is farther than ``tol`` (in r) from the
    level its parity assigns it to.
    """
    levels = (cyc.r1, cyc.r2)
    samples: Tuple[list, list] = ([], [])
    for i, s in enumerate(states):
        level = levels[i % 2]
        if abs(s.r - level) > tol:
            raise DomainError(f"state {i} is {abs(s.r - level):.3g} away from r = {level}")
        samples[i % 2].append(s.theta)
    return InvariantCircle(cyc.r1, samples[0]), InvariantCircle(cyc.r2, samples[1])


# --- individual checks -----------------------------------------------------

@dataclass(frozen=True)
class NetCheck:
    passed: bool
    max_gap: float
    eps: float


def epsilon_net_check(points, eps: float) -> NetCheck:
    """Do the points cut the circle into arcs all shorter than ``eps``?"""
    if eps <= 0:
        raise DomainError("eps must be positive")
    gap = gap_statistics(points).max_gap
    return NetCheck(passed=gap < eps, max_gap=gap, eps=eps)


@dataclass(frozen=True)
class Check:
    passed: bool
    margin: float


def disjointness_check(cyc: TwoCycle, delta: float = DEFAULT_DELTA) -> Check:
    # level sets {r1} x S^1 and {r2} x S^1 meet iff r1 == r2
    if delta <= 0:
        raise DomainError("delta must be positive")
    margin = abs(cyc.r2 - cyc.r1)
    return Check(passed=margin > delta, margin=margin)


def _sample_angles(n: int) -> np.ndarray:
    if n < 1:
        raise DomainError("need at least one sample")
    return np.arange(n, dtype=float) / n


def _images(sys: SkewSystem, r: float, thetas: np.ndarray, steps: int = 1):
    """Apply the skew map ``steps`` times to every ``(r, theta)``."""
    rs = np.full(thetas.shape, float(r))
    th = thetas.copy()
    for _ in range(steps):
        rot = np.broadcast_to(np.asarray(sys.rotation_at(rs), dtype=float), rs.shape)
        rs = np.asarray(sys.family.eval(sys.lam, rs), dtype=float)
        th = wrap_array(th + rot)
    return rs, th


@dataclass(frozen=True)
class SwapCheck:
    """Swap of the two circles by one step.

    ``forward`` covers r1-circle -> r2-circle, ``backward`` the reverse.  The
    ``*_deviation`` fields are the max r-distance of images from the target
    level (inclusion); ``*_preimage_deviation`` is the max distance between a
    target sample and the image of its constructed preimage (surjectivity).
    """

    forward_deviation: float
    forward_preimage_deviation: float
    backward_deviation: float
    backward_preimage_deviation: float
    tol: float

    @property
    def forward_passed(self) -> bool:
        return max(self.forward_deviation, self.forward_preimage_deviation) < self.tol

    @property
    def backward_passed(self) -> bool:
        return max(self.backward_deviation, self.backward_preimage_deviation) < self.tol

    @property
    def passed(self) -> bool:
        return self.forward_passed and self.backward_passed


def _swap_direction(sys, src, dst, thetas):
    rs, _ = _images(sys, src, thetas)
    inclusion = float(np.max(np.abs(rs - dst)))
    # preimage of target (dst, t) on the source circle: undo the rotation
    rot = float(sys.rotation_at(src))
    pre = wrap_array(thetas - rot)
    rs2, th2 = _images(sys, src, pre)
    dev = np.maximum(np.abs(rs2 - dst), circle_dist_array(th2, thetas))
    return inclusion, float(np.max(dev))


def swap_invariance_check(
    sys: SkewSystem, cyc: TwoCycle, n_samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL
) -> SwapCheck:
    if tol <= 0:
        raise DomainError("tol must be positive")
    thetas = _sample_angles(n_samples)
    fwd, fwd_pre = _swap_direction(sys, cyc.r1, cyc.r2, thetas)
    bwd, bwd_pre = _swap_direction(sys, cyc.r2, cyc.r1, thetas)
    return SwapCheck(fwd, fwd_pre, bwd, bwd_pre, tol)


@dataclass(frozen=True)
class UnionCheck:
    passed: bool
    margin: float
    swap: SwapCheck


def union_invariance_check(
    sys: SkewSystem, cyc: TwoCycle, n_samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL
) -> UnionCheck:
    """Image of the union lands in the union (``margin``) and covers it (both
    swaps are surjective)."""
    thetas = _sample_angles(n_samples)
    levels = np.array([cyc.r1, cyc.r2])
    margin = 0.0
    for src in levels:
        rs, _ = _images(sys, src, thetas)
        nearest = np.min(np.abs(rs[:, None] - levels[None, :]), axis=1)
        margin = max(margin, float(np.max(nearest)))
    swap = swap_invariance_check(sys, cyc, n_samples, tol)
    return UnionCheck(passed=margin < tol and swap.passed, margin=margin, swap=swap)


@dataclass(frozen=True)
class F2Check:
    passed: bool
    r_deviation: float
    theta_deviation: float
    displacement: float
    expected_displacement: float


def _f2_circle(sys, level, thetas, beta, tol):
    rs, th = _images(sys, level, thetas, steps=2)
    r_dev = float(np.max(np.abs(rs - level)))
    theta_dev = float(np.max(circle_dist_array(th, wrap_array(thetas + beta))))
    displacement = wrap(float(th[0] - thetas[0]))
    return F2Check(
        passed=r_dev < tol and theta_dev < tol,
        r_deviation=r_dev,
        theta_deviation=theta_dev,
        displacement=displacement,
        expected_displacement=beta,
    )


def f2_invariance_check(
    sys: SkewSystem, cyc: TwoCycle, n_samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL
) -> Tuple[F2Check, F2Check]:
    """Each circle is mapped to itself by two steps, rotated by the
    double-step rotation."""
    thetas = _sample_angles(n_samples)
    beta = double_step_rotation(sys, cyc)
    return (
        _f2_circle(sys, cyc.r1, thetas, beta, tol),
        _f2_circle(sys, cyc.r2, thetas, beta, tol),
    )


def f2_swap_check(
    sys: SkewSystem, cyc: TwoCycle, n_samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL
) -> Check:
    """Literal test of "two steps carry the r1-circle onto the r2-circle".

    This contradicts the one-step swap whenever r1 != r2 and is expected to
    fail; it is reported so the contradiction stays visible.
    """
    thetas = _sample_angles(n_samples)
    rs, _ = _images(sys, cyc.r1, thetas, steps=2)
    margin = float(np.max(np.abs(rs - cyc.r2)))
    return Check(passed=margin < tol, margin=margin)


# --- density ---------------------------------------------------------------

@dataclass(frozen=True)
class CircleDensity:
    passed: bool
    eps: float
    k: int
    max_gap: float
    distinct_gap_count: int
    distinct_points: int
    star_discrepancy: float
    achieving_k: Optional[int]
    history: List[Tuple[int, float, int]]


@dataclass(frozen=True)
class DensityCertificate:
    rotation: float
    period: Optional[int]
    gamma1: CircleDensity
    gamma2: CircleDensity
    orbit_drift: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.gamma1.passed and self.gamma2.passed


def _circle_density(reps: np.ndarray, eps: float, k_max: int, merge_tol: float) -> CircleDensity:
    history = []

    def probe(k):
        st = gap_statistics(reps[:k], merge_tol)
        history.append((k, st.max_gap, st.distinct_gap_count))
        return st

    k_prev, k = 1, min(2, k_max)
    st = probe(k)
    while st.max_gap >= eps and k < k_max:
        k_prev, k = k, min(2 * k, k_max)
        st = probe(k)
    achieving = None
    if st.max_gap < eps:
        # max gap never grows as points are added, so bisect for the first k
        lo, hi = k_prev, k
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if probe(mid).max_gap < eps:
                hi = mid
            else:
                lo = mid
        achieving = hi
        k = hi
        st = gap_statistics(reps[:k], merge_tol)
    history.sort()
    return CircleDensity(
        passed=achieving is not None,
        eps=eps,
        k=k,
        max_gap=st.max_gap,
        distinct_gap_count=st.distinct_gap_count,
        distinct_points=st.distinct_points,
        star_discrepancy=star_discrepancy(reps[:k]),
        achieving_k=achieving,
        history=history,
    )


def _circle_reps(sys: SkewSystem, cyc: TwoCycle, k_max: int):
    if isinstance(sys.rotation, ConstantRotation):
        return exact_circle_reps(sys.rotation.alpha, k_max)
    g1, g2 = rotation_amounts(sys, cyc)
    return parity_circle_reps(g1, g2, k_max)


def orbit_drift(sys: SkewSystem, cyc: TwoCycle, steps: int = DRIFT_PROBE_STEPS) -> float:
    """Max distance between a simulated orbit from ``(r1, [0])`` and the
    closed-form circle orbit, over ``steps`` steps (r and theta combined)."""
    rs, th = orbit_arrays(sys, SkewState.at(cyc.r1, 0.0), steps)
    even, odd = _circle_reps(sys, cyc, (steps + 1) // 2)
    theta_ref = np.empty(steps)
    theta_ref[0::2] = even[: len(theta_ref[0::2])]
    theta_ref[1::2] = odd[: len(theta_ref[1::2])]
    r_ref = np.where(np.arange(steps) % 2 == 0, cyc.r1, cyc.r2)
    return float(max(np.max(np.abs(rs - r_ref)), np.max(circle_dist_array(th, theta_ref))))


def density_certificate(
    sys: SkewSystem,
    cyc: TwoCycle,
    eps: float = DEFAULT_EPS,
    k_max: int = DEFAULT_K_MAX,
    merge_tol: float = DEFAULT_MERGE_TOL,
    max_denominator: int = DEFAULT_MAX_DENOMINATOR,
) -> DensityCertificate:
    """Epsilon-net certificate for the even (r1) and odd (r2) parts of the
    orbit of ``(r1, [0])``.

    The smallest number of points per circle achieving ``eps`` is found by
    doubling then bisection.  Raises RationalRotation when the double-step
    rotation has a period ``q`` with ``1/q >= eps``: its orbit then has only
    ``q`` points per circle and can never form the net.
    """
    if eps <= 0 or k_max < 2:
        raise DomainError("need eps > 0 and k_max >= 2")
    beta = double_step_rotation(sys, cyc)
    period = rotation_period(beta, max_denominator)
    if period is not None and 1.0 / period >= eps:
        n = min(k_max, 2 * period + 2)
        even, odd = _circle_reps(sys, cyc, n)
        detail = {
            "rotation": beta,
            "period": period,
            "gamma1_distinct_points": gap_statistics(even, merge_tol).distinct_points,
            "gamma2_distinct_points": gap_statistics(odd, merge_tol).distinct_points,
        }
        raise RationalRotation(
            f"double-step rotation {beta!r} has period {period}; "
            f"at most {period} points per circle cannot reach eps = {eps}",
            detail,
        )
    even, odd = _circle_reps(sys, cyc, k_max)
    drift = None
    if isinstance(sys.rotation, VariableRotation):
        drift = orbit_drift(sys, cyc, min(DRIFT_PROBE_STEPS, 2 * k_max))
    return DensityCertificate(
        rotation=beta,
        period=period,
        gamma1=_circle_density(even, eps, k_max, merge_tol),
        gamma2=_circle_density(odd, eps, k_max, merge_tol),
        orbit_drift=drift,
    )


# --- attraction ------------------------------------------------------------

@dataclass(frozen=True)
class AttractionResult:
    fraction: float
    n_starts: int
    transient: int
    tol: float
    seed: int
    escaped: int


def attraction_check(
    sys: SkewSystem,
    cyc: TwoCycle,
    n_starts: int = DEFAULT_STARTS,
    transient: int = DEFAULT_ATTRACTION_TRANSIENT,
    tol: float = DEFAULT_ATTRACTION_TOL,
    seed: int = 0,
    r_starts=None,
) -> AttractionResult:
    """Fraction of random starts whose r-part ends within ``tol`` of the cycle.

    Starts are drawn from ``numpy.random.default_rng(seed)``: r uniform on the
    family's domain, theta uniform.  ``r_starts`` overrides the drawn r values.
    Orbits leaving the domain count as not converged.
    """
    if n_starts < 1 or transient < 0:
        raise DomainError("need n_starts >= 1 and transient >= 0")
    rng = np.random.default_rng(seed)
    lo, hi = sys.family.domain
    r = rng.uniform(lo, hi, n_starts)
    th = rng.uniform(0.0, 1.0, n_starts)
    if r_starts is not None:
        r = np.broadcast_to(np.asarray(r_starts, dtype=float), (n_starts,)).copy()
    alive = np.ones(n_starts, dtype=bool)
    for _ in range(transient):
        rot = np.broadcast_to(np.asarray(sys.rotation_at(r), dtype=float), r.shape)
        r = np.asarray(sys.family.eval(sys.lam, r), dtype=float)
        th = wrap_array(th + rot)
        out = ~np.isfinite(r) | (r < lo) | (r > hi)
        if out.any():
            alive &= ~out
            r[out] = cyc.r1  # parked; excluded by ``alive``
    dist = np.minimum(np.abs(r - cyc.r1), np.abs(r - cyc.r2))
    converged = alive & (dist < tol)
    return AttractionResult(
        fraction=float(np.count_nonzero(converged)) / n_starts,
        n_starts=n_starts,
        transient=transient,
        tol=tol,
        seed=seed,
        escaped=int(np.count_nonzero(~alive)),
    )


# --- full report -----------------------------------------------------------

@dataclass
class VerificationReport:
    lam: float
    r1: float
    r2: float
    multiplier: float
    cycle_residual: float
    rotation: dict
    disjoint: Check
    swap: SwapCheck
    f2_gamma1: F2Check
    f2_gamma2: F2Check
    f2_swap_literal: Check
    union: UnionCheck
    density: Optional[DensityCertificate]
    rational_rotation: Optional[dict]
    attraction: AttractionResult
    attraction_min: float
    settings: dict = field(default_factory=dict)

    @property
    def attraction_passed(self) -> bool:
        return self.attraction.fraction >= self.attraction_min

    @property
    def flags(self) -> dict:
        """Every certified conclusion by name.  The literal two-step swap is
        deliberately not among them."""
        return {
            "disjoint": self.disjoint.passed,
            "swap_forward": self.swap.forward_passed,
            "swap_backward": self.swap.backward_passed,
            "f2_gamma1": self.f2_gamma1.passed,
            "f2_gamma2": self.f2_gamma2.passed,
            "union_invariant": self.union.passed,
            "density_gamma1": self.density is not None and self.density.gamma1.passed,
            "density_gamma2": self.density is not None and self.density.gamma2.passed,
            "attraction": self.attraction_passed,
        }

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        swap = self.swap
        d = {
            "schema_version": SCHEMA_VERSION,
            "lambda": self.lam,
            "cycle": {
                "r1": self.r1,
                "r2": self.r2,
                "multiplier": self.multiplier,
                "residual": self.cycle_residual,
            },
            "rotation": self.rotation,
            "disjoint": {"passed": self.disjoint.passed, "margin": self.disjoint.margin},
            "swap_forward": {
                "passed": swap.forward_passed,
                "margin": swap.forward_deviation,
                "preimage_margin": swap.forward_preimage_deviation,
            },
            "swap_backward": {
                "passed": swap.backward_passed,
                "margin": swap.backward_deviation,
                "preimage_margin": swap.backward_preimage_deviation,
            },
            "f2_gamma1": asdict(self.f2_gamma1),
            "f2_gamma2": asdict(self.f2_gamma2),
            "f2_swap_literal": {
                "passed": self.f2_swap_literal.passed,
                "margin": self.f2_swap_literal.margin,
                "note": "two-step swap of the circles; contradicts the one-step swap, not certified",
            },
            "union_invariant": {"passed": self.union.passed, "margin": self.union.margin},
            "density": _density_dict(self.density, self.rational_rotation),
            "attraction": {
                "passed": self.attraction_passed,
                "fraction": self.attraction.fraction,
                "min_fraction": self.attraction_min,
                "n_starts": self.attraction.n_starts,
                "transient": self.attraction.transient,
                "tol": self.attraction.tol,
                "seed": self.attraction.seed,
                "escaped": self.attraction.escaped,
            },
            "settings": self.settings,
            "passed": self.passed,
        }
        return _jsonable(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _density_dict(cert: Optional[DensityCertificate], rational: Optional[dict]) -> dict:
    if cert is None:
        return {"passed": False, "rational_rotation": rational}

    def circle(c: CircleDensity):
        d = asdict(c)
        d["history"] = [{"k": k, "max_gap": g, "distinct_gap_count": n} for k, g, n in c.history]
        return d

    return {
        "passed": cert.passed,
        "rotation": cert.rotation,
        "period": cert.period,
        "orbit_drift": cert.orbit_drift,
        "gamma1": circle(cert.gamma1),
        "gamma2": circle(cert.gamma2),
        "rational_rotation": None,
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def rotation_summary(sys: SkewSystem, cyc: TwoCycle) -> dict:
    """Rotation amounts on each circle, the double-step rotation and their
    rationality diagnostics, as plain data."""
    g1, g2 = rotation_amounts(sys, cyc)
    beta = double_step_rotation(sys, cyc)
    rot = sys.rotation
    out = {
        "kind": "constant" if isinstance(rot, ConstantRotation) else "variable",
        "g_r1": g1,
        "g_r2": g2,
        "double_step_rotation": beta,
        "double_step_period": rotation_period(beta, rot.max_denominator),
    }
    if isinstance(rot, ConstantRotation):
        out["alpha"] = rot.alpha
        out["alpha_diagnostic"] = rot.diagnostic
    else:
        out["label"] = rot.label
        diag = rot.diagnose(sys.lam, cyc)
        out["g_r1_diagnostic"] = diag["g_r1_diagnostic"]
        out["g_r2_diagnostic"] = diag["g_r2_diagnostic"]
    return out


def verify_system(
    sys: SkewSystem,
    cyc: TwoCycle,
    n_samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    delta: float = DEFAULT_DELTA,
    eps: float = DEFAULT_EPS,
    k_max: int = DEFAULT_K_MAX,
    n_starts: int = DEFAULT_STARTS,
    transient: int = DEFAULT_ATTRACTION_TRANSIENT,
    attraction_tol: float = DEFAULT_ATTRACTION_TOL,
    min_attraction: float = DEFAULT_MIN_ATTRACTION,
    seed: int = 0,
    max_denominator: int = DEFAULT_MAX_DENOMINATOR,
) -> VerificationReport:
    """Run every check on ``(sys, cyc)`` and collect the results.

    A rational double-step rotation does not abort the run: the density
    section then records the RationalRotation evidence instead.
    """
    f2a, f2b = f2_invariance_check(sys, cyc, n_samples, tol)
    try:
        density = density_certificate(sys, cyc, eps, k_max, max_denominator=max_denominator)
        rational = None
    except RationalRotation as exc:
        density = None
        rational = dict(exc.detail, message=str(exc))
    return VerificationReport(
        lam=sys.lam,
        r1=cyc.r1,
        r2=cyc.r2,
        multiplier=cyc.multiplier,
        cycle_residual=cyc.residual,
        rotation=rotation_summary(sys, cyc),
        disjoint=disjointness_check(cyc, delta),
        swap=swap_invariance_check(sys, cyc, n_samples, tol),
        f2_gamma1=f2a,
        f2_gamma2=f2b,
        f2_swap_literal=f2_swap_check(sys, cyc, n_samples, tol),
        union=union_invariance_check(sys, cyc, n_samples, tol),
        density=density,
        rational_rotation=rational,
        attraction=attraction_check(sys, cyc, n_starts, transient, attraction_tol, seed),
        attraction_min=min_attraction,
        settings={
            "n_samples": n_samples,
            "tol": tol,
            "delta": delta,
            "eps": eps,
            "k_max": k_max,
            "max_denominator": max_denominator,
        },
    )
