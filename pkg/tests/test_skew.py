import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublecircle.circle import GOLDEN, circle_dist, gap_statistics, normalize
from doublecircle.errors import DomainError, OrbitEscaped
from doublecircle.skew import (
    ConstantRotation,
    SkewState,
    SkewSystem,
    VariableRotation,
    double_step_rotation,
    exact_circle_orbit,
    orbit,
    orbit_arrays,
    orbit_csv,
    read_orbit_csv,
    split_parity,
    step,
    write_orbit_csv,
)

from oracles import logistic


def test_step_on_cycle(golden_system, cycle32):
    s = step(golden_system, SkewState.at(0.5130445095, 0.0))
    assert s.r == pytest.approx(0.7994554905, abs=1e-9)
    assert s.theta.rep == GOLDEN


def test_step_without_rotation(logistic):
    sys_ = SkewSystem(logistic, ConstantRotation(0.0), 3.2)
    s = step(sys_, SkewState.at(0.3, 0.77))
    assert s.r == logistic.eval(3.2, 0.3)
    assert s.theta.rep == 0.77


def test_step_escape(logistic):
    sys_ = SkewSystem(logistic, ConstantRotation(GOLDEN), 3.2)
    with pytest.raises(OrbitEscaped) as info:
        step(sys_, SkewState.at(1.5, 0.0))
    assert info.value.index == 1


def test_orbit_escape_carries_absolute_index(logistic):
    # lam > 4 pushes r = 0.5 above 1 after one step, then below 0
    sys_ = SkewSystem(logistic, ConstantRotation(GOLDEN), 4.4)
    with pytest.raises(OrbitEscaped) as info:
        orbit(sys_, SkewState.at(0.5, 0.0), n=5, transient=0)
    assert info.value.index == 1
    with pytest.raises(OrbitEscaped) as info:
        orbit(sys_, SkewState.at(0.1, 0.0), n=50, transient=3)
    r = 0.1
    for k in range(1, 60):
        r = logistic(4.4, r)
        if not 0 <= r <= 1:
            break
    assert info.value.index == k


def test_variable_rotation_uses_pre_step_r(logistic):
    sys_ = SkewSystem(logistic, VariableRotation(lambda lam, r: r), 3.2)
    s = step(sys_, SkewState.at(0.3, 0.0))
    assert s.theta.rep == 0.3


def test_orbit_chain(golden_system, cycle32):
    states = orbit(golden_system, SkewState.at(cycle32.r1, 0.0), n=4)
    assert [s.r for s in states] == pytest.approx([cycle32.r1, cycle32.r2] * 2, abs=1e-14)
    for k, s in enumerate(states):
        assert circle_dist(s.theta, normalize(k * GOLDEN)) < 1e-15


def test_orbit_single_state(golden_system):
    s0 = SkewState.at(0.3, 0.2)
    assert orbit(golden_system, s0, n=1) == [s0]


def test_orbit_after_transient(golden_system, cycle32):
    states = orbit(golden_system, SkewState.at(0.3, 0.0), n=2, transient=2000)
    # oracle: plain iteration of the logistic map
    r = 0.3
    for _ in range(2000):
        r = logistic(3.2, r)
    assert states[0].r == pytest.approx(r, abs=1e-12)
    for s in states:
        assert min(abs(s.r - cycle32.r1), abs(s.r - cycle32.r2)) < 1e-8


def test_orbit_argument_checks(golden_system):
    with pytest.raises(DomainError):
        orbit(golden_system, SkewState.at(0.3), n=0)
    with pytest.raises(DomainError):
        orbit(golden_system, SkewState.at(0.3), n=1, transient=-1)


def test_split_parity():
    assert split_parity(list("abcd")) == (["a", "c"], ["b", "d"])
    assert split_parity([]) == ([], [])


def test_parity_lock(golden_system, cycle32):
    rs, _ = orbit_arrays(golden_system, SkewState.at(cycle32.r1, 0.0), 10_000)
    even, odd = split_parity(rs)
    assert np.max(np.abs(np.array(even) - cycle32.r1)) < 1e-8
    assert np.max(np.abs(np.array(odd) - cycle32.r2)) < 1e-8


def test_theta_exactness(golden_system, cycle32):
    n = 10_000
    _, th = orbit_arrays(golden_system, SkewState.at(cycle32.r1, 0.0), n)
    k = np.arange(n)
    ref = np.mod(k * GOLDEN, 1.0)
    d = np.abs(th - ref)
    d = np.minimum(d, 1 - d)
    assert np.all(d <= np.maximum(k, 1) * 1e-15)


def test_exact_circle_orbit_examples(cycle32):
    g1, g2 = exact_circle_orbit(cycle32, 0.25, 2)
    assert [p.rep for p in g1] == [0.0, 0.5]
    assert [p.rep for p in g2] == [0.25, 0.75]
    g1, g2 = exact_circle_orbit(cycle32, GOLDEN, 1)
    assert [p.rep for p in g1] == [0.0] and [p.rep for p in g2] == [GOLDEN]
    g1, _ = exact_circle_orbit(cycle32, GOLDEN, 500)
    assert gap_statistics(g1).distinct_gap_count <= 3


@settings(max_examples=50)
@given(st.floats(1e-3, 1 - 1e-3), st.integers(1, 300))
def test_exact_orbit_union_is_full_rotation_orbit(alpha, k_max):
    g1, g2 = exact_circle_orbit(None, alpha, k_max)
    merged = sorted(p.rep for p in g1 + g2)
    full = sorted(normalize(k * alpha).rep for k in range(2 * k_max))
    assert merged == full


def test_exact_orbit_matches_simulation(golden_system, cycle32):
    g1, g2 = exact_circle_orbit(cycle32, GOLDEN, 200)
    states = orbit(golden_system, SkewState.at(cycle32.r1, 0.0), 400)
    even, odd = split_parity(states)
    assert max(circle_dist(a, b.theta) for a, b in zip(g1, even)) < 1e-12
    assert max(circle_dist(a, b.theta) for a, b in zip(g2, odd)) < 1e-12


def test_variable_constant_consistency(logistic):
    const = SkewSystem(logistic, ConstantRotation(GOLDEN), 3.2)
    var = SkewSystem(logistic, VariableRotation(lambda lam, r: GOLDEN + 0.0 * r), 3.2)
    a = orbit_arrays(const, SkewState.at(0.3, 0.1), 500, transient=10)
    b = orbit_arrays(var, SkewState.at(0.3, 0.1), 500, transient=10)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_double_step_rotation_examples(logistic, cycle32):
    sys_ = SkewSystem(logistic, ConstantRotation(0.3), 3.2)
    assert double_step_rotation(sys_, cycle32) == pytest.approx(0.6, abs=1e-15)

    scaled = SkewSystem(logistic, VariableRotation(lambda lam, r: GOLDEN * (1 + r)), 3.2)
    expected = normalize(GOLDEN * (2 + 4.2 / 3.2)).rep
    assert cycle32.r1 + cycle32.r2 == pytest.approx(4.2 / 3.2, abs=1e-15)
    assert double_step_rotation(scaled, cycle32) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.047237, abs=1e-6)

    zero = SkewSystem(logistic, VariableRotation(lambda lam, r: 0.0 * r), 3.2)
    assert double_step_rotation(zero, cycle32) == 0.0
    states = orbit(zero, SkewState.at(cycle32.r1, 0.4), 20)
    assert {s.theta.rep for s in states[0::2]} == {0.4}


def test_double_step_rotation_matches_measurement(logistic, cycle32):
    scaled = SkewSystem(logistic, VariableRotation(lambda lam, r: GOLDEN * (1 + r)), 3.2)
    beta = double_step_rotation(scaled, cycle32)
    _, th = orbit_arrays(scaled, SkewState.at(cycle32.r1, 0.0), 2001)
    inc = np.mod(np.diff(th[0::2]), 1.0)
    assert np.max(np.abs(inc - beta)) < 1e-9


def test_rotation_diagnostics(cycle32):
    assert ConstantRotation(0.25).diagnostic == (1, 4)
    assert ConstantRotation(1.25).diagnostic == (1, 4)
    assert ConstantRotation(2.0).diagnostic == (0, 1)
    assert ConstantRotation(GOLDEN).diagnostic is None
    diag = VariableRotation(lambda lam, r: 0.5 + 0.0 * r).diagnose(3.2, cycle32)
    assert diag["g_r1_diagnostic"] == diag["g_r2_diagnostic"] == (1, 2)
    with pytest.raises(DomainError):
        ConstantRotation(math.nan)


def test_lambda_range_guard(logistic):
    with pytest.raises(DomainError):
        SkewSystem(logistic, ConstantRotation(GOLDEN), 4.5, lambda_range=(0.0, 4.0))


def test_orbit_csv_format(golden_system, cycle32):
    states = orbit(golden_system, SkewState.at(cycle32.r1, 0.0), 5)
    text = orbit_csv(states, embed=True)
    lines = text.split("\n")
    assert lines[0] == "k,r,theta,x,y"
    assert text.endswith("\n") and "\r" not in text
    assert len(lines) == 7  # header, 5 rows, trailing empty
    k, r, theta, x, y = lines[2].split(",")
    assert k == "1"
    assert float(r) == states[1].r and float(theta) == states[1].theta.rep
    assert len(r.replace("0.", "", 1).lstrip("0")) <= 17
    assert float(x) ** 2 + float(y) ** 2 == pytest.approx(1.0)
    back = read_orbit_csv(io.StringIO(text))
    assert back == states


def test_orbit_csv_without_embed(golden_system):
    buf = io.StringIO()
    write_orbit_csv(buf, orbit(golden_system, SkewState.at(0.4), 3))
    assert buf.getvalue().splitlines()[0] == "k,r,theta"
