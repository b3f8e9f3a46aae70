import math

import numpy as np
import pytest

from densys.density import ConstantDensity
from densys.plant import (
    KnownLoopSystem,
    LinearPlant,
    Polynomial,
    StateSpace,
    companion,
    is_hurwitz,
    poly_divmod,
    realize_tf,
    relative_degree,
)
from densys.sim import IntegratorConfig, integrate
from densys.systems import Scalar


def P(*coeffs):
    return Polynomial(tuple(coeffs))


def test_divmod_examples():
    q, r = poly_divmod(P(1, 2, 1), P(1, 1))
    assert q.coeffs == (1.0, 1.0) and r.is_zero
    q, r = poly_divmod(P(5, 3), P(1, 0, 1))
    assert q.is_zero and r.coeffs == (5.0, 3.0)
    # plant rewrite split: (p-1)^3 - p(p+1)^2 = -5p^2 + 2p - 1, then / (p+1)^2
    dq = Polynomial.from_roots(1, 1, 1) - P(1, 2, 1).shift(1)
    assert dq.coeffs == (-1.0, 2.0, -5.0)
    q, r = poly_divmod(dq, P(1, 2, 1))
    assert q.coeffs == (-5.0,)
    assert r.coeffs == (4.0, 12.0)


def test_divmod_reconstruction_randomized():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a = P(*rng.uniform(-3, 3, size=rng.integers(1, 9)))
        b = P(*rng.uniform(-3, 3, size=rng.integers(1, 6)))
        if b.is_zero:
            continue
        q, r = poly_divmod(a, b)
        back = q * b + r
        scale = max(1.0, max(abs(c) for c in a.coeffs) if a.coeffs else 1.0)
        n = max(len(a.coeffs), len(back.coeffs))
        err = max(abs(a.coeff(k) - back.coeff(k)) for k in range(n)) if n else 0.0
        assert err <= 1e-12 * scale
        assert r.degree < b.degree


def test_divmod_by_zero():
    with pytest.raises(ZeroDivisionError):
        poly_divmod(P(1, 1), P())


def test_hurwitz_examples():
    assert is_hurwitz(P(1, 2, 1))
    assert not is_hurwitz(Polynomial.from_roots(1, 1, 1))
    assert not is_hurwitz(P(1, 0, 1))  # imaginary-axis pair is marginal
    with pytest.raises(ValueError):
        is_hurwitz(P(3.0))


def test_hurwitz_vs_eigenvalue_oracle():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(1000):
        deg = int(rng.integers(1, 7))
        coeffs = rng.uniform(-2, 2, size=deg + 1)
        if abs(coeffs[-1]) < 1e-3:
            coeffs[-1] = 1.0
        p = P(*coeffs)
        roots = np.roots(p.coeffs[::-1])
        margin = max(roots.real) if len(roots) else -1.0
        if abs(margin) < 1e-9:
            continue  # marginal: excluded by contract
        assert is_hurwitz(p) == (margin < 0), (p, roots)
        checked += 1
    assert checked > 900


def test_companion_examples_and_round_trip():
    f, b = companion(P(1, 2, 1))
    assert f.tolist() == [[0.0, 1.0], [-1.0, -2.0]]
    assert b.tolist() == [0.0, 1.0]
    f, b = companion(P(3, 1))
    assert f.tolist() == [[-3.0]]
    f, _ = companion(P(0, 0, 0, 1))
    assert f[2].tolist() == [0.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        companion(P(1, 2, 2))
    rng = np.random.default_rng(23)
    for _ in range(100):
        deg = int(rng.integers(1, 9))
        a = P(*list(rng.uniform(-2, 2, size=deg)) + [1.0])
        f, _ = companion(a)
        back = np.poly(f)[::-1]  # ascending
        assert max(abs(back - np.array(a.coeffs))) <= 1e-10


def test_relative_degree():
    assert relative_degree(Polynomial.from_roots(1, 1, 1), P(1, 2, 1)) == 1
    assert relative_degree(P(0, 0, 1), P(1)) == 2
    assert relative_degree(P(1, 1), P(1, 1)) == 0


def test_realize_tf_examples():
    ss = realize_tf(P(1), P(1, 1))
    assert ss.a.tolist() == [[-1.0]] and ss.b.tolist() == [1.0]
    assert ss.c.tolist() == [1.0] and ss.d == 0.0
    ss = realize_tf(P(0, 1), P(1, 1))
    assert ss.d == 1.0 and ss.c.tolist() == [-1.0]
    # Q / (k p R) for the cubic plant has unit feedthrough
    ss = realize_tf(Polynomial.from_roots(1, 1, 1), P(1, 2, 1).shift(1))
    assert abs(ss.d - 1.0) < 1e-14
    for w in (0.1, 1.0, 10.0):
        s = 1j * w
        want = Polynomial.from_roots(1, 1, 1)(s) / (s * (s + 1) ** 2)
        assert abs(ss.transfer(s) - want) <= 1e-8 * (1 + abs(want))
    with pytest.raises(ValueError):
        realize_tf(P(0, 0, 1), P(1, 1))


def test_linear_plant_validation():
    Q = Polynomial.from_roots(1, 1, 1)
    with pytest.raises(ValueError):
        LinearPlant(Q, Polynomial.from_roots(1.0, -1.0), 1.0)  # R not Hurwitz
    with pytest.raises(ValueError):
        LinearPlant(Q, P(1, 2, 1), -2.0)
    with pytest.raises(ValueError):
        LinearPlant(P(1, 1), P(1, 2, 1), 1.0)  # deg Q <= deg R
    # non-monic R folds its leading coefficient into the gain
    pl = LinearPlant(Q, P(2, 4, 2), 1.5)
    assert pl.r.coeffs == (1.0, 2.0, 1.0)
    assert pl.k == 3.0


def known_loop(plant, alpha, mu, y0, t_end, cfg=None):
    loop = KnownLoopSystem(plant, ConstantDensity(alpha), mu)
    z0 = loop.initial_state(y0)
    traj = integrate(loop, z0, 0.0, t_end, cfg or IntegratorConfig())
    return traj, [loop.output(z) for z in traj.states]


def test_closed_loop_first_order_matches_reduced_model():
    plant = LinearPlant(P(1, 1), P(1), 1.0)  # ydot = -y + u
    traj, ys = known_loop(plant, 2.0, 0.0, 1.0, 5.0)
    worst = max(abs(y - math.exp(-2.0 * t)) for t, y in zip(traj.times, ys))
    assert worst <= 1e-6


def test_closed_loop_unstable_cubic_matches_reduced_model():
    plant = LinearPlant(Polynomial.from_roots(1, 1, 1), P(1, 2, 1), 1.0)
    traj, ys = known_loop(plant, 1.0, 0.0, 4.0, 10.0)
    worst = max(abs(y - 4.0 * math.exp(-t)) for t, y in zip(traj.times, ys))
    assert worst <= 1e-5


def test_mu_filter_gap_shrinks_with_mu():
    plant = LinearPlant(P(0, 0, 1), P(1), 1.0)  # double integrator, gamma = 2
    gaps = []
    for mu in (0.1, 0.01):
        traj, ys = known_loop(plant, 1.0, mu, 1.0, 10.0)
        gaps.append(max(abs(y - math.exp(-t)) for t, y in zip(traj.times, ys)))
    assert gaps[1] < gaps[0]
    with pytest.raises(ValueError):
        KnownLoopSystem(plant, ConstantDensity(1.0), 0.0)  # gamma > 1 needs mu > 0


def test_cancellation_exactness_randomized_plants():
    rng = np.random.default_rng(31)
    for _ in range(12):
        n = int(rng.integers(2, 5))
        r = Polynomial.from_roots(*(-rng.uniform(0.3, 3.0, size=n - 1)))
        q = Polynomial.from_roots(*rng.uniform(-1.5, 1.5, size=n))
        k = float(rng.uniform(0.5, 2.0))
        try:
            plant = LinearPlant(q, r, k)
        except ValueError:
            continue
        alpha = float(rng.uniform(0.5, 2.0))
        y0 = float(rng.uniform(-3.0, 3.0))
        traj, ys = known_loop(plant, alpha, 0.0, y0, 3.0)
        worst = max(abs(y - y0 * math.exp(-alpha * t)) for t, y in zip(traj.times, ys))
        assert worst <= 1e-6 * max(1.0, abs(y0)), (q, r, k, worst)
