import math

import numpy as np
import pytest

from densys.density import (
    Barrier,
    ConstantDensity,
    DensityValue,
    ExpHole,
    Linear,
    LogDisc,
    LogRatioTube,
    LogShift,
    NegLinear,
    NegLogShift,
    PlanarLogRatio,
    PlanarLogShift,
    PolyDisc,
    SymLogTube,
    TrackSign,
    WeightedSign,
    Zero,
    density_sign,
    eval_density,
    validate_density,
)
from densys.signals import Constant, Exp, Sum


def test_barrier_finite_and_divergent():
    b = Barrier(1.0, Constant(2.0))
    v = eval_density(b, (1.0,), 0.0)
    assert v.is_finite and v.value == 1.0
    v = eval_density(b, (2.0,), 0.0)
    assert v.kind == "divergent" and v.sign == +1
    assert eval_density(b, (2.5,), 0.0).kind == "out_of_domain"


def test_log_shift_domain():
    d = LogShift(1.0, Constant(0.0))
    assert eval_density(d, (-1.0,), 0.0).kind == "out_of_domain"
    assert eval_density(d, (0.0,), 0.0) == DensityValue("divergent", sign=-1)
    assert abs(eval_density(d, (math.e,), 0.0).value - 1.0) < 1e-15


def test_exp_hole_inside_disc_undefined():
    # (r^2 - 1) = -1 < 0: fractional negative power has no real value
    assert eval_density(ExpHole(+1), (0.0, 0.0), 0.0).kind == "out_of_domain"
    assert eval_density(ExpHole(+1), (1.0, 0.0), 0.0).kind == "divergent"
    v = eval_density(ExpHole(+1), (1.5, 0.0), 0.0)
    assert v.is_finite and v.value == math.exp(1.25**-0.98)
    # exponential overflow close to the circle counts as the divergence
    v = eval_density(ExpHole(+1), (1.0001, 0.0), 0.0)
    assert v.kind == "divergent" and v.sign == +1


def test_density_sign_examples():
    assert density_sign(Linear(1.0, Constant(1.0)), (2.0,), 0.0) == +1
    tube = LogRatioTube(1.0, Constant(2.0), Constant(1.0))
    assert density_sign(tube, (1.5,), 0.0) == 0
    assert density_sign(LogDisc(+1), (math.sqrt(1.5), 0.0), 0.0) == -1
    assert density_sign(LogShift(1.0, Constant(0.0)), (-1.0,), 0.0) is None
    assert density_sign(Barrier(1.0, Constant(2.0)), (2.0,), 0.0) == +1


def test_tube_zero_iff_midpoint():
    upper, lower = Sum((Constant(2.0), Exp(0.5, -1.0))), Constant(1.0)
    tube = LogRatioTube(1.3, upper, lower)
    for t in (0.0, 0.7, 3.0):
        mid = 0.5 * (upper.value(t) + lower.value(t))
        assert abs(eval_density(tube, (mid,), t).value) < 1e-12
        # bisect the root and confirm it is the midpoint
        lo, hi = lower.value(t) + 1e-9, upper.value(t) - 1e-9
        for _ in range(80):
            m = 0.5 * (lo + hi)
            if eval_density(tube, (m,), t).value > 0:
                lo = m
            else:
                hi = m
        assert abs(0.5 * (lo + hi) - mid) < 1e-9


def test_swapped_tube_fields_flip_sign_keep_domain():
    gu, gl = Constant(4.1), Constant(2.9)
    straight = LogRatioTube(5.0, gu, gl)
    swapped = LogRatioTube(5.0, gl, gu)
    for y in (3.0, 3.5, 4.0):
        a = eval_density(straight, (y,), 0.0)
        b = eval_density(swapped, (y,), 0.0)
        assert a.is_finite and b.is_finite
        assert abs(a.value + b.value) < 1e-12
    for y in (2.8, 4.2):
        assert eval_density(swapped, (y,), 0.0).kind == "out_of_domain"
    # diverging limits swap sides with the swap
    assert eval_density(swapped, (4.1,), 0.0).sign == -1
    assert eval_density(swapped, (2.9,), 0.0).sign == +1


def test_barrier_divergence_monotone_on_slices():
    cases = [
        (Barrier(1.0, Constant(2.0)), [2.0 - 10.0**-k for k in range(2, 9)], 0.0),
        (
            LogRatioTube(1.0, Constant(2.0), Constant(1.0)),
            [2.0 - 10.0**-k for k in range(2, 9)],
            0.0,
        ),
        (SymLogTube(1.0, Constant(1.5)), [1.5 - 10.0**-k for k in range(2, 9)], 0.0),
        (NegLogShift(2.0, Constant(1.0)), [1.0 + 10.0**-k for k in range(2, 9)], 0.0),
    ]
    for d, xs, t in cases:
        mags = [abs(eval_density(d, (x,), t).value) for x in xs]
        assert all(b > a for a, b in zip(mags, mags[1:])), (d, mags)


def test_poly_disc_zero_set_is_unit_circle():
    d = PolyDisc(-1.0, 0.0, 1.0)
    for theta in np.linspace(0.0, 2 * math.pi, 40):
        x = (math.cos(theta), math.sin(theta))
        assert abs(eval_density(d, x, 0.0).value) < 1e-12
    assert eval_density(d, (0.5, 0.0), 0.0).value < 0
    assert eval_density(d, (1.5, 0.0), 0.0).value > 0


def test_sym_log_tube_odd_symmetry():
    d = SymLogTube(0.8, Sum((Constant(2.0), Exp(0.3, -0.2))))
    rng = np.random.default_rng(3)
    for _ in range(200):
        t = rng.uniform(0.0, 5.0)
        g = 2.0 + 0.3 * math.exp(-0.2 * t)
        x = rng.uniform(-g + 1e-6, g - 1e-6)
        a = eval_density(d, (x,), t)
        b = eval_density(d, (-x,), t)
        assert abs(a.value + b.value) < 1e-10 * max(1.0, abs(a.value))


def test_formula_agreement_randomized():
    # each catalog variant agrees with a direct transcription of its formula
    rng = np.random.default_rng(11)
    w = Sum((Constant(2.5), Exp(0.5, -0.3)))
    wv = lambda t: 2.5 + 0.5 * math.exp(-0.3 * t)
    sgn = lambda v: (v > 0) - (v < 0)
    cases = [
        (ConstantDensity(1.7), 1, lambda x, t: 1.7),
        (Barrier(1.2, w), 1, lambda x, t: 1.2 / (wv(t) - abs(x[0]))),
        (TrackSign(0.9, w), 1, lambda x, t: 0.9 * (x[0] - wv(t)) * sgn(x[0])),
        (Linear(1.1, w), 1, lambda x, t: 1.1 * (x[0] - wv(t))),
        (WeightedSign(w), 1, lambda x, t: wv(t) * sgn(x[0] - wv(t))),
        (NegLinear(2.0, w), 1, lambda x, t: -2.0 * (x[0] - wv(t))),
        (LogShift(1.3, Constant(0.5)), 1, lambda x, t: 1.3 * math.log(x[0] - 0.5) if x[0] > 0.5 else None),
        (NegLogShift(1.3, Constant(0.5)), 1, lambda x, t: -1.3 * math.log(x[0] - 0.5) if x[0] > 0.5 else None),
        (
            LogRatioTube(0.7, Constant(2.0), Constant(-1.0)),
            1,
            lambda x, t: -0.7 * math.log((2.0 - x[0]) / (x[0] + 1.0)) if -1 < x[0] < 2 else None,
        ),
        (
            SymLogTube(0.7, Constant(2.0)),
            1,
            lambda x, t: 0.7 * math.log((2.0 - x[0]) / (2.0 + x[0])) if abs(x[0]) < 2 else None,
        ),
        (
            PlanarLogRatio(0.6, Constant(3.0), Constant(1.0)),
            2,
            lambda x, t: -math.log(
                (3.0 - abs(x[0]) ** 0.6 - abs(x[1]) ** 0.6)
                / (abs(x[0]) ** 0.6 + abs(x[1]) ** 0.6 - 1.0)
            )
            if 1.0 < abs(x[0]) ** 0.6 + abs(x[1]) ** 0.6 < 3.0
            else None,
        ),
        (
            PlanarLogShift(20.0, 0.5),
            2,
            lambda x, t: 20.0 * math.log(abs(x[0]) ** 0.5 + abs(x[1]) ** 0.5 - 1.0)
            if abs(x[0]) ** 0.5 + abs(x[1]) ** 0.5 > 1.0
            else None,
        ),
        (
            PolyDisc(-1.0, 1.0, 0.5),
            2,
            lambda x, t: -1.0 + x[0] ** 2 + 0.5 * (x[0] ** 2 + x[1] ** 2),
        ),
        (
            LogDisc(-1),
            2,
            lambda x, t: -math.log(x[0] ** 2 + x[1] ** 2 - 1.0)
            if x[0] ** 2 + x[1] ** 2 > 1.0
            else None,
        ),
        (Zero(2), 2, lambda x, t: 0.0),
    ]
    for d, dim, formula in cases:
        for _ in range(120):
            x = tuple(rng.uniform(-3.0, 3.0, size=dim))
            t = rng.uniform(0.0, 4.0)
            want = formula(x, t)
            got = eval_density(d, x, t)
            if want is None:
                assert not got.is_finite, (d, x, t, got)
            elif got.is_finite:
                assert abs(got.value - want) <= 1e-10 * max(1.0, abs(want)), (d, x, t)


def test_dimension_mismatch_is_a_contract_violation():
    with pytest.raises(ValueError):
        eval_density(Barrier(1.0, Constant(2.0)), (1.0, 2.0), 0.0)
    with pytest.raises(ValueError):
        eval_density(ExpHole(+1), (1.0,), 0.0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        validate_density(Barrier(-1.0, Constant(2.0)))
    with pytest.raises(ValueError):
        validate_density(ExpHole(+1, q=1.5))
    with pytest.raises(ValueError):
        validate_density(LogDisc(0))
    with pytest.raises(ValueError):
        validate_density(PlanarLogRatio(-0.5, Constant(3.0), Constant(1.0)))
