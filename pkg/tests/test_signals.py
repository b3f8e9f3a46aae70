import math

import numpy as np
import pytest

from densys.signals import (
    Affine,
    Constant,
    DoubleExp,
    Exp,
    Product,
    PulseTrain,
    Sinusoid,
    StepSwitch,
    Sum,
    breakpoints,
    eval_signal,
)


def case2_tube_signal():
    # g(t) = (4 e^{-3t} + 1) h(t), h switching 1 -> 0.4 at t = 1
    return Product((Sum((Exp(4.0, -3.0), Constant(1.0))), StepSwitch(1.0, 1.0, 0.4)))


def test_step_switch_values():
    h = StepSwitch(1.0, 1.0, 0.4)
    assert eval_signal(h, 0.5) == 1.0
    assert eval_signal(h, 2.0) == 0.4
    # the switch instant belongs to the "before" branch (t <= 1 case split)
    assert eval_signal(h, 1.0) == 1.0
    assert eval_signal(StepSwitch(1.0, 1.0, 0.4, at_switch="after"), 1.0) == 0.4


def test_exp_at_zero():
    assert eval_signal(Exp(1.0, 1.0), 0.0) == 1.0


def test_case2_signal_at_zero():
    assert eval_signal(case2_tube_signal(), 0.0) == 5.0


def test_pulse_train_values_and_phase():
    p = PulseTrain(2.5)
    assert eval_signal(p, 0.0) == 1.0
    assert eval_signal(p, 2.4) == 1.0
    assert eval_signal(p, 2.5) == -1.0  # closed on the left at each switch
    assert eval_signal(p, 4.9) == -1.0
    assert eval_signal(p, 5.0) == 1.0


def test_breakpoints_examples():
    assert breakpoints(StepSwitch(1.0, 0.0, 1.0), 0.0, 3.0) == [1.0]
    assert breakpoints(Constant(2.0), 0.0, 10.0) == []
    assert breakpoints(PulseTrain(2.5), 0.0, 6.0) == [2.5, 5.0]


def test_breakpoints_open_interval():
    assert breakpoints(PulseTrain(2.5), 0.0, 5.0) == [2.5]
    assert breakpoints(StepSwitch(1.0, 0.0, 1.0), 1.0, 3.0) == []


def test_breakpoints_merge_composites():
    s = Sum((PulseTrain(2.0), StepSwitch(3.0, 1.0, 2.0)))
    assert breakpoints(s, 0.0, 7.0) == [2.0, 3.0, 4.0, 6.0]
    a = Affine(2.0, 1.0, StepSwitch(0.5, 0.0, 1.0))
    assert breakpoints(a, 0.0, 1.0) == [0.5]


def test_breakpoint_nesting_property():
    rng = np.random.default_rng(7)
    s = Product((PulseTrain(1.7), Sum((StepSwitch(2.3, 1.0, 3.0), Sinusoid(1.0, 2.0)))))
    for _ in range(50):
        t0, t1 = sorted(rng.uniform(0.0, 12.0, size=2))
        if t1 - t0 < 1e-6:
            continue
        inner = breakpoints(s, t0, t1)
        lo = max(0.0, t0 - rng.uniform(0.0, 3.0))
        hi = t1 + rng.uniform(0.0, 3.0)
        outer = breakpoints(s, lo, hi)
        assert set(inner) <= set(outer)
        assert inner == sorted(inner)
        assert len(set(inner)) == len(inner)


def test_piecewise_continuity_between_breakpoints():
    # max jump within a breakpoint-free interval shrinks as sampling refines
    s = Product((Sum((Exp(2.0, -0.5), Constant(1.0))), PulseTrain(2.5), Sinusoid(1.5, 3.0)))
    bps = breakpoints(s, 0.0, 6.0)
    segments = zip([0.0] + bps, bps + [6.0])
    for lo, hi in segments:
        jumps = []
        for n in (200, 2000):
            ts = np.linspace(lo + 1e-9, hi - 1e-9, n)
            vals = [eval_signal(s, t) for t in ts]
            jumps.append(max(abs(b - a) for a, b in zip(vals, vals[1:])))
        assert jumps[1] < jumps[0] / 5


def test_signals_defined_for_nonnegative_time_only():
    with pytest.raises(ValueError):
        eval_signal(Constant(1.0), -0.1)
    assert eval_signal(DoubleExp(), 0.0) == math.e
