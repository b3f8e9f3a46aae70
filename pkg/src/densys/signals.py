"""Piecewise-continuous time signals: moving boundaries, references, switches.

Signals are immutable expression trees evaluated for t >= 0.  Every
discontinuity inside a finite window is reported exactly by
``breakpoints`` so the integrator can split steps at switches instead of
stepping across them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class Signal:
    """Base class for time-signal expression nodes."""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        """Discontinuity times strictly inside (t0, t1), increasing."""
        return []


def eval_signal(s: Signal, t: float) -> float:
    if t < 0:
        raise ValueError(f"signals are defined for t >= 0, got t={t}")
    return s.value(t)


def breakpoints(s: Signal, t0: float, t1: float) -> list[float]:
    if not t0 < t1:
        raise ValueError(f"need t0 < t1, got ({t0}, {t1})")
    return s.breakpoints(t0, t1)


@dataclass(frozen=True)
class Constant(Signal):
    c: float

    def value(self, t):
        return self.c


@dataclass(frozen=True)
class Exp(Signal):
    """scale * e^(rate*t)."""

    scale: float = 1.0
    rate: float = 1.0

    def value(self, t):
        return self.scale * math.exp(self.rate * t)


@dataclass(frozen=True)
class DoubleExp(Signal):
    """e^(e^t) -- the unbounded reference with unbounded growth rate."""

    def value(self, t):
        return math.exp(math.exp(t))


@dataclass(frozen=True)
class Sinusoid(Signal):
    """amplitude * sin(omega*t + phase)."""

    amplitude: float = 1.0
    omega: float = 1.0
    phase: float = 0.0

    def value(self, t):
        return self.amplitude * math.sin(self.omega * t + self.phase)


@dataclass(frozen=True)
class StepSwitch(Signal):
    """Single switch at t_switch: `before` then `after`.

    ``at_switch`` fixes the closed side.  The default "before" makes the
    pre-interval closed on the right (value(t_switch) == before), matching
    a case split written as "t <= t_s".
    """

    t_switch: float
    before: float
    after: float
    at_switch: str = "before"

    def __post_init__(self):
        if self.at_switch not in ("before", "after"):
            raise ValueError(f"at_switch must be 'before' or 'after', got {self.at_switch!r}")

    def value(self, t):
        if t < self.t_switch:
            return self.before
        if t > self.t_switch:
            return self.after
        return self.before if self.at_switch == "before" else self.after

    def breakpoints(self, t0, t1):
        return [self.t_switch] if t0 < self.t_switch < t1 else []


@dataclass(frozen=True)
class PulseTrain(Signal):
    """Rectangular pulse generator alternating between two levels.

    ``period`` is the dwell time per level (the "switching period"): the
    output holds levels[0] on [0, period), levels[1] on [period, 2*period),
    and so on; closed on the left at each switch.
    """

    period: float
    levels: tuple[float, float] = (1.0, -1.0)

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")

    def value(self, t):
        k = int(math.floor(t / self.period))
        return self.levels[k % 2]

    def breakpoints(self, t0, t1):
        out = []
        k = max(1, int(math.floor(t0 / self.period)) + 1)
        while k * self.period < t1:
            tk = k * self.period
            if tk > t0:
                out.append(tk)
            k += 1
        return out


@dataclass(frozen=True)
class Sum(Signal):
    terms: tuple[Signal, ...]

    def value(self, t):
        return sum(s.value(t) for s in self.terms)

    def breakpoints(self, t0, t1):
        return _merge(self.terms, t0, t1)


@dataclass(frozen=True)
class Product(Signal):
    factors: tuple[Signal, ...]

    def value(self, t):
        out = 1.0
        for s in self.factors:
            out *= s.value(t)
        return out

    def breakpoints(self, t0, t1):
        return _merge(self.factors, t0, t1)


@dataclass(frozen=True)
class Affine(Signal):
    """scale * inner(t) + offset."""

    scale: float
    offset: float
    inner: Signal

    def value(self, t):
        return self.scale * self.inner.value(t) + self.offset

    def breakpoints(self, t0, t1):
        return self.inner.breakpoints(t0, t1)


def _merge(children: tuple[Signal, ...], t0: float, t1: float) -> list[float]:
    pts: set[float] = set()
    for s in children:
        pts.update(s.breakpoints(t0, t1))
    return sorted(pts)
