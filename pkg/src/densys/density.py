"""Density-function catalog with guarded evaluation.

Every density evaluates to a ``DensityValue``: a finite number where the
closed-form formula is defined, ``Divergent`` exactly on a one-sided
infinite limit (zero denominator, log argument exactly zero, overflowing
exponential), and ``OutOfDomain`` on sets of positive measure where the
formula is undefined over the reals (negative log arguments, negative base
to a fractional power, denominator past a barrier).  The integrator treats
non-finite values as step rejections, which is what confines trajectories
to the open domains these functions carve out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .signals import Signal

FINITE = "finite"
OUT_OF_DOMAIN = "out_of_domain"
DIVERGENT = "divergent"


@dataclass(frozen=True)
class DensityValue:
    kind: str
    value: float = 0.0
    sign: int = 0

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE


OOD = DensityValue(OUT_OF_DOMAIN)
DIV_POS = DensityValue(DIVERGENT, sign=+1)
DIV_NEG = DensityValue(DIVERGENT, sign=-1)


def finite(v: float) -> DensityValue:
    return DensityValue(FINITE, v)


def divergent(sign: int) -> DensityValue:
    return DIV_POS if sign > 0 else DIV_NEG


class DensityFn:
    """Base class; subclasses set ``dim`` (state dimension, 1 or 2)."""

    dim: int = 1

    def evaluate(self, x, t: float) -> DensityValue:
        raise NotImplementedError

    def signals(self) -> tuple[Signal, ...]:
        return ()


def eval_density(d: DensityFn, x, t: float) -> DensityValue:
    if len(x) != d.dim:
        raise ValueError(f"state dimension {len(x)} does not match density dimension {d.dim}")
    return d.evaluate(x, t)


def density_sign(d: DensityFn, x, t: float, eps_eq: float = 1e-9):
    """Sign in {-1, 0, +1}, or None where the density is undefined."""
    v = eval_density(d, x, t)
    if v.kind == OUT_OF_DOMAIN:
        return None
    if v.kind == DIVERGENT:
        return v.sign
    if abs(v.value) <= eps_eq:
        return 0
    return 1 if v.value > 0 else -1


def _sgn(x: float) -> float:
    # sign(0) = 0 keeps x = 0 (and x = w) exact equilibria of the
    # sign-switched densities.
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def _guarded_log_ratio(num: float, den: float, scale: float) -> DensityValue:
    """scale * ln(num/den) with barrier semantics on the ratio's domain."""
    if num == 0.0 and den == 0.0:
        return OOD
    if num == 0.0:
        # ratio -> 0+ approached from inside: log -> -inf
        return divergent(-1 if scale > 0 else +1)
    if den == 0.0:
        return divergent(+1 if scale > 0 else -1)
    arg = num / den
    if arg < 0.0:
        return OOD
    return finite(scale * math.log(arg))


@dataclass(frozen=True)
class ConstantDensity(DensityFn):
    alpha: float
    dim: int = 1

    def evaluate(self, x, t):
        return finite(self.alpha)


@dataclass(frozen=True)
class Zero(DensityFn):
    dim: int = 2

    def evaluate(self, x, t):
        return finite(0.0)


@dataclass(frozen=True)
class Barrier(DensityFn):
    """alpha / (w(t) - |x|): positive inside the moving band, +inf at it."""

    alpha: float
    w: Signal
    dim: int = 1

    def evaluate(self, x, t):
        den = self.w.value(t) - abs(x[0])
        if den > 0.0:
            return finite(self.alpha / den)
        if den == 0.0:
            return DIV_POS
        return OOD

    def signals(self):
        return (self.w,)


@dataclass(frozen=True)
class TrackSign(DensityFn):
    """alpha * (x - w(t)) * sign(x): equilibria at 0 and at w."""

    alpha: float
    w: Signal
    dim: int = 1

    def evaluate(self, x, t):
        return finite(self.alpha * (x[0] - self.w.value(t)) * _sgn(x[0]))

    def signals(self):
        return (self.w,)


@dataclass(frozen=True)
class LogRatioTube(DensityFn):
    """-alpha * ln((upper(t) - x)/(x - lower(t))).

    Defined wherever the log argument is positive, i.e. strictly between
    the two boundary signals regardless of which field holds the larger
    one.  Swapping the fields flips the overall sign while keeping the
    tube: that is how the positively-signed variant used by the adaptive
    asymmetric-constraint loop is expressed.
    """

    alpha: float
    upper: Signal
    lower: Signal
    dim: int = 1

    def evaluate(self, x, t):
        a = self.upper.value(t) - x[0]
        b = x[0] - self.lower.value(t)
        return _guarded_log_ratio(a, b, -self.alpha)

    def signals(self):
        return (self.upper, self.lower)


@dataclass(frozen=True)
class LogShift(DensityFn):
    """alpha * ln(x - g(t)): defined above g, -> -inf at it."""

    alpha: float
    g: Signal
    dim: int = 1

    def evaluate(self, x, t):
        arg = x[0] - self.g.value(t)
        if arg > 0.0:
            return finite(self.alpha * math.log(arg))
        if arg == 0.0:
            return divergent(-1 if self.alpha > 0 else +1)
        return OOD

    def signals(self):
        return (self.g,)


@dataclass(frozen=True)
class Linear(DensityFn):
    """alpha * (x - w(t))."""

    alpha: float
    w: Signal
    dim: int = 1

    def evaluate(self, x, t):
        return finite(self.alpha * (x[0] - self.w.value(t)))

    def signals(self):
        return (self.w,)


@dataclass(frozen=True)
class WeightedSign(DensityFn):
    """w(t) * sign(x - w(t)): density grows with the boundary itself."""

    w: Signal
    dim: int = 1

    def evaluate(self, x, t):
        wv = self.w.value(t)
        return finite(wv * _sgn(x[0] - wv))

    def signals(self):
        return (self.w,)


@dataclass(frozen=True)
class NegLinear(DensityFn):
    """-alpha * (x - y_m(t)): output-tracking density."""

    alpha: float
    y_m: Signal
    dim: int = 1

    def evaluate(self, x, t):
        return finite(-self.alpha * (x[0] - self.y_m.value(t)))

    def signals(self):
        return (self.y_m,)


@dataclass(frozen=True)
class SymLogTube(DensityFn):
    """alpha * ln((g(t) - x)/(g(t) + x)): symmetric tube |x| < g."""

    alpha: float
    g: Signal
    dim: int = 1

    def evaluate(self, x, t):
        gv = self.g.value(t)
        return _guarded_log_ratio(gv - x[0], gv + x[0], self.alpha)

    def signals(self):
        return (self.g,)


@dataclass(frozen=True)
class NegLogShift(DensityFn):
    """-alpha * ln(x - g(t)): defined above g, -> +inf at it."""

    alpha: float
    g: Signal
    dim: int = 1

    def evaluate(self, x, t):
        arg = x[0] - self.g.value(t)
        if arg > 0.0:
            return finite(-self.alpha * math.log(arg))
        if arg == 0.0:
            return divergent(+1 if self.alpha > 0 else -1)
        return OOD

    def signals(self):
        return (self.g,)


@dataclass(frozen=True)
class PlanarLogRatio(DensityFn):
    """-ln((upper(t) - s)/(s - lower(t))) with s = |x1|^beta + |x2|^beta."""

    beta: float
    upper: Signal
    lower: Signal
    dim: int = 2

    def evaluate(self, x, t):
        s = abs(x[0]) ** self.beta + abs(x[1]) ** self.beta
        a = self.upper.value(t) - s
        b = s - self.lower.value(t)
        return _guarded_log_ratio(a, b, -1.0)

    def signals(self):
        return (self.upper, self.lower)


@dataclass(frozen=True)
class PlanarLogShift(DensityFn):
    """alpha * ln(|x1|^beta + |x2|^beta - 1)."""

    alpha: float
    beta: float
    dim: int = 2

    def evaluate(self, x, t):
        arg = abs(x[0]) ** self.beta + abs(x[1]) ** self.beta - 1.0
        if arg > 0.0:
            return finite(self.alpha * math.log(arg))
        if arg == 0.0:
            return divergent(-1 if self.alpha > 0 else +1)
        return OOD


@dataclass(frozen=True)
class PolyDisc(DensityFn):
    """c0 + c1*x1^2 + c2*(x1^2 + x2^2): the polynomial disc family."""

    c0: float
    c1: float
    c2: float
    dim: int = 2

    def evaluate(self, x, t):
        r2 = x[0] * x[0] + x[1] * x[1]
        return finite(self.c0 + self.c1 * x[0] * x[0] + self.c2 * r2)


@dataclass(frozen=True)
class ExpHole(DensityFn):
    """sign * e^((x1^2 + x2^2 - 1)^(-q)): essential singularity at the unit circle.

    Undefined inside the disc (negative base to a fractional power); the
    exponential overflows to a divergence long before r reaches 1.
    """

    sign: int
    q: float = 0.98
    dim: int = 2

    def evaluate(self, x, t):
        u = x[0] * x[0] + x[1] * x[1] - 1.0
        if u < 0.0:
            return OOD
        if u == 0.0:
            return divergent(self.sign)
        try:
            e = math.exp(u ** (-self.q))
        except OverflowError:
            return divergent(self.sign)
        return finite(self.sign * e)


@dataclass(frozen=True)
class LogDisc(DensityFn):
    """sign * ln(x1^2 + x2^2 - 1): logarithmic divergence at the unit circle."""

    sign: int
    dim: int = 2

    def evaluate(self, x, t):
        u = x[0] * x[0] + x[1] * x[1] - 1.0
        if u > 0.0:
            return finite(self.sign * math.log(u))
        if u == 0.0:
            return divergent(-self.sign)
        return OOD


def validate_density(d: DensityFn) -> None:
    """Parameter invariants shared by the catalog."""
    alpha = getattr(d, "alpha", None)
    if alpha is not None and alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    beta = getattr(d, "beta", None)
    if beta is not None and beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if isinstance(d, ExpHole) and not 0 < d.q < 1:
        raise ValueError(f"q must lie in (0,1), got {d.q}")
    if isinstance(d, (ExpHole, LogDisc)) and d.sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {d.sign}")
