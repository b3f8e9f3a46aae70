"""Density-system models, the quadratic function V, and region diagnostics.

The vector fields inject one or two density functions; V is fixed at
0.5*x'x, so classification reduces to the sign of Vdot = grad(V) . f,
which for the catalog systems factors through the densities (Scalar:
-rho x^2, Planar: -rho1 x1^2 - rho2 x2^2).  Faults from the densities
(out-of-domain / divergent) propagate so the integrator can reject steps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .density import (
    DIVERGENT,
    OUT_OF_DOMAIN,
    DensityFn,
    DensityValue,
    OOD,
    divergent,
)
from .signals import Signal


@dataclass(frozen=True)
class QuadraticV:
    """V(x) = 0.5 * x'x."""

    dim: int = 1

    def value(self, x) -> float:
        return 0.5 * sum(v * v for v in x)

    def grad(self, x):
        return tuple(x)


class RegionClass(enum.Enum):
    STABLE = "S"
    UNSTABLE = "U"
    EQUILIBRIUM_BOUNDARY = "EQ"
    NO_SOLUTION = "NS"
    ABS_STABLE = "BH"
    ABS_UNSTABLE = "WH"


class Verdict(enum.Enum):
    ATTRACTED = "attracted"
    REPELLED = "repelled"
    NEUTRAL = "neutral"


def _dominant_fault(values) -> DensityValue:
    """Divergent outranks OutOfDomain when several densities fault."""
    fault = None
    for v in values:
        if v.kind == DIVERGENT:
            return v
        if v.kind == OUT_OF_DOMAIN:
            fault = v
    return fault if fault is not None else OOD


class DensitySystem:
    dim: int = 1

    def rhs(self, x, t: float):
        """Vector field value, or the dominating DensityValue fault."""
        raise NotImplementedError

    def densities(self) -> tuple[DensityFn, ...]:
        return ()

    def signals(self) -> tuple[Signal, ...]:
        out: list[Signal] = []
        for d in self.densities():
            out.extend(d.signals())
        return tuple(out)

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        pts: set[float] = set()
        for s in self.signals():
            pts.update(s.breakpoints(t0, t1))
        return sorted(pts)


@dataclass(frozen=True)
class Scalar(DensitySystem):
    """xdot = -rho(x,t) * x."""

    rho: DensityFn
    dim: int = 1

    def rhs(self, x, t):
        v = self.rho.evaluate(x, t)
        if not v.is_finite:
            return v
        return [-v.value * x[0]]

    def densities(self):
        return (self.rho,)


@dataclass(frozen=True)
class ScalarPositive(DensitySystem):
    """Same dynamics restricted to x > 0."""

    rho: DensityFn
    dim: int = 1

    def rhs(self, x, t):
        if x[0] <= 0.0:
            return OOD
        v = self.rho.evaluate(x, t)
        if not v.is_finite:
            return v
        return [-v.value * x[0]]

    def densities(self):
        return (self.rho,)


@dataclass(frozen=True)
class Planar(DensitySystem):
    """x1dot = x2 - rho1 x1,  x2dot = -x1 - rho2 x2."""

    rho1: DensityFn
    rho2: DensityFn
    dim: int = 2

    def rhs(self, x, t):
        v1 = self.rho1.evaluate(x, t)
        v2 = self.rho2.evaluate(x, t)
        if not (v1.is_finite and v2.is_finite):
            return _dominant_fault((v1, v2))
        return [x[1] - v1.value * x[0], -x[0] - v2.value * x[1]]

    def densities(self):
        return (self.rho1, self.rho2)


@dataclass(frozen=True)
class General(DensitySystem):
    """Arbitrary vector field callback f(x, t) -> sequence | DensityValue."""

    f: object
    dim: int = 2

    def rhs(self, x, t):
        return self.f(x, t)


def rhs(sys: DensitySystem, x, t: float):
    if len(x) != sys.dim:
        raise ValueError(f"state dimension {len(x)} does not match system dimension {sys.dim}")
    return sys.rhs(x, t)


def vdot(sys: DensitySystem, x, t: float):
    """grad(V) . f(x,t), or the propagated fault."""
    f = rhs(sys, x, t)
    if isinstance(f, DensityValue):
        return f
    return sum(xi * fi for xi, fi in zip(x, f))


def _vdot_limit(sys: DensitySystem, x, t: float) -> float:
    """Vdot as an extended real, resolving divergent densities to +-inf.

    Returns nan when opposing infinite contributions collide (measure-zero
    configurations); callers map nan to the equilibrium-boundary label.
    """
    if isinstance(sys, (Scalar, ScalarPositive)):
        v = sys.rho.evaluate(x, t)
        if v.kind == DIVERGENT:
            return -v.sign * math.inf * (x[0] * x[0]) if x[0] != 0.0 else 0.0
        return -v.value * x[0] * x[0]
    if isinstance(sys, Planar):
        total = 0.0
        for d, xi in ((sys.rho1, x[0]), (sys.rho2, x[1])):
            v = d.evaluate(x, t)
            if v.kind == DIVERGENT:
                term = -v.sign * math.inf * (xi * xi) if xi != 0.0 else 0.0
            else:
                term = -v.value * xi * xi
            total += term
        return total
    w = vdot(sys, x, t)
    return float(w) if not isinstance(w, DensityValue) else math.nan


def classify(
    sys: DensitySystem,
    v: QuadraticV,
    x,
    t: float,
    eps_eq: float = 1e-9,
) -> RegionClass:
    """Pointwise region label from the sign of Vdot.

    NoSolution wherever any density is out of domain; the equilibrium
    band scales with the state (|Vdot| <= eps_eq * (1 + |x|^2)).
    """
    if len(x) != sys.dim:
        raise ValueError(f"state dimension {len(x)} does not match system dimension {sys.dim}")
    for d in sys.densities():
        if d.evaluate(x, t).kind == OUT_OF_DOMAIN:
            return RegionClass.NO_SOLUTION
    if isinstance(sys, ScalarPositive) and x[0] <= 0.0:
        return RegionClass.NO_SOLUTION
    w = _vdot_limit(sys, x, t)
    if math.isnan(w):
        return RegionClass.EQUILIBRIUM_BOUNDARY
    scale = 1.0 + sum(xi * xi for xi in x)
    if abs(w) <= eps_eq * scale:
        return RegionClass.EQUILIBRIUM_BOUNDARY
    return RegionClass.STABLE if w < 0 else RegionClass.UNSTABLE


@dataclass
class RegionMap:
    axes: tuple[tuple[float, ...], ...]
    classes: list[RegionClass]  # row-major, first axis outermost
    vdots: list[float]  # nan where undefined

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    def points(self):
        if len(self.axes) == 1:
            for x1 in self.axes[0]:
                yield (x1, 0.0)
        else:
            for x1 in self.axes[0]:
                for x2 in self.axes[1]:
                    yield (x1, x2)


def region_map(
    sys: DensitySystem,
    v: QuadraticV,
    bounds,
    grid,
    t: float,
    eps_eq: float = 1e-9,
    divergence_threshold: float = 100.0,
) -> RegionMap:
    """Grid classification with absolute-region post-processing.

    Connected no-solution components whose adjacent resolvable cells are
    all Stable (resp. Unstable) with |Vdot| reaching the divergence
    threshold are relabeled absolutely stable BH (resp. absolutely
    unstable WH): solution-free holes walled off by diverging density.
    """
    bounds = tuple(tuple(map(float, b)) for b in bounds)
    grid = tuple(int(n) for n in grid)
    if len(bounds) != len(grid) or len(bounds) not in (1, 2):
        raise ValueError("bounds and grid must describe 1 or 2 axes")
    for (lo, hi), n in zip(bounds, grid):
        if not lo < hi:
            raise ValueError(f"degenerate bounds ({lo}, {hi})")
        if n < 2:
            raise ValueError("grid needs at least 2 points per axis")
    axes = tuple(
        tuple(lo + (hi - lo) * i / (n - 1) for i in range(n))
        for (lo, hi), n in zip(bounds, grid)
    )
    n1 = grid[0]
    n2 = grid[1] if len(grid) == 2 else 1
    classes: list[RegionClass] = []
    vdots: list[float] = []
    for i in range(n1):
        for j in range(n2):
            if len(grid) == 1:
                x = (axes[0][i],)
            else:
                x = (axes[0][i], axes[1][j])
            cls = classify(sys, v, x, t, eps_eq)
            classes.append(cls)
            if cls == RegionClass.NO_SOLUTION:
                vdots.append(math.nan)
            else:
                w = _vdot_limit(sys, x, t)
                vdots.append(w)
    _relabel_absolute(classes, vdots, n1, n2, divergence_threshold)
    return RegionMap(axes, classes, vdots)


def _relabel_absolute(classes, vdots, n1, n2, threshold):
    idx = lambda i, j: i * n2 + j
    seen = [False] * len(classes)
    for i0 in range(n1):
        for j0 in range(n2):
            k0 = idx(i0, j0)
            if seen[k0] or classes[k0] != RegionClass.NO_SOLUTION:
                continue
            component, stack = [], [(i0, j0)]
            seen[k0] = True
            neighbors: list[int] = []
            while stack:
                i, j = stack.pop()
                component.append(idx(i, j))
                for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    ii, jj = i + di, j + dj
                    if not (0 <= ii < n1 and 0 <= jj < n2):
                        continue
                    kk = idx(ii, jj)
                    if classes[kk] == RegionClass.NO_SOLUTION:
                        if not seen[kk]:
                            seen[kk] = True
                            stack.append((ii, jj))
                    else:
                        neighbors.append(kk)
            if not neighbors:
                continue
            kinds = {classes[k] for k in neighbors}
            peak = max(
                (abs(vdots[k]) for k in neighbors if not math.isnan(vdots[k])),
                default=0.0,
            )
            if peak < threshold:
                continue
            if kinds == {RegionClass.STABLE}:
                label = RegionClass.ABS_STABLE
            elif kinds == {RegionClass.UNSTABLE}:
                label = RegionClass.ABS_UNSTABLE
            else:
                continue
            for k in component:
                classes[k] = label


@dataclass(frozen=True)
class ScalarBoundary:
    """Moving boundary x = w(t); distance is |x - w(t)|."""

    w: Signal

    def distance(self, x, t: float) -> float:
        return abs(x[0] - self.w.value(t))


@dataclass(frozen=True)
class LevelSetBoundary:
    """Level set sum_i |x_i|^beta = level; distance |s - c| / |grad s|."""

    beta: float
    level: object  # Signal or float

    def _level(self, t: float) -> float:
        lvl = self.level
        c = lvl.value(t) if isinstance(lvl, Signal) else float(lvl)
        if c <= 0.0:
            raise ValueError(f"empty level set: level {c} <= 0")
        return c

    def distance(self, x, t: float) -> float:
        c = self._level(t)
        try:
            s = sum(abs(v) ** self.beta for v in x)
            g2 = 0.0
            for v in x:
                av = abs(v)
                if av > 0.0:
                    g2 += (self.beta * av ** (self.beta - 1.0)) ** 2
            gn = math.sqrt(g2)
        except OverflowError:
            return math.inf
        if gn < 1e-12:
            gn = 1.0
        return abs(s - c) / gn


@dataclass
class AttractionReport:
    times: list[float]
    distances: list[float]
    verdict: Verdict

    @property
    def initial_distance(self) -> float:
        return self.distances[0]

    @property
    def final_distance(self) -> float:
        return self.distances[-1]


# Windowed-trend constants: the verdict looks at the last quarter of the
# samples, compares block means with 1e-3 relative slack, and counts a
# trajectory attached to the boundary (within 5% of the peak distance) as
# attracted outright: sliding-mode chatter never trends monotonically.
_TREND_WINDOW = 0.25
_TREND_SLACK = 1e-3
_ATTACH_FLOOR = 0.05


def attraction_report(traj, boundary) -> AttractionReport:
    """Distance-to-boundary series with an attraction verdict."""
    if not traj.times:
        raise ValueError("empty trajectory")
    ds = [boundary.distance(x, t) for t, x in zip(traj.times, traj.states)]
    d0, d_end = ds[0], ds[-1]
    d_max = max(ds)
    verdict = Verdict.NEUTRAL
    if d_max > 0.0:
        tail = ds[int(len(ds) * (1.0 - _TREND_WINDOW)) :]
        if len(tail) >= 4:
            half = len(tail) // 2
            m1 = sum(tail[:half]) / half
            m2 = sum(tail[half:]) / (len(tail) - half)
            slack = _TREND_SLACK * d_max
            if d_end <= _ATTACH_FLOOR * d_max and d_end < d0:
                verdict = Verdict.ATTRACTED
            elif m2 < m1 - slack:
                verdict = Verdict.ATTRACTED if d_end < d0 else Verdict.NEUTRAL
            elif m2 > m1 + slack:
                verdict = Verdict.REPELLED
    return AttractionReport(list(traj.times), ds, verdict)
