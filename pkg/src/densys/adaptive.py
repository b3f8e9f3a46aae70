"""Adaptive density-shaped control of plants with unknown parameters.

The loop drives Q(p)y = kR(p)u with u = c'w + rho(y,t), regressor
w = col(V_y, V_u, y) from companion-form filters with characteristic
polynomial R_m, and gradient adaptation cdot = -gain * y * w.  The plant
is simulated as a minimal state-space realization of kR/Q; its true
regressor parameterization (used only by tests and monitors, never by the
controller) makes ydot = k(u - c0'w) hold exactly, and along the loop the
composite function V = y^2/2 + (k/2 gain)|c - c0|^2 satisfies
Vdot = k * rho(y,t) * y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityFn, DensityValue
from .signals import Constant, Exp, Product, PulseTrain, Signal, Sinusoid, StepSwitch, Sum
from . import density as dens
from .plant import LinearPlant, Polynomial, companion, is_hurwitz, poly_divmod
from .sim import IntegratorConfig, Trajectory, integrate


@dataclass(frozen=True)
class AdaptiveDesign:
    """Designer-chosen pieces: filter polynomial, adaptation gain, density."""

    r_m: Polynomial
    gain: float
    rho: DensityFn

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError(f"adaptation gain must be positive, got {self.gain}")
        if not self.r_m.is_monic:
            raise ValueError("R_m must be monic")
        if self.r_m.degree >= 1 and not is_hurwitz(self.r_m):
            raise ValueError("R_m must be Hurwitz")
        if self.rho.dim != 1:
            raise ValueError("adaptive density must be 1-dimensional")

    def filter_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        # degree-0 R_m (first-order plant): no filters, w reduces to (y,)
        if self.r_m.degree == 0:
            return np.zeros((0, 0)), np.zeros(0)
        return companion(self.r_m)


@dataclass(frozen=True)
class TrueParameters:
    """Regressor-order truth (c_y blocks, c_u blocks, k_y scalar) and gain k."""

    c0y: tuple[float, ...]
    c0u: tuple[float, ...]
    k0y: float
    k: float

    @property
    def vector(self) -> tuple[float, ...]:
        return self.c0y + self.c0u + (self.k0y,)


def true_parameters(plant: LinearPlant, r_m: Polynomial) -> TrueParameters:
    """Exact parameters of the filtered plant rewrite ydot = k(u - c0'w).

    Q is split as lambda*R_m + dQ; dividing dQ by R_m gives the scalar
    part k0y and the filtered remainder; dR = R - R_m enters through the
    input filter with a sign that makes the rewrite an identity (checked
    by simulation equivalence in the tests).
    """
    n = plant.order
    if r_m.degree != n - 1:
        raise ValueError(f"deg R_m must be {n - 1}, got {r_m.degree}")
    if not r_m.is_monic or (r_m.degree >= 1 and not is_hurwitz(r_m)):
        raise ValueError("R_m must be monic Hurwitz")
    if plant.relative_degree != 1:
        raise ValueError("the filtered rewrite needs relative degree 1")
    k = plant.k
    q_m = r_m.shift(1)
    d_q = plant.q - q_m
    d_r = plant.r - r_m
    quot, rem = poly_divmod(d_q, r_m)
    if quot.degree > 0:
        raise ValueError("degree bookkeeping failed in the plant rewrite")
    c0y = tuple(v / k for v in rem.padded(n - 1))
    c0u = tuple(-v for v in d_r.padded(n - 1))
    k0y = quot.coeff(0) / k
    return TrueParameters(c0y, c0u, k0y, k)


class AdaptiveLoop:
    """Assembled closed loop; satisfies the integrator's system protocol.

    State layout: plant x_p (n), V_y (n-1), V_u (n-1), c (2n-1).
    """

    def __init__(self, design: AdaptiveDesign, plant: LinearPlant):
        if plant.relative_degree != 1:
            raise ValueError("adaptive scheme covers relative degree 1 only")
        self.design = design
        self.plant = plant
        self.n = plant.order
        self.ss = plant.realization()
        self.F, self.bf = design.filter_matrices()
        self.dim = self.n + 2 * (self.n - 1) + (2 * self.n - 1)
        self._a = tuple(tuple(row) for row in self.ss.a)
        self._b = tuple(self.ss.b)
        self._c = tuple(self.ss.c)
        self._f = tuple(tuple(row) for row in self.F)
        self._bf = tuple(self.bf)
        self._rho_eval = design.rho.evaluate
        self.truth = true_parameters(plant, design.r_m)

    # -- state slicing -------------------------------------------------
    def split(self, z):
        n = self.n
        return (
            z[0:n],
            z[n : 2 * n - 1],
            z[2 * n - 1 : 3 * n - 2],
            z[3 * n - 2 :],
        )

    def output(self, z) -> float:
        return float(sum(ci * zi for ci, zi in zip(self._c, z[: self.n])))

    def regressor(self, z) -> tuple[float, ...]:
        _, vy, vu, _ = self.split(z)
        return tuple(vy) + tuple(vu) + (self.output(z),)

    def control(self, z, t: float):
        """u = c'w + rho(y,t); returns the density fault when rho is not finite."""
        y = self.output(z)
        rv = self.design.rho.evaluate((y,), t)
        if not rv.is_finite:
            return rv
        _, _, _, c = self.split(z)
        w = self.regressor(z)
        return sum(ci * wi for ci, wi in zip(c, w)) + rv.value

    # -- initial conditions --------------------------------------------
    def initial_state(
        self, y0: float, warm_filters: bool = True, compatible_plant: bool = True
    ) -> list[float]:
        """Initial loop state with output y0 and zero parameter estimate.

        Warm filters start at their settled response to the constant pair
        (y0, u0); the compatible plant state solves the linear jet
        conditions that make the filtered rewrite exact from t = 0 (so
        the composite-V identity holds without an initial transient).
        Both use only signals the experimenter can measure or, for the
        plant state, legitimately owns as simulation setup.
        """
        n = self.n
        rv = self.design.rho.evaluate((y0,), 0.0)
        if not rv.is_finite:
            raise ValueError(
                f"initial output y0={y0} lies outside the density domain ({rv.kind})"
            )
        u0 = rv.value  # c(0) = 0 makes c'w vanish
        if warm_filters and n > 1:
            vy0 = np.linalg.solve(self.F, -self.bf * y0)
            vu0 = np.linalg.solve(self.F, -self.bf * u0)
        else:
            vy0 = np.zeros(n - 1)
            vu0 = np.zeros(n - 1)
        if compatible_plant:
            xp0 = self._compatible_plant_state(y0, vy0, vu0)
        else:
            # output-derivative rest: jet (y0, 0, ..., 0)
            obs = np.vstack([np.array(self._c) @ np.linalg.matrix_power(self.ss.a, j) for j in range(n)])
            jet = np.zeros(n)
            jet[0] = y0
            xp0 = np.linalg.solve(obs, jet)
        c0_est = np.zeros(2 * n - 1)
        return [*map(float, xp0), *map(float, vy0), *map(float, vu0), *map(float, c0_est)]

    def _compatible_plant_state(self, y0, vy0, vu0):
        """Solve C x = y0 plus the rewrite-residual jet conditions.

        The residual eps = ydot - k(u - c0'w) is a pure state functional
        (its transfer from u vanishes identically), annihilated by
        R_m(d/dt); zeroing its first n-1 derivatives at t = 0 zeroes it
        forever.
        """
        n = self.n
        A, C = self.ss.a, np.array(self._c)
        F, b = self.F, self.bf
        tp = self.truth
        e_row = np.concatenate(
            (
                C @ A + tp.k * tp.k0y * C,
                tp.k * np.array(tp.c0y),
                tp.k * np.array(tp.c0u),
            )
        )
        a_aug = np.zeros((3 * n - 2, 3 * n - 2))
        a_aug[:n, :n] = A
        a_aug[n : 2 * n - 1, :n] = np.outer(b, C)
        a_aug[n : 2 * n - 1, n : 2 * n - 1] = F
        a_aug[2 * n - 1 :, 2 * n - 1 :] = F
        known = np.concatenate((vy0, vu0))
        rows = [C]
        rhs = [y0]
        v = e_row.copy()
        for _ in range(n - 1):
            rows.append(v[:n])
            rhs.append(-float(v[n:] @ known))
            v = v @ a_aug
        m = np.vstack(rows)
        sol, *_ = np.linalg.lstsq(m, np.array(rhs), rcond=None)
        if np.linalg.norm(m @ sol - np.array(rhs)) > 1e-8 * max(1.0, abs(y0)):
            raise ArithmeticError("no compatible plant initial state exists")
        return sol

    # -- dynamics --------------------------------------------------------
    def rhs(self, z, t: float):
        n = self.n
        nf = n - 1
        y = 0.0
        for ci, zi in zip(self._c, z):
            y += ci * zi
        rv = self._rho_eval((y,), t)
        if not rv.is_finite:
            return rv
        vy = z[n : n + nf]
        vu = z[n + nf : n + 2 * nf]
        c = z[n + 2 * nf :]
        u = rv.value
        ci = 0
        for v in vy:
            u += c[ci] * v
            ci += 1
        for v in vu:
            u += c[ci] * v
            ci += 1
        u += c[ci] * y
        out = []
        for row, bi in zip(self._a, self._b):
            acc = bi * u
            for aij, xj in zip(row, z):
                acc += aij * xj
            out.append(acc)
        for row, bi in zip(self._f, self._bf):
            acc = bi * y
            for fij, vj in zip(row, vy):
                acc += fij * vj
            out.append(acc)
        for row, bi in zip(self._f, self._bf):
            acc = bi * u
            for fij, vj in zip(row, vu):
                acc += fij * vj
            out.append(acc)
        gy = -self.design.gain * y
        for v in vy:
            out.append(gy * v)
        for v in vu:
            out.append(gy * v)
        out.append(gy * y)
        return out

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        pts: set[float] = set()
        for s in self.design.rho.signals():
            pts.update(s.breakpoints(t0, t1))
        return sorted(pts)


@dataclass
class MonitorSeries:
    """Composite-V samples and the identity residual dV/dt - k rho y.

    The residual is a centered difference on the accepted grid and is nan
    at the ends and next to signal breakpoints, where one-sided kinks
    would pollute it.
    """

    times: list[float]
    v: list[float]
    residual: list[float]
    k_rho_y: list[float]


def lyapunov_monitor(traj: Trajectory, loop: AdaptiveLoop) -> MonitorSeries:
    if len(traj) < 3:
        raise ValueError("monitor needs at least three samples")
    tp = loop.truth
    c_true = np.array(tp.vector)
    g = loop.design.gain
    ts = traj.times
    vs: list[float] = []
    krys: list[float] = []
    for t, z in zip(ts, traj.states):
        y = loop.output(z)
        _, _, _, c = loop.split(z)
        dc = np.array(c) - c_true
        vs.append(0.5 * y * y + tp.k / (2.0 * g) * float(dc @ dc))
        rv = loop.design.rho.evaluate((y,), t)
        krys.append(tp.k * rv.value * y if rv.is_finite else math.nan)
    bp = set()
    for ev in traj.events:
        bp.add(ev.time)
    res: list[float] = [math.nan] * len(ts)
    for i in range(1, len(ts) - 1):
        hm = ts[i] - ts[i - 1]
        hp = ts[i + 1] - ts[i]
        if hm <= 0 or hp <= 0:
            continue
        if any(ts[i - 1] <= b <= ts[i + 1] for b in bp):
            continue
        dv = (
            vs[i + 1] * hm / (hp * (hm + hp))
            - vs[i - 1] * hp / (hm * (hm + hp))
            + vs[i] * (hp - hm) / (hp * hm)
        )
        res[i] = dv - krys[i]
    return MonitorSeries(list(ts), vs, res, krys)


def default_plant() -> LinearPlant:
    """The running third-order unstable example plant."""
    return LinearPlant(
        q=Polynomial.from_roots(1.0, 1.0, 1.0),
        r=Polynomial.from_roots(-1.0, -1.0),
        k=1.0,
    )


DEFAULT_FILTER_POLY = Polynomial((1.0, 2.0, 1.0))  # (lambda + 1)^2
DEFAULT_GAIN = 0.1

_CASE_ALPHA = {1: 1.0, 2: 1.0, 3: 5.0, 4: 100.0, 5: 10.0}
_CASE_Y0 = {1: 4.0, 2: 4.0, 3: 4.0, 4: 1.0, 5: 4.0}
_CASE_TEND = {1: 20.0, 2: 10.0, 3: 10.0, 4: 10.0, 5: 10.0}


def case_boundaries(case: int) -> dict[str, Signal]:
    """Boundary/reference signals drawn alongside the output per case."""
    if case == 2:
        g = Product((Sum((Exp(4.0, -3.0), Constant(1.0))), StepSwitch(1.0, 1.0, 0.4)))
        return {"g": g}
    if case == 3:
        return {
            "g_upper": Sum((Exp(4.0, -0.1), Constant(0.1))),
            "g_lower": Sum((Exp(3.0, -0.1), Constant(-0.1))),
        }
    if case == 4:
        return {
            "y_m": Product((Exp(1.0, -0.1), Sinusoid(1.0, 1.0, 0.0), PulseTrain(2.5)))
        }
    if case == 5:
        return {"g": Sum((Exp(2.0, -0.1), Constant(-1.0)))}
    return {}


def case_density(case: int, alpha: float | None = None) -> DensityFn:
    a = _CASE_ALPHA[case] if alpha is None else float(alpha)
    bounds = case_boundaries(case)
    if case == 1:
        return dens.NegLinear(a, Constant(0.0))
    if case == 2:
        return dens.SymLogTube(a, bounds["g"])
    if case == 3:
        # swapped tube fields express the +alpha*ln((gu-y)/(y-gl)) variant
        return dens.LogRatioTube(a, upper=bounds["g_lower"], lower=bounds["g_upper"])
    if case == 4:
        return dens.NegLinear(a, bounds["y_m"])
    if case == 5:
        return dens.NegLogShift(a, bounds["g"])
    raise ValueError(f"unknown adaptive case {case}")


@dataclass
class AdaptiveRunResult:
    case: int
    loop: AdaptiveLoop
    traj: Trajectory
    monitor: MonitorSeries
    boundaries: dict[str, Signal]

    def output_series(self) -> list[float]:
        return [self.loop.output(z) for z in self.traj.states]

    def control_series(self) -> list[float]:
        out = []
        for t, z in zip(self.traj.times, self.traj.states):
            u = self.loop.control(z, t)
            out.append(u if not isinstance(u, DensityValue) else math.nan)
        return out

    def rho_series(self) -> list[float]:
        out = []
        for t, z in zip(self.traj.times, self.traj.states):
            rv = self.loop.design.rho.evaluate((self.loop.output(z),), t)
            out.append(rv.value if rv.is_finite else math.nan)
        return out


def adaptive_case_config(case: int) -> IntegratorConfig:
    """Per-case step bounds: tight h_max keeps the centered-difference
    monitor within budget; the high-gain tracking case is stiffer still."""
    h_max = 1e-3 if case == 4 else 0.01
    return IntegratorConfig(
        rtol=1e-10, atol=1e-12, h_max=h_max, h_init=min(1e-3, h_max)
    )


def run_adaptive_case(
    case: int,
    y0: float | None = None,
    t_end: float | None = None,
    alpha: float | None = None,
    gain: float | None = None,
    plant: LinearPlant | None = None,
    cfg: IntegratorConfig | None = None,
    warm_filters: bool = True,
    compatible_plant: bool = True,
) -> AdaptiveRunResult:
    if case not in _CASE_ALPHA:
        raise ValueError(f"unknown adaptive case {case}")
    plant = plant or default_plant()
    design = AdaptiveDesign(
        DEFAULT_FILTER_POLY, DEFAULT_GAIN if gain is None else float(gain), case_density(case, alpha)
    )
    loop = AdaptiveLoop(design, plant)
    y0 = _CASE_Y0[case] if y0 is None else float(y0)
    t_end = _CASE_TEND[case] if t_end is None else float(t_end)
    cfg = cfg or adaptive_case_config(case)
    z0 = loop.initial_state(y0, warm_filters=warm_filters, compatible_plant=compatible_plant)
    traj = integrate(loop, z0, 0.0, t_end, cfg)
    monitor = lyapunov_monitor(traj, loop)
    return AdaptiveRunResult(case, loop, traj, monitor, case_boundaries(case))
