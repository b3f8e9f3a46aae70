"""Polynomial-operator plants Q(p)y = k R(p)u and the known-parameter loops.

Polynomials are real, stored ascending.  Stability testing is a Routh
array with exact zero-pivot handling (marginal polynomials report
unstable); realizations are controllable canonical with a feedthrough
split, post-checked against the rational function on the imaginary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityFn, DensityValue
from .signals import Signal


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients ascending; canonical (no trailing zeros)."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        while c and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> float:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.coeffs[-1] == 1.0

    def coeff(self, k: int) -> float:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    def padded(self, n: int) -> tuple[float, ...]:
        return tuple(self.coeff(k) for k in range(n))

    def __call__(self, s):
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * s + c
        return out

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coeff(k) + other.coeff(k) for k in range(n)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coeff(k) - other.coeff(k) for k in range(n)))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial(())
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def scale(self, a: float) -> "Polynomial":
        return Polynomial(tuple(a * c for c in self.coeffs))

    def shift(self, k: int = 1) -> "Polynomial":
        """Multiply by lambda^k."""
        if self.is_zero:
            return self
        return Polynomial((0.0,) * k + self.coeffs)

    def monic(self) -> "Polynomial":
        return self.scale(1.0 / self.leading)

    @staticmethod
    def from_roots(*roots: float) -> "Polynomial":
        p = Polynomial((1.0,))
        for r in roots:
            p = p * Polynomial((-r, 1.0))
        return p


def poly_divmod(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Long division a = q*b + r with deg r < deg b."""
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    db, lb = len(b.coeffs) - 1, b.leading
    if len(r) - 1 < db:
        return Polynomial(()), a
    q = [0.0] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        f = r[i] / lb
        q[i - db] = f
        for j in range(db + 1):
            r[i - db + j] -= f * b.coeffs[j]
        r[i] = 0.0
    return Polynomial(tuple(q)), Polynomial(tuple(r[:db]))


def is_hurwitz(a: Polynomial) -> bool:
    """Routh test: True iff all roots lie strictly in the open left half plane.

    Zero pivots (marginal polynomials, imaginary-axis roots) report False.
    """
    if a.degree < 1:
        raise ValueError("Hurwitz test needs degree >= 1")
    c = list(a.coeffs)
    if c[-1] < 0:
        c = [-v for v in c]
    # necessary condition: every coefficient strictly positive
    if any(v <= 0.0 for v in c):
        return False
    d = c[::-1]  # descending
    row0 = d[0::2]
    row1 = d[1::2]
    width = len(row0)
    row1 += [0.0] * (width - len(row1))
    for _ in range(len(d) - 2):
        if row1[0] == 0.0:
            return False
        nxt = [
            (row1[0] * row0[k + 1] - row0[0] * row1[k + 1]) / row1[0]
            if k + 1 < width
            else 0.0
            for k in range(width)
        ]
        if nxt[0] <= 0.0:
            return False
        row0, row1 = row1, nxt
    return True


def relative_degree(q: Polynomial, r: Polynomial) -> int:
    if q.is_zero or r.is_zero:
        raise ValueError("relative degree needs nonzero polynomials")
    return int(q.degree - r.degree)


def companion(a: Polynomial) -> tuple[np.ndarray, np.ndarray]:
    """Bottom-row companion matrix F of a monic polynomial, with b = e_d.

    char(F) = a; drives the regressor filters Vdot = F V + b (input).
    """
    if not a.is_monic:
        raise ValueError("companion form needs a monic polynomial")
    d = int(a.degree)
    if d < 1:
        raise ValueError("companion form needs degree >= 1")
    F = np.zeros((d, d))
    for i in range(d - 1):
        F[i, i + 1] = 1.0
    F[d - 1, :] = [-a.coeffs[k] for k in range(d)]
    b = np.zeros(d)
    b[d - 1] = 1.0
    return F, b


@dataclass(frozen=True)
class StateSpace:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float

    @property
    def order(self) -> int:
        return self.a.shape[0]

    def transfer(self, s: complex) -> complex:
        if self.order == 0:
            return complex(self.d)
        m = s * np.eye(self.order) - self.a
        return complex(self.c @ np.linalg.solve(m, self.b) + self.d)


_TF_CHECK_POINTS = (0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0)


def realize_tf(num: Polynomial, den: Polynomial) -> StateSpace:
    """Controllable canonical realization of a proper rational function.

    Feedthrough comes from the polynomial division's scalar quotient; the
    strictly proper remainder fills the output row.  The realization is
    verified against direct rational evaluation at eight imaginary-axis
    points (1e-8 relative) before being returned.
    """
    if den.is_zero:
        raise ValueError("denominator must be nonzero")
    if num.degree > den.degree:
        raise ValueError(
            f"improper fraction: deg num {num.degree} > deg den {den.degree}"
        )
    lead = den.leading
    if den.degree == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros(0), np.zeros(0), num.coeff(0) / lead)
    q, r = poly_divmod(num, den)
    d = q.coeff(0)
    den_m = den.monic()
    n = int(den_m.degree)
    a, b = companion(den_m)
    c = np.array(r.scale(1.0 / lead).padded(n))
    ss = StateSpace(a, b, c, d)
    for w in _TF_CHECK_POINTS:
        s = 1j * w
        dv = den(s)
        if abs(dv) < 1e-12:
            continue
        want = num(s) / dv
        got = ss.transfer(s)
        if abs(got - want) > 1e-8 * (1.0 + abs(want)):
            raise ArithmeticError(
                f"realization mismatch at s={s}: {got} vs {want}"
            )
    return ss


@dataclass(frozen=True)
class LinearPlant:
    """SISO plant Q(p) y = k R(p) u, R Hurwitz, k > 0, relative degree >= 1.

    R is normalized monic on construction (its leading coefficient is
    absorbed into the high-frequency gain).
    """

    q: Polynomial
    r: Polynomial
    k: float

    def __post_init__(self):
        if self.q.is_zero or self.r.is_zero:
            raise ValueError("Q and R must be nonzero")
        if not self.q.is_monic:
            raise ValueError("Q must be monic")
        if not self.r.is_monic:
            object.__setattr__(self, "k", self.k * self.r.leading)
            object.__setattr__(self, "r", self.r.monic())
        if self.k <= 0:
            raise ValueError(f"high-frequency gain must be positive, got {self.k}")
        if self.q.degree <= self.r.degree:
            raise ValueError("need deg Q > deg R")
        if self.r.degree >= 1 and not is_hurwitz(self.r):
            raise ValueError("R must be Hurwitz")

    @property
    def order(self) -> int:
        return int(self.q.degree)

    @property
    def relative_degree(self) -> int:
        return relative_degree(self.q, self.r)

    def realization(self) -> StateSpace:
        """Minimal-order controllable canonical realization of kR/Q."""
        return realize_tf(self.r.scale(self.k), self.q)


class KnownLoopSystem:
    """Closed loop of a known plant under the density-shaping controller.

    The controller is the dynamic block Q/(k p R (mu p + 1)^(gamma-1)) fed
    by -rho(y,t)*y; cascaded with the plant it reduces, from a
    transient-free start, to ydot = -(1/(mu p + 1)^(gamma-1)) rho y.
    """

    def __init__(self, plant: LinearPlant, rho: DensityFn, mu: float):
        if rho.dim != 1:
            raise ValueError("known-parameter loop needs a 1-dimensional density")
        gamma = plant.relative_degree
        if gamma > 1 and mu <= 0:
            raise ValueError(f"relative degree {gamma} > 1 requires mu > 0")
        if mu < 0:
            raise ValueError(f"mu must be nonnegative, got {mu}")
        ctrl_den = plant.r.scale(plant.k).shift(1)
        for _ in range(gamma - 1):
            ctrl_den = ctrl_den * Polynomial((1.0, mu))
        ctrl = realize_tf(plant.q, ctrl_den)
        pl = plant.realization()
        nc, npl = ctrl.order, pl.order
        n = nc + npl
        a = np.zeros((n, n))
        a[:nc, :nc] = ctrl.a
        a[nc:, nc:] = pl.a
        a[nc:, :nc] = np.outer(pl.b, ctrl.c)
        bvec = np.concatenate([ctrl.b, pl.b * ctrl.d])
        cvec = np.concatenate([np.zeros(nc), pl.c])
        self.plant = plant
        self.rho = rho
        self.mu = mu
        self.a = a
        self.b = bvec
        self.c = cvec
        self.dim = n
        self._a_rows = tuple(tuple(row) for row in a)
        self._b = tuple(bvec)
        self._c = tuple(cvec)

    def initial_state(self, y0: float) -> list[float]:
        """Transient-free start: state in the integrator-mode subspace.

        Solves A z = 0, C z = y0 (min-norm).  Putting the full output on
        the cascade's pure-integrator mode leaves every cancelled plant
        and controller mode at rest, which is what makes the closed loop
        realize the reduced model exactly in exact arithmetic.
        """
        m = np.vstack([self.a, self.c])
        rhs = np.zeros(self.dim + 1)
        rhs[-1] = y0
        z0, *_ = np.linalg.lstsq(m, rhs, rcond=None)
        res = m @ z0 - rhs
        if np.linalg.norm(res) > 1e-8 * max(1.0, abs(y0)):
            raise ArithmeticError("no transient-free initial state found")
        return list(z0)

    def output(self, z) -> float:
        return float(sum(ci * zi for ci, zi in zip(self._c, z)))

    def rhs(self, z, t: float):
        y = self.output(z)
        rv = self.rho.evaluate((y,), t)
        if not rv.is_finite:
            return rv
        v = -rv.value * y
        return [
            sum(aij * zj for aij, zj in zip(row, z)) + bi * v
            for row, bi in zip(self._a_rows, self._b)
        ]

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        pts: set[float] = set()
        for s in self.rho.signals():
            pts.update(s.breakpoints(t0, t1))
        return sorted(pts)
