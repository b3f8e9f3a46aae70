"""Barrier-aware adaptive ODE integration.

Embedded Dormand-Prince 5(4) pair with PI step control.  Stage
evaluations that hit a density fault (out-of-domain or divergent) reject
the step and shrink it geometrically; if the step floor is reached while
progress is impossible the run terminates gracefully with a BarrierStall
event -- the expected end state for trajectories asymptoting to a
barrier, not an error.  Integration is split at every signal breakpoint
so no step straddles a discontinuity, and each breakpoint lands exactly
on a sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .density import DensityValue

EVENT_SIGNAL_SWITCH = "SignalSwitch"
EVENT_BARRIER_STALL = "BarrierStall"
EVENT_DOMAIN_FAULT = "DomainFault"
EVENT_STEP_LIMIT = "StepLimit"

REASON_COMPLETED = "completed"
REASON_BARRIER_STALL = "barrier_stall"
REASON_STEP_LIMIT = "step_limit"
REASON_DOMAIN_FAULT = "domain_fault_at_start"


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-8
    atol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.1
    max_steps: int = 5_000_000
    barrier_shrink: float = 0.5

    def __post_init__(self):
        if not 0 < self.h_min <= self.h_init <= self.h_max:
            raise ValueError(
                f"need 0 < h_min <= h_init <= h_max, got ({self.h_min}, {self.h_init}, {self.h_max})"
            )
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("rtol and atol must be positive")
        if not 0 < self.barrier_shrink < 1:
            raise ValueError(f"barrier_shrink must lie in (0,1), got {self.barrier_shrink}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    def with_overrides(self, **kw) -> "IntegratorConfig":
        data = {
            "rtol": self.rtol,
            "atol": self.atol,
            "h_init": self.h_init,
            "h_min": self.h_min,
            "h_max": self.h_max,
            "max_steps": self.max_steps,
            "barrier_shrink": self.barrier_shrink,
        }
        data.update({k: v for k, v in kw.items() if v is not None})
        data["h_init"] = min(data["h_init"], data["h_max"])
        return IntegratorConfig(**data)


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    detail: str = ""


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[tuple[float, ...]] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    terminated_reason: str = REASON_COMPLETED

    @property
    def final_time(self) -> float:
        return self.times[-1]

    @property
    def final_state(self) -> tuple[float, ...]:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.times)


# Dormand-Prince 5(4) tableau (5th-order solution propagated, FSAL).
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4C, _B5C, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    35 / 384 - 5179 / 57600,
    500 / 1113 - 7571 / 16695,
    125 / 192 - 393 / 640,
    -2187 / 6784 + 92097 / 339200,
    11 / 84 - 187 / 2100,
    -1 / 40,
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


def _all_finite(v) -> bool:
    for x in v:
        if x - x != 0.0:  # nan or inf
            return False
    return True


def integrate(system, x0, t0: float, t1: float, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate ``system`` (rhs/dim/breakpoints protocol) over [t0, t1].

    Raises ValueError when the initial state itself faults; downstream
    faults, stalls, and the step budget terminate the trajectory
    gracefully with the corresponding event.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got ({t0}, {t1})")
    x = [float(v) for v in x0]
    if len(x) != system.dim:
        raise ValueError(f"state dimension {len(x)} does not match system dimension {system.dim}")
    f0 = system.rhs(x, t0)
    if isinstance(f0, DensityValue):
        raise ValueError(f"initial state faults the vector field: {f0.kind} at t={t0}")

    traj = Trajectory()
    traj.times.append(t0)
    traj.states.append(tuple(x))

    bps = [tb for tb in system.breakpoints(t0, t1) if t0 + 1e-12 < tb < t1 - 1e-12]
    seg_ends = bps + [t1]

    n = len(x)
    steps = 0
    t = t0
    for seg_idx, t_end in enumerate(seg_ends):
        if seg_idx > 0:
            traj.events.append(Event(t, EVENT_SIGNAL_SWITCH))
        h = min(cfg.h_init, cfg.h_max, t_end - t)
        err_prev = 1.0
        k1 = system.rhs(x, t)  # right-limit values on a fresh segment
        if isinstance(k1, DensityValue):
            # state invalid for the post-switch branch: no continuation
            traj.events.append(Event(t, EVENT_BARRIER_STALL, f"fault at segment start: {k1.kind}"))
            traj.terminated_reason = REASON_BARRIER_STALL
            return traj
        while t < t_end - 1e-14 * max(1.0, abs(t_end)):
            if steps >= cfg.max_steps:
                traj.events.append(Event(t, EVENT_STEP_LIMIT, f"{cfg.max_steps} steps"))
                traj.terminated_reason = REASON_STEP_LIMIT
                return traj
            steps += 1
            clipped = False
            # land exactly on the segment end once the step reaches it;
            # the 1.01 margin absorbs would-be micro-remainders without
            # re-inflating a step the error control just rejected
            if 1.01 * h >= t_end - t:
                h = t_end - t
                clipped = True

            fault = None
            k2 = k3 = k4 = k5 = k6 = k7 = None
            x_new = None
            rng = range(n)
            for stage in (2, 3, 4, 5, 6, 7):
                if stage == 2:
                    xs = [x[j] + h * _A21 * k1[j] for j in rng]
                    tc = t + _C2 * h
                elif stage == 3:
                    xs = [x[j] + h * (_A31 * k1[j] + _A32 * k2[j]) for j in rng]
                    tc = t + _C3 * h
                elif stage == 4:
                    xs = [
                        x[j] + h * (_A41 * k1[j] + _A42 * k2[j] + _A43 * k3[j])
                        for j in rng
                    ]
                    tc = t + _C4 * h
                elif stage == 5:
                    xs = [
                        x[j]
                        + h
                        * (_A51 * k1[j] + _A52 * k2[j] + _A53 * k3[j] + _A54 * k4[j])
                        for j in rng
                    ]
                    tc = t + _C5 * h
                elif stage == 6:
                    xs = [
                        x[j]
                        + h
                        * (
                            _A61 * k1[j]
                            + _A62 * k2[j]
                            + _A63 * k3[j]
                            + _A64 * k4[j]
                            + _A65 * k5[j]
                        )
                        for j in rng
                    ]
                    tc = t + h
                else:
                    xs = [
                        x[j]
                        + h
                        * (
                            _B1 * k1[j]
                            + _B3 * k3[j]
                            + _B4C * k4[j]
                            + _B5C * k5[j]
                            + _B6 * k6[j]
                        )
                        for j in rng
                    ]
                    tc = t + h
                    x_new = xs
                if not _all_finite(xs):
                    fault = DensityValue("divergent", sign=0)
                    break
                f = system.rhs(xs, tc)
                if isinstance(f, DensityValue):
                    fault = f
                    break
                if stage == 2:
                    k2 = f
                elif stage == 3:
                    k3 = f
                elif stage == 4:
                    k4 = f
                elif stage == 5:
                    k5 = f
                elif stage == 6:
                    k6 = f
                else:
                    k7 = f

            if fault is not None:
                h_new = h * cfg.barrier_shrink
                if h_new < cfg.h_min:
                    traj.events.append(
                        Event(t, EVENT_BARRIER_STALL, f"h below h_min with persistent {fault.kind}")
                    )
                    traj.terminated_reason = REASON_BARRIER_STALL
                    return traj
                h = h_new
                continue

            err = 0.0
            rtol, atol = cfg.rtol, cfg.atol
            for j in rng:
                e_j = h * (
                    _E1 * k1[j]
                    + _E3 * k3[j]
                    + _E4 * k4[j]
                    + _E5 * k5[j]
                    + _E6 * k6[j]
                    + _E7 * k7[j]
                )
                xj, xnj = x[j], x_new[j]
                axj = xj if xj >= 0 else -xj
                axn = xnj if xnj >= 0 else -xnj
                sc = atol + rtol * (axj if axj > axn else axn)
                r = e_j / sc
                err += r * r
            err = (err / n) ** 0.5

            if err <= 1.0 and _all_finite(x_new):
                t = t_end if clipped else t + h
                x = x_new
                traj.times.append(t)
                traj.states.append(tuple(x))
                k1 = k7
                fac = _SAFETY * (err ** -_PI_ALPHA if err > 0 else _FAC_MAX) * (
                    err_prev**_PI_BETA
                )
                h = min(cfg.h_max, h * min(_FAC_MAX, max(_FAC_MIN, fac)))
                err_prev = max(err, 1e-4)
            else:
                if not _all_finite(x_new):
                    fac = _FAC_MIN
                else:
                    fac = max(0.1, min(0.9, _SAFETY * err**-0.2))
                h_new = h * fac
                if h_new < cfg.h_min:
                    traj.events.append(
                        Event(t, EVENT_BARRIER_STALL, f"h below h_min with error {err:.3g}")
                    )
                    traj.terminated_reason = REASON_BARRIER_STALL
                    return traj
                h = h_new
    traj.terminated_reason = REASON_COMPLETED
    return traj


def _integrate_one(args):
    system, seed, t0, t1, cfg = args
    try:
        return integrate(system, seed, t0, t1, cfg)
    except ValueError as exc:
        traj = Trajectory(
            times=[t0],
            states=[tuple(float(v) for v in seed)],
            events=[Event(t0, EVENT_DOMAIN_FAULT, str(exc))],
            terminated_reason=REASON_DOMAIN_FAULT,
        )
        return traj


def sweep(system, seeds, t0: float, t1: float, cfg: IntegratorConfig | None = None, jobs: int = 1):
    """One trajectory per seed; a faulting seed records its failure instead
    of aborting the sweep.  Results are ordered by seed index."""
    work = [(system, seed, t0, t1, cfg) for seed in seeds]
    if jobs > 1 and len(work) > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_integrate_one, work))
    return [_integrate_one(w) for w in work]
