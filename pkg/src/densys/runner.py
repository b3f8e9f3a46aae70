"""Scenario execution: simulate, write CSV artifacts, optionally render figures.

Output files are tracked and removed if the run fails partway, so a
nonzero exit never leaves partial artifacts behind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .adaptive import adaptive_case_config, run_adaptive_case
from .config import Scenario
from .csvio import (
    fmt,
    write_adaptive_csv,
    write_regionmap_csv,
    write_series_csv,
    write_trajectory_csv,
)
from .density import DensityValue
from .plant import KnownLoopSystem
from .sim import (
    REASON_DOMAIN_FAULT,
    REASON_STEP_LIMIT,
    IntegratorConfig,
    integrate,
    sweep,
)
from .systems import QuadraticV, Scalar, attraction_report, region_map

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3


@dataclass
class RunOutcome:
    exit_code: int = EXIT_OK
    files: list[Path] = field(default_factory=list)
    summary: str = ""
    trajectories: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def _mu_tag(mu: float) -> str:
    return fmt(mu).replace("-", "m").replace("+", "")


def run_scenario(
    sc: Scenario,
    sid: str,
    out_dir: str | Path,
    jobs: int = 1,
    plot: bool = False,
    rtol: float | None = None,
    atol: float | None = None,
    t_end: float | None = None,
) -> RunOutcome:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outcome = RunOutcome()
    try:
        _execute(sc, sid, out, jobs, plot, rtol, atol, t_end, outcome)
    except Exception:
        for f in outcome.files:
            try:
                f.unlink()
            except OSError:
                pass
        raise
    if outcome.exit_code != EXIT_OK:
        for f in outcome.files:
            try:
                f.unlink()
            except OSError:
                pass
        outcome.files = []
    return outcome


def _execute(sc, sid, out, jobs, plot, rtol, atol, t_end_cli, outcome):
    t_end = t_end_cli if t_end_cli is not None else sc.t_end
    if sc.kind in ("scalar", "scalar_positive", "planar"):
        cfg = (sc.integrator or IntegratorConfig()).with_overrides(rtol=rtol, atol=atol)
        _run_sim(sc, sid, out, jobs, plot, cfg, t_end, outcome)
    elif sc.kind == "known_loop":
        cfg = (sc.integrator or IntegratorConfig()).with_overrides(rtol=rtol, atol=atol)
        _run_known(sc, sid, out, plot, cfg, t_end, outcome)
    else:
        cfg = (sc.integrator or adaptive_case_config(sc.case)).with_overrides(rtol=rtol, atol=atol)
        _run_adaptive(sc, sid, out, plot, cfg, t_end, outcome)


def _run_sim(sc, sid, out, jobs, plot, cfg, t_end, outcome):
    trajs = []
    if sc.seeds:
        trajs = sweep(sc.system, sc.seeds, sc.t0, t_end, cfg, jobs=jobs)
        if len(trajs) == 1:
            paths = [out / f"{sid}_traj.csv"]
        else:
            paths = [out / f"{sid}_seed{k}_traj.csv" for k in range(len(trajs))]
        for p, tr in zip(paths, trajs):
            write_trajectory_csv(p, tr, sc.system)
            outcome.files.append(p)
    rm = None
    if sc.region is not None:
        rm = region_map(
            sc.system,
            QuadraticV(sc.system.dim),
            sc.region["bounds"],
            sc.region["grid"],
            sc.region["at"],
            divergence_threshold=sc.region["divergence_threshold"],
        )
        p = out / f"{sid}_regionmap.csv"
        write_regionmap_csv(p, rm)
        outcome.files.append(p)
        outcome.extras["region_map"] = rm

    bits = []
    for k, tr in enumerate(trajs):
        tag = f"seed{k}: " if len(trajs) > 1 else ""
        state = ",".join(fmt(v) for v in tr.final_state)
        bits.append(f"{tag}{tr.terminated_reason} at t={fmt(tr.final_time)} x=({state})")
        if tr.terminated_reason == REASON_DOMAIN_FAULT or (
            tr.terminated_reason == REASON_STEP_LIMIT and len(tr) < 2
        ):
            outcome.exit_code = EXIT_INTEGRATION
    if sc.boundary is not None and trajs:
        verdicts = [attraction_report(tr, sc.boundary) for tr in trajs if len(tr) >= 4]
        if verdicts:
            head = verdicts[0]
            bits.append(
                f"boundary: {head.verdict.value} d0={fmt(head.initial_distance)} "
                f"d_end={fmt(head.final_distance)}"
            )
            outcome.extras["attraction"] = verdicts
    outcome.trajectories = trajs
    outcome.summary = f"{sid}: " + "; ".join(bits or ["region map only"])
    if plot:
        from . import plots

        outcome.files.extend(plots.render_sim(out, sid, sc, trajs, rm))


def _run_known(sc, sid, out, plot, cfg, t_end, outcome):
    reduced = integrate(Scalar(sc.density), [sc.y0], sc.t0, t_end, cfg)
    p = out / f"{sid}_reduced.csv"
    write_series_csv(p, ["t", "y"], [list(reduced.times), [s[0] for s in reduced.states]])
    outcome.files.append(p)
    closed = {}
    for mu in sc.mu_values:
        loop = KnownLoopSystem(sc.plant, sc.density, mu)
        z0 = loop.initial_state(sc.y0)
        traj = integrate(loop, z0, sc.t0, t_end, cfg)
        ys = [loop.output(z) for z in traj.states]
        tag = f"_mu{_mu_tag(mu)}" if len(sc.mu_values) > 1 else ""
        p = out / f"{sid}{tag}_closed.csv"
        write_series_csv(p, ["t", "y"], [list(traj.times), ys])
        outcome.files.append(p)
        closed[mu] = (traj, ys)
        if traj.terminated_reason == REASON_STEP_LIMIT and len(traj) < 2:
            outcome.exit_code = EXIT_INTEGRATION
    bits = [
        f"mu={fmt(mu)}: y_end={fmt(ys[-1])} ({traj.terminated_reason})"
        for mu, (traj, ys) in closed.items()
    ]
    bits.append(f"reduced: y_end={fmt(reduced.states[-1][0])}")
    outcome.trajectories = [tr for tr, _ in closed.values()]
    outcome.extras["closed"] = closed
    outcome.extras["reduced"] = reduced
    outcome.summary = f"{sid}: " + "; ".join(bits)
    if plot:
        from . import plots

        outcome.files.extend(plots.render_known(out, sid, closed, reduced))


def _run_adaptive(sc, sid, out, plot, cfg, t_end, outcome):
    res = run_adaptive_case(
        sc.case, y0=sc.y0, t_end=t_end, alpha=sc.alpha, gain=sc.gain, cfg=cfg
    )
    p = out / f"{sid}_adaptive.csv"
    write_adaptive_csv(p, res)
    outcome.files.append(p)
    ys = res.output_series()
    bits = [
        f"case {sc.case}: {res.traj.terminated_reason} at t={fmt(res.traj.final_time)} "
        f"y_end={fmt(ys[-1])}"
    ]
    if res.boundaries:
        margin = _tube_margin(res)
        if margin is not None:
            bits.append(f"min constraint margin={fmt(margin)}")
    outcome.trajectories = [res.traj]
    outcome.extras["adaptive"] = res
    if res.traj.terminated_reason == REASON_STEP_LIMIT and len(res.traj) < 2:
        outcome.exit_code = EXIT_INTEGRATION
    outcome.summary = f"{sid}: " + "; ".join(bits)
    if plot:
        from . import plots

        outcome.files.extend(plots.render_adaptive(out, sid, res))


def _tube_margin(res):
    """Smallest distance from the output to its active constraints."""
    case = res.case
    loop = res.loop
    margins = []
    for t, z in zip(res.traj.times, res.traj.states):
        y = loop.output(z)
        if case == 2:
            g = res.boundaries["g"].value(t)
            margins.append(g - abs(y))
        elif case == 3:
            margins.append(
                min(
                    res.boundaries["g_upper"].value(t) - y,
                    y - res.boundaries["g_lower"].value(t),
                )
            )
        elif case == 5:
            margins.append(y - res.boundaries["g"].value(t))
    return min(margins) if margins else None
