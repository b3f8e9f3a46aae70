"""CSV artifact writers.  All floats carry 17 significant digits so that
re-runs are byte-comparable and parses are lossless."""

from __future__ import annotations

import math
from pathlib import Path

from .density import DensityValue
from .sim import Trajectory
from .systems import DensitySystem, RegionMap


def fmt(v: float) -> str:
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def write_trajectory_csv(path: str | Path, traj: Trajectory, system: DensitySystem) -> None:
    """Rows t,x1[,x2],V,vdot,rho1[,rho2]; events appended as comments."""
    densities = system.densities()
    dim = system.dim
    header = ["t", "x1"] + (["x2"] if dim == 2 else []) + ["V", "vdot"]
    header += [f"rho{i + 1}" for i in range(len(densities))]
    lines = [",".join(header)]
    for t, x in zip(traj.times, traj.states):
        v = 0.5 * sum(c * c for c in x)
        f = system.rhs(x, t)
        if isinstance(f, DensityValue):
            wdot = math.nan
        else:
            wdot = sum(xi * fi for xi, fi in zip(x, f))
        row = [fmt(t)] + [fmt(c) for c in x] + [fmt(v), fmt(wdot)]
        for d in densities:
            dv = d.evaluate(x, t)
            row.append(fmt(dv.value if dv.is_finite else math.nan))
        lines.append(",".join(row))
    for ev in traj.events:
        lines.append(f"# event,{fmt(ev.time)},{ev.kind}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_regionmap_csv(path: str | Path, rm: RegionMap) -> None:
    lines = ["x1,x2,class,vdot"]
    for (x1, x2), cls, wd in zip(rm.points(), rm.classes, rm.vdots):
        lines.append(f"{fmt(x1)},{fmt(x2)},{cls.value},{fmt(wd)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_series_csv(path: str | Path, header: list[str], columns: list[list[float]]) -> None:
    if any(len(c) != len(columns[0]) for c in columns):
        raise ValueError("ragged columns")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_adaptive_csv(path: str | Path, result) -> None:
    """Rows t,y,u,rho,V_lyap,residual,c_1..c_m plus boundary signals."""
    loop = result.loop
    n = loop.n
    m = 2 * n - 1
    bnames = sorted(result.boundaries)
    header = ["t", "y", "u", "rho", "V_lyap", "residual"]
    header += [f"c_{i + 1}" for i in range(m)]
    header += bnames
    ys = result.output_series()
    us = result.control_series()
    rhos = result.rho_series()
    mon = result.monitor
    lines = [",".join(header)]
    for i, (t, z) in enumerate(zip(result.traj.times, result.traj.states)):
        _, _, _, c = loop.split(z)
        row = [fmt(t), fmt(ys[i]), fmt(us[i]), fmt(rhos[i]), fmt(mon.v[i]), fmt(mon.residual[i])]
        row += [fmt(ci) for ci in c]
        row += [fmt(result.boundaries[bn].value(t)) for bn in bnames]
        lines.append(",".join(row))
    for ev in result.traj.events:
        lines.append(f"# event,{fmt(ev.time)},{ev.kind}")
    Path(path).write_text("\n".join(lines) + "\n")
