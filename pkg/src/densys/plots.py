"""Figure rendering for scenario runs (PNG next to the CSV artifacts).

The delimited output stays the normative artifact; these renderings are
the quick-look report layer.  matplotlib is imported lazily so the CLI
stays fast when plotting is off.
"""

from __future__ import annotations

import math
from pathlib import Path

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "font.size": 10,
}

_CLASS_COLOR = {
    "S": "#2166ac",
    "U": "#b2182b",
    "EQ": "#fddbc7",
    "NS": "#999999",
    "BH": "#1a1a1a",
    "WH": "#f7f7f7",
}


def _mpl():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    plt.rcParams.update(_STYLE)
    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, bbox_inches="tight")
    import matplotlib.pyplot as plt

    plt.close(fig)
    return path


def render_sim(out: Path, sid: str, sc, trajs, rm) -> list[Path]:
    plt = _mpl()
    written: list[Path] = []
    if trajs and sc.system.dim == 1:
        fig, ax = plt.subplots()
        for k, tr in enumerate(trajs):
            ax.plot(tr.times, [s[0] for s in tr.states], label=f"x (seed {k})" if len(trajs) > 1 else "x")
        _overlay_signals(ax, sc, trajs)
        ax.set_xlabel("t")
        ax.set_ylabel("x")
        ax.set_title(sid)
        ax.legend(loc="best", fontsize=8)
        written.append(_save(fig, out / f"{sid}_traj.png"))
    elif trajs:
        fig, ax = plt.subplots(figsize=(5.5, 5.5))
        if rm is not None:
            _region_background(ax, rm)
        for tr in trajs:
            xs = [s[0] for s in tr.states]
            ys = [s[1] for s in tr.states]
            ax.plot(xs, ys)
            ax.plot(xs[0], ys[0], "ko", ms=3)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_aspect("equal")
        ax.set_title(sid)
        written.append(_save(fig, out / f"{sid}_phase.png"))
    if rm is not None:
        fig, ax = plt.subplots(figsize=(5.5, 5.5))
        _region_background(ax, rm, legend=True)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_title(f"{sid} region map")
        written.append(_save(fig, out / f"{sid}_regionmap.png"))
    return written


def _overlay_signals(ax, sc, trajs):
    t0 = trajs[0].times[0]
    t1 = max(tr.final_time for tr in trajs)
    ts = [t0 + (t1 - t0) * i / 400 for i in range(401)]
    seen = set()
    for d in sc.system.densities():
        for s in d.signals():
            key = repr(s)
            if key in seen:
                continue
            seen.add(key)
            ax.plot(ts, [s.value(t) for t in ts], "k--", lw=0.9, alpha=0.7)


def _region_background(ax, rm, legend=False):
    import numpy as np

    if len(rm.axes) != 2:
        return
    xs, ys = rm.axes
    img = np.zeros((len(ys), len(xs), 3))
    palette = {k: _hex_rgb(v) for k, v in _CLASS_COLOR.items()}
    n2 = len(ys)
    for i in range(len(xs)):
        for j in range(n2):
            img[j, i] = palette[rm.classes[i * n2 + j].value]
    ax.imshow(
        img,
        origin="lower",
        extent=(xs[0], xs[-1], ys[0], ys[-1]),
        interpolation="nearest",
        alpha=0.6,
        aspect="auto",
    )
    if legend:
        import matplotlib.patches as mpatches

        handles = [
            mpatches.Patch(color=_CLASS_COLOR[c], label=c)
            for c in sorted({cl.value for cl in rm.classes})
        ]
        ax.legend(handles=handles, loc="upper right", fontsize=8)


def _hex_rgb(h):
    h = h.lstrip("#")
    return tuple(int(h[i : i + 2], 16) / 255.0 for i in (0, 2, 4))


def render_known(out: Path, sid: str, closed: dict, reduced) -> list[Path]:
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.plot(reduced.times, [s[0] for s in reduced.states], "k--", label="reduced model")
    for mu, (traj, ys) in closed.items():
        ax.plot(traj.times, ys, label=f"closed loop, mu={mu:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("y")
    ax.set_title(sid)
    ax.legend(loc="best", fontsize=8)
    return [_save(fig, out / f"{sid}_output.png")]


def render_adaptive(out: Path, sid: str, res) -> list[Path]:
    plt = _mpl()
    ts = list(res.traj.times)
    ys = res.output_series()
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 8.5), sharex=True)
    ax = axes[0]
    ax.plot(ts, ys, label="y")
    for name, s in sorted(res.boundaries.items()):
        vals = [s.value(t) for t in ts]
        ax.plot(ts, vals, "k--", lw=0.9, label=name)
        if res.case == 2:
            ax.plot(ts, [-v for v in vals], "k--", lw=0.9)
    ax.set_ylabel("output")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(sid)
    axes[1].plot(ts, res.control_series(), color="#b2182b")
    axes[1].set_ylabel("u")
    n = res.loop.n
    for i in range(2 * n - 1):
        axes[2].plot(ts, [res.loop.split(z)[3][i] for z in res.traj.states], lw=0.9)
    axes[2].set_ylabel("c (estimates)")
    axes[2].set_xlabel("t")
    return [_save(fig, out / f"{sid}_adaptive.png")]
