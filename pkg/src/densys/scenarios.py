"""Registry of runnable experiments, one per reported figure setup.

Each entry is a plain config dict (the same schema ``parse_scenario``
accepts from files), so registry runs and user-config runs share one
validation and execution path.  Parameters the source material printed
are used verbatim; free choices (seeds, horizons, boundary signals for
the qualitative scalar studies) are desk-scale picks recorded here.
"""

from __future__ import annotations

from .config import Scenario, parse_scenario

_SIN = lambda a, om: {"kind": "sinusoid", "amplitude": a, "omega": om}
_EXP = lambda s, r: {"kind": "exp", "scale": s, "rate": r}

_EIGHT_SEEDS = [
    [1.15, 0.0],
    [0.0, 1.3],
    [-1.45, 0.0],
    [0.0, -1.6],
    [1.202, 1.202],
    [-1.308, 1.308],
    [1.35, -1.35],
    [-0.85, -0.85],
]

REGISTRY: dict[str, dict] = {
    "fig1a": {
        "system": "scalar",
        "figure": "fig1a",
        "description": "constant density alpha=1: plain exponential decay",
        "density": {"kind": "constant", "alpha": 1.0},
        "x0": 1.0,
        "t_end": 5.0,
    },
    "fig1b": {
        "system": "scalar",
        "figure": "fig1b",
        "description": "barrier density alpha/(w-|x|) with moving band w=2+0.5 sin t",
        "density": {
            "kind": "barrier",
            "alpha": 1.0,
            "w": {"kind": "sum", "terms": [2.0, _SIN(0.5, 1.0)]},
        },
        "x0": 1.9,
        "t_end": 10.0,
    },
    "fig2a": {
        "system": "scalar",
        "figure": "fig2a",
        "description": "two-equilibria tracking density alpha(x-w)sign(x), w steps 1->2 at t=3",
        "density": {
            "kind": "track_sign",
            "alpha": 1.0,
            "w": {"kind": "step_switch", "at": 3.0, "before": 1.0, "after": 2.0},
        },
        "x0": 2.5,
        "t_end": 10.0,
        "boundary": {
            "kind": "scalar",
            "w": {"kind": "step_switch", "at": 3.0, "before": 1.0, "after": 2.0},
        },
    },
    "fig2b": {
        "system": "scalar",
        "figure": "fig2b",
        "description": "log-ratio tube density between moving bounds; x settles at the midline",
        "density": {
            "kind": "log_ratio_tube",
            "alpha": 1.0,
            "upper": {"kind": "sum", "terms": [2.0, _SIN(0.5, 1.0)]},
            "lower": {"kind": "sum", "terms": [1.0, _SIN(0.3, 1.0)]},
        },
        "x0": 1.8,
        "t_end": 10.0,
    },
    "fig3": {
        "system": "scalar_positive",
        "figure": "fig3",
        "description": "one-sided log density alpha ln(x-g): slide one unit above g",
        "density": {
            "kind": "log_shift",
            "alpha": 1.0,
            "g": {"kind": "sum", "terms": [1.0, _SIN(0.5, 0.5)]},
        },
        "x0": 3.0,
        "t_end": 10.0,
    },
    "fig4a": {
        "system": "planar",
        "figure": "fig4a",
        "description": "planar log-ratio annulus, beta=1, bounds 3/2, seed (0, 2.5)",
        "density1": {"kind": "planar_log_ratio", "beta": 1.0, "upper": 3.0, "lower": 2.0},
        "density2": {"kind": "planar_log_ratio", "beta": 1.0, "upper": 3.0, "lower": 2.0},
        "x0": [0.0, 2.5],
        "t_end": 10.0,
        "boundary": {"kind": "level_set", "beta": 1.0, "level": 2.5},
    },
    "fig4b": {
        "system": "planar",
        "figure": "fig4b",
        "description": "planar log-ratio annulus, beta=0.6, bounds 3^0.6/1, seed (0, 2.5)",
        "density1": {"kind": "planar_log_ratio", "beta": 0.6, "upper": 1.9331820449317627, "lower": 1.0},
        "density2": {"kind": "planar_log_ratio", "beta": 0.6, "upper": 1.9331820449317627, "lower": 1.0},
        "x0": [0.0, 2.5],
        "t_end": 10.0,
        "boundary": {"kind": "level_set", "beta": 0.6, "level": 1.4665910224658814},
    },
    "fig5": {
        "system": "planar",
        "figure": "fig5",
        "description": "implicit unit-circle density rho=r^2-1 via rho1=x1^2-1, rho2=x1^2, seed (2, 1)",
        "density1": {"kind": "poly_disc", "c0": -1.0, "c1": 1.0, "c2": 0.0},
        "density2": {"kind": "poly_disc", "c0": 0.0, "c1": 1.0, "c2": 0.0},
        "x0": [2.0, 1.0],
        "t_end": 10.0,
        "boundary": {"kind": "level_set", "beta": 2.0, "level": 1.0},
    },
    "fig6a": {
        "system": "planar",
        "figure": "fig6a",
        "description": "one-equation density 20 ln(|x1|+|x2|-1), seed (2, 2)",
        "density1": {"kind": "planar_log_shift", "alpha": 20.0, "beta": 1.0},
        "density2": {"kind": "zero"},
        "x0": [2.0, 2.0],
        "t_end": 10.0,
    },
    "fig6b": {
        "system": "planar",
        "figure": "fig6b",
        "description": "one-equation density 20 ln(|x1|^0.5+|x2|^0.5-1), seed (2, 2)",
        "density1": {"kind": "planar_log_shift", "alpha": 20.0, "beta": 0.5},
        "density2": {"kind": "zero"},
        "x0": [2.0, 2.0],
        "t_end": 10.0,
    },
    "fig_alex1a": {
        "system": "scalar_positive",
        "figure": "fig_alex1a",
        "description": "rho=x-w, w=e^t: gap to the boundary tends to a constant",
        "density": {"kind": "linear", "alpha": 1.0, "w": _EXP(1.0, 1.0)},
        "x0": 3.0,
        "t_end": 4.0,
        "boundary": {"kind": "scalar", "w": _EXP(1.0, 1.0)},
    },
    "fig_alex1b": {
        "system": "scalar_positive",
        "figure": "fig_alex1b",
        "description": "rho=x-w, w=e^(e^t): the gap grows, density too thin near w",
        "density": {"kind": "linear", "alpha": 1.0, "w": {"kind": "double_exp"}},
        "x0": 2.0,
        "t_end": 2.0,
        "boundary": {"kind": "scalar", "w": {"kind": "double_exp"}},
    },
    "fig_alex2a": {
        "system": "scalar_positive",
        "figure": "fig_alex2a",
        "description": "rho=w sign(x-w), w=e^t: density grows with w, x slides onto w",
        "density": {"kind": "weighted_sign", "w": _EXP(1.0, 1.0)},
        "x0": 3.0,
        "t_end": 2.5,
        "boundary": {"kind": "scalar", "w": _EXP(1.0, 1.0)},
        "tolerances": {"rtol": 1e-3, "atol": 1e-6},
    },
    "fig_alex2b": {
        "system": "scalar_positive",
        "figure": "fig_alex2b",
        "description": "rho=w sign(x-w), w=e^(e^t): sliding tracking of a double exponential",
        "density": {"kind": "weighted_sign", "w": {"kind": "double_exp"}},
        "x0": 4.0,
        "t_end": 1.0,
        "boundary": {"kind": "scalar", "w": {"kind": "double_exp"}},
        "tolerances": {"rtol": 1e-3, "atol": 1e-6},
    },
    "fig_bh_a": {
        "system": "planar",
        "figure": "fig_bh_a",
        "description": "exp-hole density e^((r^2-1)^-0.98): every trajectory falls to the unit disc",
        "density1": {"kind": "exp_hole", "sign": 1},
        "density2": {"kind": "exp_hole", "sign": 1},
        "seeds": _EIGHT_SEEDS,
        "t_end": 10.0,
        "boundary": {"kind": "level_set", "beta": 2.0, "level": 1.0},
        "region": {"bounds": [[-2.0, 2.0], [-2.0, 2.0]], "grid": [101, 101]},
    },
    "fig_bh_b": {
        "system": "planar",
        "figure": "fig_bh_b",
        "description": "-ln(r^2-1): seeds below the r^2=2 level fall to the disc, above it drift out",
        "density1": {"kind": "log_disc", "sign": -1},
        "density2": {"kind": "log_disc", "sign": -1},
        "seeds": [[1.1, 0.0], [0.0, 1.2], [-1.3, 0.0], [0.0, -1.35], [1.45, 0.0], [0.0, 1.5]],
        "t_end": 2.5,
        "boundary": {"kind": "level_set", "beta": 2.0, "level": 1.0},
    },
    "fig_wh_a": {
        "system": "planar",
        "figure": "fig_wh_a",
        "description": "-e^((r^2-1)^-0.98): every trajectory is expelled from the unit disc",
        "density1": {"kind": "exp_hole", "sign": -1},
        "density2": {"kind": "exp_hole", "sign": -1},
        "seeds": _EIGHT_SEEDS,
        "t_end": 3.0,
        "boundary": {"kind": "level_set", "beta": 2.0, "level": 1.0},
        "region": {"bounds": [[-2.0, 2.0], [-2.0, 2.0]], "grid": [101, 101]},
    },
    "fig_wh_b": {
        "system": "planar",
        "figure": "fig_wh_b",
        "description": "+ln(r^2-1): trajectories leave the disc's vicinity toward the r^2=2 level",
        "density1": {"kind": "log_disc", "sign": 1},
        "density2": {"kind": "log_disc", "sign": 1},
        "seeds": [[1.1, 0.0], [0.0, 1.2], [-1.3, 0.0], [0.0, -1.35], [1.6, 0.0], [0.0, 1.8]],
        "t_end": 8.0,
        "boundary": {"kind": "level_set", "beta": 2.0, "level": 1.0},
    },
    "known_rd1": {
        "system": "known_loop",
        "figure": "known_rd1",
        "description": "relative-degree-1 cancellation loop on the unstable cubic plant, rho=1",
        "plant": {"Q": [-1.0, 3.0, -3.0, 1.0], "R": [1.0, 2.0, 1.0], "k": 1.0},
        "density": {"kind": "constant", "alpha": 1.0},
        "mu": 0.0,
        "y0": 4.0,
        "t_end": 10.0,
    },
    "known_mu": {
        "system": "known_loop",
        "figure": "known_mu",
        "description": "relative degree 2 with fast filter (mu p+1): mu study 0.1/0.01/0.001",
        "plant": {"Q": [0.0, 0.0, 1.0], "R": [1.0], "k": 1.0},
        "density": {"kind": "constant", "alpha": 1.0},
        "mu": [0.1, 0.01, 0.001],
        "y0": 1.0,
        "t_end": 10.0,
    },
    "adapt1": {
        "system": "adaptive",
        "figure": "adapt1",
        "description": "classical adaptive stabilization: rho=-y",
        "case": 1,
    },
    "adapt2": {
        "system": "adaptive",
        "figure": "adapt2",
        "description": "symmetric tube rho=ln((g-y)/(g+y)), g=(4e^-3t+1)h(t)",
        "case": 2,
    },
    "adapt3": {
        "system": "adaptive",
        "figure": "adapt3",
        "description": "asymmetric tube rho=5 ln((gu-y)/(y-gl))",
        "case": 3,
    },
    "adapt4": {
        "system": "adaptive",
        "figure": "adapt4",
        "description": "high-gain tracking rho=-100(y-y_m), pulsed reference",
        "case": 4,
    },
    "adapt5": {
        "system": "adaptive",
        "figure": "adapt5",
        "description": "one-sided slide rho=-10 ln(y-g)",
        "case": 5,
    },
}


def list_scenarios() -> list[dict]:
    """Deterministic id-ordered rows of {id, figure, description}."""
    rows = []
    for sid in sorted(REGISTRY):
        cfg = REGISTRY[sid]
        rows.append(
            {
                "id": sid,
                "figure": cfg.get("figure", sid),
                "description": cfg.get("description", ""),
            }
        )
    return rows


def get_scenario(sid: str) -> Scenario:
    if sid not in REGISTRY:
        raise KeyError(sid)
    return parse_scenario(REGISTRY[sid])
