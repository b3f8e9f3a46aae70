"""Scenario configuration: strict parsing, validation, canonical form.

Configs are JSON maps.  Parsing is strict -- unknown keys and unknown
kinds are errors naming the offender and the nearest valid alternative --
and every parsed scenario round-trips through ``canonical()`` (defaults
made explicit, keys sorted) to an identical parse.
"""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import density as dens
from . import signals as sig
from .plant import LinearPlant, Polynomial
from .sim import IntegratorConfig


class ConfigError(ValueError):
    """Malformed or invalid scenario configuration."""


def _suggest(name: str, options) -> str:
    close = difflib.get_close_matches(name, list(options), n=1)
    hint = f"; did you mean {close[0]!r}?" if close else ""
    return f"{name!r} is not valid (choose from {sorted(options)}){hint}"


def _check_keys(obj: dict, allowed: dict[str, bool], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}: {_suggest(key, allowed)}")
    for key, required in allowed.items():
        if required and key not in obj:
            raise ConfigError(f"missing required key {key!r} in {where}")


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number, got {v!r}")
    return float(v)


# --- signals ---------------------------------------------------------------

_SIGNAL_KEYS = {
    "constant": {"kind": True, "value": True},
    "exp": {"kind": True, "scale": True, "rate": True},
    "double_exp": {"kind": True},
    "sinusoid": {"kind": True, "amplitude": True, "omega": True, "phase": False},
    "step_switch": {"kind": True, "at": True, "before": True, "after": True, "at_switch": False},
    "pulse_train": {"kind": True, "period": True, "levels": False},
    "sum": {"kind": True, "terms": True},
    "product": {"kind": True, "factors": True},
    "affine": {"kind": True, "scale": True, "offset": True, "inner": True},
}


def parse_signal(node, where: str) -> sig.Signal:
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        return sig.Constant(float(node))
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a number or a signal map, got {node!r}")
    kind = node.get("kind")
    if kind not in _SIGNAL_KEYS:
        raise ConfigError(f"signal kind in {where}: {_suggest(str(kind), _SIGNAL_KEYS)}")
    _check_keys(node, _SIGNAL_KEYS[kind], f"{where} ({kind})")
    if kind == "constant":
        return sig.Constant(_number(node["value"], f"{where}.value"))
    if kind == "exp":
        return sig.Exp(_number(node["scale"], f"{where}.scale"), _number(node["rate"], f"{where}.rate"))
    if kind == "double_exp":
        return sig.DoubleExp()
    if kind == "sinusoid":
        return sig.Sinusoid(
            _number(node["amplitude"], f"{where}.amplitude"),
            _number(node["omega"], f"{where}.omega"),
            _number(node.get("phase", 0.0), f"{where}.phase"),
        )
    if kind == "step_switch":
        at_switch = node.get("at_switch", "before")
        if at_switch not in ("before", "after"):
            raise ConfigError(f"{where}.at_switch must be 'before' or 'after'")
        return sig.StepSwitch(
            _number(node["at"], f"{where}.at"),
            _number(node["before"], f"{where}.before"),
            _number(node["after"], f"{where}.after"),
            at_switch,
        )
    if kind == "pulse_train":
        levels = node.get("levels", [1.0, -1.0])
        if not (isinstance(levels, list) and len(levels) == 2):
            raise ConfigError(f"{where}.levels must be a two-element list")
        return sig.PulseTrain(
            _number(node["period"], f"{where}.period"),
            (_number(levels[0], f"{where}.levels[0]"), _number(levels[1], f"{where}.levels[1]")),
        )
    if kind == "sum":
        return sig.Sum(tuple(parse_signal(x, f"{where}.terms[{i}]") for i, x in enumerate(node["terms"])))
    if kind == "product":
        return sig.Product(tuple(parse_signal(x, f"{where}.factors[{i}]") for i, x in enumerate(node["factors"])))
    return sig.Affine(
        _number(node["scale"], f"{where}.scale"),
        _number(node["offset"], f"{where}.offset"),
        parse_signal(node["inner"], f"{where}.inner"),
    )


def signal_config(s: sig.Signal) -> object:
    if isinstance(s, sig.Constant):
        return s.c
    if isinstance(s, sig.Exp):
        return {"kind": "exp", "scale": s.scale, "rate": s.rate}
    if isinstance(s, sig.DoubleExp):
        return {"kind": "double_exp"}
    if isinstance(s, sig.Sinusoid):
        return {"kind": "sinusoid", "amplitude": s.amplitude, "omega": s.omega, "phase": s.phase}
    if isinstance(s, sig.StepSwitch):
        return {"kind": "step_switch", "at": s.t_switch, "before": s.before, "after": s.after, "at_switch": s.at_switch}
    if isinstance(s, sig.PulseTrain):
        return {"kind": "pulse_train", "period": s.period, "levels": list(s.levels)}
    if isinstance(s, sig.Sum):
        return {"kind": "sum", "terms": [signal_config(x) for x in s.terms]}
    if isinstance(s, sig.Product):
        return {"kind": "product", "factors": [signal_config(x) for x in s.factors]}
    if isinstance(s, sig.Affine):
        return {"kind": "affine", "scale": s.scale, "offset": s.offset, "inner": signal_config(s.inner)}
    raise TypeError(f"unknown signal type {type(s).__name__}")


# --- densities --------------------------------------------------------------

_DENSITY_KEYS = {
    "constant": {"kind": True, "alpha": True},
    "zero": {"kind": True, "dim": False},
    "barrier": {"kind": True, "alpha": True, "w": True},
    "track_sign": {"kind": True, "alpha": True, "w": True},
    "log_ratio_tube": {"kind": True, "alpha": True, "upper": True, "lower": True},
    "log_shift": {"kind": True, "alpha": True, "g": True},
    "linear": {"kind": True, "alpha": True, "w": True},
    "weighted_sign": {"kind": True, "w": True},
    "neg_linear": {"kind": True, "alpha": True, "y_m": True},
    "sym_log_tube": {"kind": True, "alpha": True, "g": True},
    "neg_log_shift": {"kind": True, "alpha": True, "g": True},
    "planar_log_ratio": {"kind": True, "beta": True, "upper": True, "lower": True},
    "planar_log_shift": {"kind": True, "alpha": True, "beta": True},
    "poly_disc": {"kind": True, "c0": True, "c1": True, "c2": True},
    "exp_hole": {"kind": True, "sign": True, "q": False},
    "log_disc": {"kind": True, "sign": True},
}


def parse_density(node, where: str) -> dens.DensityFn:
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a density map, got {node!r}")
    kind = node.get("kind")
    if kind not in _DENSITY_KEYS:
        raise ConfigError(f"density kind in {where}: {_suggest(str(kind), _DENSITY_KEYS)}")
    _check_keys(node, _DENSITY_KEYS[kind], f"{where} ({kind})")
    S = lambda key: parse_signal(node[key], f"{where}.{key}")
    N = lambda key: _number(node[key], f"{where}.{key}")
    if kind == "constant":
        d = dens.ConstantDensity(N("alpha"))
    elif kind == "zero":
        dim = int(node.get("dim", 2))
        if dim not in (1, 2):
            raise ConfigError(f"{where}.dim must be 1 or 2")
        d = dens.Zero(dim)
    elif kind == "barrier":
        d = dens.Barrier(N("alpha"), S("w"))
    elif kind == "track_sign":
        d = dens.TrackSign(N("alpha"), S("w"))
    elif kind == "log_ratio_tube":
        d = dens.LogRatioTube(N("alpha"), S("upper"), S("lower"))
    elif kind == "log_shift":
        d = dens.LogShift(N("alpha"), S("g"))
    elif kind == "linear":
        d = dens.Linear(N("alpha"), S("w"))
    elif kind == "weighted_sign":
        d = dens.WeightedSign(S("w"))
    elif kind == "neg_linear":
        d = dens.NegLinear(N("alpha"), S("y_m"))
    elif kind == "sym_log_tube":
        d = dens.SymLogTube(N("alpha"), S("g"))
    elif kind == "neg_log_shift":
        d = dens.NegLogShift(N("alpha"), S("g"))
    elif kind == "planar_log_ratio":
        d = dens.PlanarLogRatio(N("beta"), S("upper"), S("lower"))
    elif kind == "planar_log_shift":
        d = dens.PlanarLogShift(N("alpha"), N("beta"))
    elif kind == "poly_disc":
        d = dens.PolyDisc(N("c0"), N("c1"), N("c2"))
    elif kind == "exp_hole":
        d = dens.ExpHole(int(N("sign")), _number(node.get("q", 0.98), f"{where}.q"))
    else:
        d = dens.LogDisc(int(N("sign")))
    try:
        dens.validate_density(d)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return d


def density_config(d: dens.DensityFn) -> dict:
    if isinstance(d, dens.ConstantDensity):
        return {"kind": "constant", "alpha": d.alpha}
    if isinstance(d, dens.Zero):
        return {"kind": "zero", "dim": d.dim}
    if isinstance(d, dens.Barrier):
        return {"kind": "barrier", "alpha": d.alpha, "w": signal_config(d.w)}
    if isinstance(d, dens.TrackSign):
        return {"kind": "track_sign", "alpha": d.alpha, "w": signal_config(d.w)}
    if isinstance(d, dens.LogRatioTube):
        return {"kind": "log_ratio_tube", "alpha": d.alpha, "upper": signal_config(d.upper), "lower": signal_config(d.lower)}
    if isinstance(d, dens.LogShift):
        return {"kind": "log_shift", "alpha": d.alpha, "g": signal_config(d.g)}
    if isinstance(d, dens.Linear):
        return {"kind": "linear", "alpha": d.alpha, "w": signal_config(d.w)}
    if isinstance(d, dens.WeightedSign):
        return {"kind": "weighted_sign", "w": signal_config(d.w)}
    if isinstance(d, dens.NegLinear):
        return {"kind": "neg_linear", "alpha": d.alpha, "y_m": signal_config(d.y_m)}
    if isinstance(d, dens.SymLogTube):
        return {"kind": "sym_log_tube", "alpha": d.alpha, "g": signal_config(d.g)}
    if isinstance(d, dens.NegLogShift):
        return {"kind": "neg_log_shift", "alpha": d.alpha, "g": signal_config(d.g)}
    if isinstance(d, dens.PlanarLogRatio):
        return {"kind": "planar_log_ratio", "beta": d.beta, "upper": signal_config(d.upper), "lower": signal_config(d.lower)}
    if isinstance(d, dens.PlanarLogShift):
        return {"kind": "planar_log_shift", "alpha": d.alpha, "beta": d.beta}
    if isinstance(d, dens.PolyDisc):
        return {"kind": "poly_disc", "c0": d.c0, "c1": d.c1, "c2": d.c2}
    if isinstance(d, dens.ExpHole):
        return {"kind": "exp_hole", "sign": d.sign, "q": d.q}
    if isinstance(d, dens.LogDisc):
        return {"kind": "log_disc", "sign": d.sign}
    raise TypeError(f"unknown density type {type(d).__name__}")


# --- scenario ----------------------------------------------------------------

_TOL_KEYS = {
    "rtol": False,
    "atol": False,
    "h_init": False,
    "h_min": False,
    "h_max": False,
    "max_steps": False,
    "barrier_shrink": False,
}

_BOUNDARY_KEYS = {
    "scalar": {"kind": True, "w": True},
    "level_set": {"kind": True, "beta": True, "level": True},
}

_REGION_KEYS = {"bounds": True, "grid": True, "at": False, "divergence_threshold": False}

_TOP_KEYS = {
    "system": True,
    "description": False,
    "figure": False,
    "t0": False,
    "t_end": False,
    "tolerances": False,
    # scalar / planar simulation
    "density": False,
    "density1": False,
    "density2": False,
    "x0": False,
    "seeds": False,
    "boundary": False,
    "region": False,
    # known-parameter loop
    "plant": False,
    "mu": False,
    "y0": False,
    # adaptive loop
    "case": False,
    "alpha": False,
    "gain": False,
}

_SYSTEMS = ("scalar", "scalar_positive", "planar", "known_loop", "adaptive")

_PLANT_KEYS = {"Q": True, "R": True, "k": True}


@dataclass
class Scenario:
    """Validated scenario: the canonical config plus built runtime pieces."""

    config: dict
    kind: str
    t0: float = 0.0
    t_end: float = 0.0
    integrator: IntegratorConfig | None = None
    system: object = None  # DensitySystem for scalar/planar kinds
    seeds: list = field(default_factory=list)
    boundary: object = None
    region: dict | None = None
    plant: LinearPlant | None = None
    density: dens.DensityFn | None = None
    mu_values: list[float] = field(default_factory=list)
    y0: float = 0.0
    case: int = 0
    alpha: float | None = None
    gain: float | None = None

    def canonical(self) -> str:
        return json.dumps(self.config, sort_keys=True, indent=2) + "\n"


def _parse_tolerances(node, where: str) -> IntegratorConfig | None:
    if node is None:
        return None
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a map")
    _check_keys(node, _TOL_KEYS, where)
    kw = {}
    for key, v in node.items():
        kw[key] = int(v) if key == "max_steps" else _number(v, f"{where}.{key}")
    try:
        return IntegratorConfig().with_overrides(**kw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_boundary(node, where: str):
    from .systems import LevelSetBoundary, ScalarBoundary

    if node is None:
        return None
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a map")
    kind = node.get("kind")
    if kind not in _BOUNDARY_KEYS:
        raise ConfigError(f"boundary kind in {where}: {_suggest(str(kind), _BOUNDARY_KEYS)}")
    _check_keys(node, _BOUNDARY_KEYS[kind], where)
    if kind == "scalar":
        return ScalarBoundary(parse_signal(node["w"], f"{where}.w"))
    level = node["level"]
    level_obj = parse_signal(level, f"{where}.level")
    if isinstance(level_obj, sig.Constant):
        level_obj = level_obj.c
    return LevelSetBoundary(_number(node["beta"], f"{where}.beta"), level_obj)


def _parse_region(node, dim: int, where: str):
    if node is None:
        return None
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a map")
    _check_keys(node, _REGION_KEYS, where)
    bounds = node["bounds"]
    grid = node["grid"]
    if not (isinstance(bounds, list) and len(bounds) == dim):
        raise ConfigError(f"{where}.bounds must list {dim} [lo, hi] pairs")
    if not (isinstance(grid, list) and len(grid) == dim):
        raise ConfigError(f"{where}.grid must list {dim} sizes")
    out_bounds = []
    for i, pair in enumerate(bounds):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError(f"{where}.bounds[{i}] must be [lo, hi]")
        lo, hi = (_number(v, f"{where}.bounds[{i}]") for v in pair)
        if not lo < hi:
            raise ConfigError(f"{where}.bounds[{i}]: need lo < hi")
        out_bounds.append((lo, hi))
    out_grid = []
    for i, nv in enumerate(grid):
        n = int(_number(nv, f"{where}.grid[{i}]"))
        if n < 2:
            raise ConfigError(f"{where}.grid[{i}] must be >= 2")
        out_grid.append(n)
    return {
        "bounds": out_bounds,
        "grid": out_grid,
        "at": _number(node.get("at", 0.0), f"{where}.at"),
        "divergence_threshold": _number(node.get("divergence_threshold", 100.0), f"{where}.divergence_threshold"),
    }


def _parse_plant(node, where: str) -> LinearPlant:
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a map with Q, R, k")
    _check_keys(node, _PLANT_KEYS, where)
    def poly(key):
        v = node[key]
        if not (isinstance(v, list) and v):
            raise ConfigError(f"{where}.{key} must be a nonempty coefficient list (ascending)")
        return Polynomial(tuple(_number(c, f"{where}.{key}") for c in v))
    try:
        return LinearPlant(poly("Q"), poly("R"), _number(node["k"], f"{where}.k"))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_scenario(node: dict) -> Scenario:
    from . import systems as systems_mod
    from .adaptive import case_density, _CASE_ALPHA, _CASE_TEND, _CASE_Y0

    if not isinstance(node, dict):
        raise ConfigError("scenario config must be a map")
    _check_keys(node, _TOP_KEYS, "scenario")
    system = node.get("system")
    if system not in _SYSTEMS:
        raise ConfigError(f"system: {_suggest(str(system), _SYSTEMS)}")
    sc = Scenario(config={}, kind=system)
    sc.t0 = _number(node.get("t0", 0.0), "t0")
    sc.integrator = _parse_tolerances(node.get("tolerances"), "tolerances")

    def forbid(keys):
        for key in keys:
            if key in node:
                raise ConfigError(f"key {key!r} does not apply to system {system!r}")

    if system in ("scalar", "scalar_positive", "planar"):
        forbid(("plant", "mu", "y0", "case", "alpha", "gain"))
        if "t_end" not in node:
            raise ConfigError("missing required key 't_end'")
        sc.t_end = _number(node["t_end"], "t_end")
        dim = 2 if system == "planar" else 1
        if system == "planar":
            forbid(("density",))
            d1 = parse_density(node.get("density1"), "density1") if "density1" in node else None
            d2 = parse_density(node.get("density2"), "density2") if "density2" in node else None
            if d1 is None or d2 is None:
                raise ConfigError("planar system needs density1 and density2")
            for nm, d in (("density1", d1), ("density2", d2)):
                if d.dim != 2:
                    raise ConfigError(f"{nm} must be 2-dimensional, got dim {d.dim}")
            sc.system = systems_mod.Planar(d1, d2)
        else:
            forbid(("density1", "density2"))
            if "density" not in node:
                raise ConfigError(f"{system} system needs a density")
            d = parse_density(node["density"], "density")
            if d.dim != 1:
                raise ConfigError(f"density must be 1-dimensional, got dim {d.dim}")
            cls = systems_mod.Scalar if system == "scalar" else systems_mod.ScalarPositive
            sc.system = cls(d)
        if "x0" in node and "seeds" in node:
            raise ConfigError("give either x0 or seeds, not both")
        if "x0" in node:
            sc.seeds = [_parse_state(node["x0"], dim, "x0")]
        elif "seeds" in node:
            if not isinstance(node["seeds"], list):
                raise ConfigError("seeds must be a list of states")
            sc.seeds = [_parse_state(s, dim, f"seeds[{i}]") for i, s in enumerate(node["seeds"])]
        elif node.get("region") is None:
            raise ConfigError("scenario needs x0, seeds, or a region map request")
        sc.boundary = _parse_boundary(node.get("boundary"), "boundary")
        sc.region = _parse_region(node.get("region"), dim, "region")
        for seed in sc.seeds:
            f = sc.system.rhs(seed, sc.t0)
            if isinstance(f, dens.DensityValue):
                raise ConfigError(
                    f"initial state {list(seed)} is invalid at t0={sc.t0}: density {f.kind}"
                )
    elif system == "known_loop":
        forbid(("density1", "density2", "x0", "seeds", "boundary", "region", "case", "alpha", "gain"))
        for key in ("plant", "density", "y0", "t_end"):
            if key not in node:
                raise ConfigError(f"missing required key {key!r} for known_loop")
        sc.plant = _parse_plant(node["plant"], "plant")
        sc.density = parse_density(node["density"], "density")
        if sc.density.dim != 1:
            raise ConfigError("known_loop density must be 1-dimensional")
        sc.t_end = _number(node["t_end"], "t_end")
        sc.y0 = _number(node["y0"], "y0")
        mu = node.get("mu", 0.0)
        if isinstance(mu, list):
            sc.mu_values = [_number(v, "mu") for v in mu]
        else:
            sc.mu_values = [_number(mu, "mu")]
        gamma = sc.plant.relative_degree
        for m in sc.mu_values:
            if gamma > 1 and m <= 0:
                raise ConfigError(f"plant relative degree {gamma} > 1 requires mu > 0")
            if m < 0:
                raise ConfigError("mu must be nonnegative")
    else:  # adaptive
        forbid(("density", "density1", "density2", "x0", "seeds", "boundary", "region", "plant", "mu"))
        if "case" not in node:
            raise ConfigError("missing required key 'case' for adaptive system")
        case = node["case"]
        if case not in (1, 2, 3, 4, 5):
            raise ConfigError(f"case must be 1..5, got {case!r}")
        sc.case = int(case)
        sc.alpha = _number(node["alpha"], "alpha") if "alpha" in node else None
        sc.gain = _number(node["gain"], "gain") if "gain" in node else None
        if sc.alpha is not None and sc.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if sc.gain is not None and sc.gain <= 0:
            raise ConfigError("gain must be positive")
        sc.y0 = _number(node.get("y0", _CASE_Y0[sc.case]), "y0")
        sc.t_end = _number(node.get("t_end", _CASE_TEND[sc.case]), "t_end")
        rho = case_density(sc.case, sc.alpha)
        rv = rho.evaluate((sc.y0,), 0.0)
        if not rv.is_finite:
            raise ConfigError(
                f"initial output y0={sc.y0} lies outside the case-{sc.case} density domain ({rv.kind})"
            )
    if sc.t_end and sc.t_end <= sc.t0:
        raise ConfigError(f"t_end ({sc.t_end}) must exceed t0 ({sc.t0})")
    sc.config = _canonical_dict(node, sc)
    return sc


def _parse_state(v, dim: int, where: str):
    if dim == 1:
        return (_number(v, where),)
    if not (isinstance(v, list) and len(v) == dim):
        raise ConfigError(f"{where} must be a list of {dim} numbers")
    return tuple(_number(c, f"{where}[{i}]") for i, c in enumerate(v))


def _canonical_dict(node: dict, sc: Scenario) -> dict:
    out = dict(node)
    out.setdefault("t0", 0.0)
    if sc.kind == "adaptive":
        out.setdefault("y0", sc.y0)
        out.setdefault("t_end", sc.t_end)
    return json.loads(json.dumps(out, sort_keys=True))


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        node = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {p} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(node)
