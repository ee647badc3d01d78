"""JSON scenario files: schema, loading and overrides.

A scenario bundles the system, the named predicates, the overall STL
formula, one funnel task per state formula and the simulation settings.
``load_scenario`` accepts a path or the name of a bundled scenario.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema

from .combiner import Task, TaskBundle
from .controllers import ControllerSpec, GainSchedule
from .dynamics import NoiseSpec, single_integrator, unicycle_model
from .funnel import Curve, FunnelSpec, funnel_for_task
from .simulator import SimConfig
from .stl import Predicate, StlFormula, parse_formula

CONTROLLER_ALIASES = {"aug": "unicycle-aug", "prac": "unicycle-prac", "general": "general"}


class ScenarioError(ValueError):
    pass


_num = {"type": "number"}
_vec = {"type": "array", "items": _num}

_curve = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["constant", "affine", "affine-capped"]},
        "c": _num, "c0": _num, "slope": _num, "cap": _num,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_gain = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["exp-funnel", "exp-funnel-offset", "exact"]},
        "scale": _num, "b_bar": _num,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_funnel = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"gamma": _curve, "Gamma": _curve, "epsilon": _num},
            "required": ["gamma", "Gamma"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "task": {"const": "eventually"},
                "deadline": _num, "final_floor": _num, "c0": _num, "slope": _num,
                "band": _num, "gamma_cap": _num, "epsilon": _num,
            },
            "required": ["task", "deadline", "final_floor", "c0", "slope"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"task": {"const": "always"}, "floor": _num, "band": _num, "epsilon": _num},
            "required": ["task", "band"],
            "additionalProperties": False,
        },
    ]
}

_controller = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["general", "unicycle-aug", "unicycle-prac"]},
        "K": _num, "delta": _num, "K2": _num, "delta2": _num, "K_aug": _num, "delta_aug": _num,
        "kappa1": _gain, "kappa2": _gain, "kappa_aug": _gain,
        "v_min": _num, "alpha_band": _num,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "system": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["unicycle", "single-integrator"]},
                "n": {"type": "integer", "minimum": 1},
                "noise": {
                    "type": "object",
                    "properties": {
                        "cov_diag": _vec,
                        "clip_sigmas": {"type": ["number", "null"]},
                        "bound": _vec,
                        "scaling": {"enum": ["diffusion", "sample"]},
                    },
                    "required": ["cov_diag"],
                    "additionalProperties": False,
                },
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "x0": _vec,
        "predicates": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "kind": {"enum": ["circle-inside", "circle-outside", "halfplane"]},
                    "center": _vec, "radius": _num, "normal": _vec, "offset": _num,
                    "dims": {"type": "array", "items": {"type": "integer"}},
                },
                "required": ["kind"],
                "additionalProperties": False,
            },
        },
        "formula": {"type": "string"},
        "tasks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "psi": {"type": "string"},
                    "formula": {"type": "string"},
                    "funnel": _funnel,
                    "controller": _controller,
                },
                "required": ["name", "psi", "funnel", "controller"],
                "additionalProperties": False,
            },
        },
        "combiner": {
            "type": "object",
            "properties": {"input_limits": {"oneOf": [_vec, {"type": "null"}]}},
            "additionalProperties": False,
        },
        "sim": {
            "type": "object",
            "properties": {
                "dt": _num, "horizon": _num, "seed": {"type": "integer"},
                "record_stride": {"type": "integer", "minimum": 1}, "noise": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"plot_bounds": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4}},
            "additionalProperties": False,
        },
    },
    "required": ["system", "x0", "predicates", "formula", "tasks"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class Scenario:
    name: str
    model: object
    bundle: TaskBundle
    x0: tuple
    predicates: dict
    formula: StlFormula
    formula_text: str
    sim: SimConfig
    plot_bounds: Optional[tuple] = None
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def input_limits(self):
        return self.sim.input_limits

    def with_overrides(self, seed=None, noise=None, theta0=None, controller=None):
        """Copy with CLI-style overrides applied; ``controller`` is aug, prac or a full kind."""
        sim = self.sim
        if seed is not None:
            sim = replace(sim, seed=int(seed))
        if noise is not None:
            sim = replace(sim, noise=bool(noise))
        x0 = self.x0
        if theta0 is not None:
            if self.model.name != "unicycle":
                raise ScenarioError("theta0 override needs a unicycle system")
            x0 = tuple(x0[:2]) + (float(theta0),)
        bundle = self.bundle
        if controller is not None:
            kind = CONTROLLER_ALIASES.get(controller, controller)
            try:
                bundle = bundle.with_kind(kind)
            except ValueError as exc:
                raise ScenarioError(f"cannot switch to controller {controller!r}: {exc}") from exc
        return replace(self, sim=sim, x0=x0, bundle=bundle)


def bundled_names():
    root = resources.files("stlfunnel") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve(path_or_name) -> Path:
    p = Path(path_or_name)
    if p.exists():
        return p
    name = p.name[:-5] if p.name.endswith(".json") else p.name
    cand = resources.files("stlfunnel") / "scenarios" / f"{name}.json"
    if cand.is_file():
        return Path(str(cand))
    raise FileNotFoundError(f"no scenario file or bundled scenario named {str(path_or_name)!r}")


def load_scenario(path_or_name) -> Scenario:
    path = resolve(path_or_name)
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_dict(data, default_name=path.stem)


def validate(data):
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"schema violation at {where}: {exc.message}") from exc


def _model(block):
    kind = block["kind"]
    noise = None
    if "noise" in block:
        nb = block["noise"]
        noise = NoiseSpec(
            cov_diag=tuple(nb["cov_diag"]),
            clip_sigmas=nb.get("clip_sigmas", 4.0),
            bound=tuple(nb["bound"]) if "bound" in nb else None,
            scaling=nb.get("scaling", "diffusion"),
        )
    if kind == "unicycle":
        return unicycle_model(noise)
    return single_integrator(int(block.get("n", 2)), noise)


def _funnel(block, horizon):
    block = dict(block)
    eps = block.pop("epsilon", 1e-3)
    if "task" in block:
        kind = block.pop("task")
        return funnel_for_task(kind, horizon=horizon, epsilon=eps, **block)
    return FunnelSpec(Curve.from_dict(block["gamma"]), Curve.from_dict(block["Gamma"]), eps, horizon)


def _controller(block):
    kw = {k: v for k, v in block.items() if not k.startswith("kappa")}
    for key in ("kappa1", "kappa2", "kappa_aug"):
        if key in block:
            kw[key] = GainSchedule.from_dict(block[key])
    return ControllerSpec(**kw)


def scenario_from_dict(data, default_name="scenario") -> Scenario:
    validate(data)
    model = _model(data["system"])
    x0 = tuple(float(v) for v in data["x0"])
    if len(x0) != model.n:
        raise ScenarioError(f"x0 has {len(x0)} entries, system state has {model.n}")
    preds = {name: Predicate.from_dict(name, d) for name, d in data["predicates"].items()}

    sb = data.get("sim", {})
    limits = data.get("combiner", {}).get("input_limits")
    if limits is not None and len(limits) != model.m:
        raise ScenarioError(f"input_limits has {len(limits)} entries, system has {model.m} inputs")
    sim = SimConfig(
        dt=float(sb.get("dt", 0.005)),
        horizon=float(sb.get("horizon", 10.0)),
        seed=int(sb.get("seed", 0)),
        input_limits=tuple(float(v) for v in limits) if limits is not None else None,
        record_stride=int(sb.get("record_stride", 2)),
        noise=bool(sb.get("noise", True)),
    )

    try:
        formula = parse_formula(data["formula"], preds)
        tasks = []
        for tb in data["tasks"]:
            psi = parse_formula(tb["psi"], preds)
            tf = parse_formula(tb["formula"], preds) if "formula" in tb else None
            tasks.append(Task(tb["name"], psi, _funnel(tb["funnel"], sim.horizon), _controller(tb["controller"]), tf))
        bundle = TaskBundle(tasks, model)
    except (ValueError, TypeError, KeyError) as exc:
        raise ScenarioError(str(exc)) from exc

    bounds = data.get("output", {}).get("plot_bounds")
    return Scenario(
        name=data.get("name", default_name),
        model=model,
        bundle=bundle,
        x0=x0,
        predicates=preds,
        formula=formula,
        formula_text=data["formula"],
        sim=sim,
        plot_bounds=tuple(bounds) if bounds else None,
        raw=data,
    )


def load_predicates(path) -> dict:
    """Predicate table file: {"name": {"kind": ..., ...}, ...}, a scenario file or a bundled name."""
    with open(resolve(path)) as fh:
        data = json.load(fh)
    if "predicates" in data and isinstance(data["predicates"], dict) and "kind" not in data["predicates"]:
        data = data["predicates"]
    try:
        jsonschema.validate(data, SCHEMA["properties"]["predicates"])
    except jsonschema.ValidationError as exc:
        raise ScenarioError(f"predicate table: {exc.message}") from exc
    return {name: Predicate.from_dict(name, d) for name, d in data.items()}


def theta_steps(text):
    """Parse a theta0 axis: comma list of floats, ``pi``-expressions like 11pi/16 allowed."""
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            continue
        if "pi" in tok:
            num, _, den = tok.partition("/")
            coef = num.replace("pi", "") or "1"
            coef = {"-": "-1", "+": "1"}.get(coef, coef)
            val = float(coef) * math.pi / (float(den) if den else 1.0)
        else:
            val = float(tok)
        out.append(val)
    if not out:
        raise ValueError("empty theta0 list")
    return out
