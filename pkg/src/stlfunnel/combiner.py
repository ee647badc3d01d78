"""Funnel-priority blending of elementary controllers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .controllers import (
    ControlOutput,
    ControllerSpec,
    TaskDiagnostics,
    _law,
    general_control,
    u2_aug_control_diag,
    u2_practical_control_diag,
)
from .dynamics import SystemModel, coupling_coeffs
from .funnel import FunnelSpec, Region, classify_bounds
from .stl.formula import StlFormula, is_temporal
from .stl.predicates import SingularityError
from .stl.robustness import static_robustness


@dataclass(frozen=True)
class Task:
    name: str
    psi: StlFormula
    funnel: FunnelSpec
    controller: ControllerSpec
    formula: Optional[StlFormula] = None  # temporal task certified by the funnel

    def __post_init__(self):
        if is_temporal(self.psi):
            raise ValueError(f"task {self.name!r}: psi must be a state formula")


@dataclass(frozen=True)
class TaskBundle:
    tasks: Sequence[Task]
    model: SystemModel

    def __post_init__(self):
        kinds = {t.controller.kind for t in self.tasks}
        if "general" in kinds and len(kinds) > 1:
            raise ValueError("cannot mix general and structured controllers in one bundle")
        if kinds - {"general"} and self.model.structure is None:
            raise ValueError("structured controllers need a structured model")

    def with_kind(self, kind):
        tasks = [Task(t.name, t.psi, t.funnel, t.controller.with_kind(kind), t.formula) for t in self.tasks]
        return TaskBundle(tasks, self.model)


def weight(funnel: FunnelSpec, rho: float, t: float) -> float:
    """(Gamma - rho)/(Gamma - gamma) below Gamma, else 0; exceeds 1 below gamma."""
    lo, hi = funnel.bounds(t)
    return weight_bounds(rho, lo, hi)


def weight_bounds(rho, lo, hi):
    if rho > hi:
        return 0.0
    return (hi - rho) / (hi - lo)


@dataclass
class Combined(ControlOutput):
    u1_consensus: Optional[np.ndarray] = None
    saturated: bool = False
    singular: list = field(default_factory=list)


def _average(values, weights):
    nonzero = [i for i, a in enumerate(weights) if a]
    if len(nonzero) == 1:
        # exact reduction to the one active task
        return np.array(values[nonzero[0]], dtype=float)
    total = sum(weights)
    acc = np.zeros_like(values[0])
    for a, v in zip(weights, values):
        if a:
            acc = acc + a * v
    return acc / total


def _saturate(u, limits):
    if limits is None:
        return u, False
    lim = np.asarray(limits, dtype=float)
    clipped = np.maximum(np.minimum(u, lim), -lim)
    return clipped, bool((clipped != u).any())


def combine(bundle: TaskBundle, state, t, input_limits=None) -> Combined:
    """Weighted consensus of the elementary laws.

    u1 is averaged first; the second-input laws are then evaluated at the
    (saturated) consensus u1 and averaged with the same weights. A single
    task returns its elementary control unchanged.
    """
    state = np.asarray(state, dtype=float)
    model = bundle.model
    tasks = bundle.tasks
    single = len(tasks) == 1
    diags = []
    weights = []
    for task in tasks:
        rho = static_robustness(task.psi, state, 0)[0]
        lo, hi = task.funnel.bounds(t)
        a = weight_bounds(rho, lo, hi)
        weights.append(a)
        diags.append(TaskDiagnostics(classify_bounds(rho, lo, hi), rho=rho, weight=a))
    total = sum(weights)
    active = [single or a > 0 for a in weights]

    if tasks[0].controller.kind == "general":
        outs = []
        for task, d, on in zip(tasks, diags, active):
            if not on:
                outs.append(np.zeros(model.m))
                continue
            try:
                o = general_control(task.controller, task.psi, task.funnel, model, state, t)
                d.kappa, d.v_norm = o.diagnostics[0].kappa, o.diagnostics[0].v_norm
                outs.append(o.u)
            except SingularityError:
                d.singular = True
                outs.append(np.zeros(model.m))
        if single:
            u = outs[0]
        else:
            u = _average(outs, weights) if total > 0 else np.zeros(model.m)
        u, sat = _saturate(u, input_limits)
        return Combined(u, diags, None, sat, [d.singular for d in diags])

    s = model.structure
    lim1 = lim2 = None
    if input_limits is not None:
        lim1, lim2 = input_limits[: s.m1], input_limits[s.m1:]
    couplings = []
    u1s = []
    for task, d, on in zip(tasks, diags, active):
        c = None
        u1 = np.zeros(s.m1)
        if on:
            try:
                c = coupling_coeffs(model, task.psi, state)
                d.v_norm = c.v_norm
                if d.label.region is not Region.UNCONTROLLED:
                    spec = task.controller
                    lo, hi = task.funnel.bounds(t)
                    d.kappa = spec.kappa1(d.rho, lo, hi, task.funnel.gamma.deriv(t))
                    u1 = _law(d.kappa, spec.K, c.v, spec.delta)
            except SingularityError:
                d.singular = True
                c = None
        couplings.append(c)
        u1s.append(u1)
    if single:
        u1 = u1s[0]
    else:
        u1 = _average(u1s, weights) if total > 0 else np.zeros(s.m1)
    u1, sat1 = _saturate(u1, lim1)

    u2s = []
    for task, d, c in zip(tasks, diags, couplings):
        u2 = np.zeros(s.m2)
        if c is not None:
            spec = task.controller
            try:
                if spec.kind == "unicycle-aug":
                    u2 = u2_aug_control_diag(spec, task.psi, model, state, t, u1, coupling=c)[0]
                else:
                    u2 = u2_practical_control_diag(spec, task.psi, task.funnel, model, state, t, u1, coupling=c)[0]
            except SingularityError:
                d.singular = True
        u2s.append(u2)
    if single:
        u2 = u2s[0]
    else:
        u2 = _average(u2s, weights) if total > 0 else np.zeros(s.m2)
    u2, sat2 = _saturate(u2, lim2)
    sat = sat1 or sat2
    for d in diags:
        d.saturated = sat
    return Combined(np.concatenate([u1, u2]), diags, u1, sat, [d.singular for d in diags])
