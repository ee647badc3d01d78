"""Gradient-based funnel controllers.

All laws share one shape: zero above the funnel, otherwise

    u = kappa * K * c / (|c|^2 + delta)

for a coupling vector c. They differ in which robustness they serve and
which coupling vector they push along:

* ``general_control``: the whole input against v = g^T grad(rho).
* ``u1_control``: the first input block against v = g11^T grad_x1(rho).
* ``u2_aug_control``: the second block keeping |v| - v_min above zero.
* ``u2_practical_control``: the second block against the u2 term of the
  second derivative of rho, v2 = 2 delta/(|v|^2 + delta) (u1^T dv/dx2 g22)^T.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import coupling_coeffs, v_term
from .funnel import FunnelSpec, Region, RegionLabel, classify_bounds
from .stl.predicates import SINGULAR_FLOOR, SingularityError
from .stl.robustness import static_robustness

#: Exponent clamp for the exp-funnel gains.
EXP_CLAMP = 50.0

KINDS = ("general", "unicycle-aug", "unicycle-prac")


@dataclass(frozen=True)
class GainSchedule:
    """kappa as a function of the funnel position.

    ``exp-funnel``: scale * exp(-(rho - gamma)/(Gamma - rho))
    ``exp-funnel-offset``: max(0, feed + scale) * exp(...), feed = -G u1
    ``exact``: max(0, gamma_dot + feed + b_bar), independent of rho

    All are zero for rho >= Gamma.
    """

    kind: str
    scale: float = 1.0
    b_bar: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exp-funnel", "exp-funnel-offset", "exact"):
            raise ValueError(f"unknown gain schedule {self.kind!r}")
        if self.kind != "exact" and self.scale < 0:
            raise ValueError("gain scale must be non-negative")

    def __call__(self, rho, lo, hi, lo_dot=0.0, feed=0.0):
        if rho >= hi:
            return 0.0
        if self.kind == "exact":
            return max(0.0, lo_dot + feed + self.b_bar)
        arg = -(rho - lo) / (hi - rho)
        arg = min(max(arg, -EXP_CLAMP), EXP_CLAMP)
        amp = self.scale if self.kind == "exp-funnel" else max(0.0, feed + self.scale)
        return amp * math.exp(arg)

    def to_dict(self):
        if self.kind == "exact":
            return {"kind": "exact", "b_bar": self.b_bar}
        return {"kind": self.kind, "scale": self.scale}

    @classmethod
    def from_dict(cls, d):
        if d["kind"] == "exact":
            return cls("exact", b_bar=float(d.get("b_bar", 0.0)))
        return cls(d["kind"], scale=float(d["scale"]))


@dataclass(frozen=True)
class ControllerSpec:
    """Gains of one elementary controller.

    ``kappa2`` drives the practical u2 law, ``kappa_aug`` the augmented one;
    K2/delta2 and K_aug/delta_aug default to K/delta.
    """

    kind: str = "general"
    K: float = 1.0
    delta: float = 0.0
    kappa1: GainSchedule = field(default_factory=lambda: GainSchedule("exp-funnel", 1.0))
    kappa2: Optional[GainSchedule] = None
    kappa_aug: Optional[GainSchedule] = None
    K2: Optional[float] = None
    delta2: Optional[float] = None
    K_aug: Optional[float] = None
    delta_aug: Optional[float] = None
    v_min: float = 1e-3
    alpha_band: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}")
        for name in ("K2", "K_aug"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, self.K)
        for name in ("delta2", "delta_aug"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, self.delta)
        for name in ("K", "K2", "K_aug"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("delta", "delta2", "delta_aug"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.kind != "general":
            if not self.v_min > 0:
                raise ValueError("v_min must be positive")
            if not (self.v_min < self.alpha_band < 1 - self.v_min):
                raise ValueError("need v_min < alpha_band < 1 - v_min")
        if self.kind == "unicycle-aug" and self.kappa_aug is None:
            raise ValueError("unicycle-aug needs a kappa_aug schedule")
        if self.kind == "unicycle-prac" and self.kappa2 is None:
            raise ValueError("unicycle-prac needs a kappa2 schedule")
        if self.delta > 0 and (self.K - 1) * self.v_min ** 2 < self.delta:
            warnings.warn(
                f"(K - 1) v_min^2 >= delta fails for K={self.K}, delta={self.delta}: "
                "the lower funnel boundary is not guaranteed invariant",
                stacklevel=3,
            )

    def with_kind(self, kind):
        d = dict(self.__dict__)
        d["kind"] = kind
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ControllerSpec(**d)

    def aug_funnel_bounds(self):
        return 0.0, self.alpha_band


@dataclass
class TaskDiagnostics:
    label: RegionLabel
    kappa: float = 0.0
    rho: float = float("nan")
    weight: float = float("nan")
    v_norm: float = float("nan")
    saturated: bool = False
    singular: bool = False


@dataclass
class ControlOutput:
    u: np.ndarray
    diagnostics: list = field(default_factory=list)


def _law(kappa, K, c, delta):
    denom = float(c @ c) + delta
    if denom < SINGULAR_FLOOR ** 2:
        raise SingularityError("coupling vector vanishes with zero regularisation")
    return (kappa * K / denom) * c


def general_control(spec: ControllerSpec, psi, funnel: FunnelSpec, model, state, t) -> ControlOutput:
    """Full-input law for unstructured models."""
    state = np.asarray(state, dtype=float)
    rho = static_robustness(psi, state, 0)[0]
    lo, hi = funnel.bounds(t)
    label = classify_bounds(rho, lo, hi)
    if label.region is Region.UNCONTROLLED:
        return ControlOutput(np.zeros(model.m), [TaskDiagnostics(label)])
    v = v_term(model, psi, state)
    kappa = spec.kappa1(rho, lo, hi, funnel.gamma.deriv(t))
    u = _law(kappa, spec.K, v, spec.delta)
    return ControlOutput(u, [TaskDiagnostics(label, kappa, v_norm=float(np.linalg.norm(v)))])


def u1_control(spec: ControllerSpec, psi, funnel: FunnelSpec, model, state, t) -> np.ndarray:
    return u1_control_diag(spec, psi, funnel, model, state, t)[0]


def u1_control_diag(spec, psi, funnel, model, state, t):
    state = np.asarray(state, dtype=float)
    rho = static_robustness(psi, state, 0)[0]
    lo, hi = funnel.bounds(t)
    label = classify_bounds(rho, lo, hi)
    m1 = model.structure.m1
    if label.region is Region.UNCONTROLLED:
        return np.zeros(m1), TaskDiagnostics(label)
    v = v_term(model, psi, state)
    kappa = spec.kappa1(rho, lo, hi, funnel.gamma.deriv(t))
    return _law(kappa, spec.K, v, spec.delta), TaskDiagnostics(label, kappa, v_norm=float(np.linalg.norm(v)))


def augmented_robustness(model, psi, state, v_min: float) -> float:
    """|v(x)| - v_min."""
    return float(np.linalg.norm(v_term(model, psi, state))) - v_min


def u2_aug_control(spec: ControllerSpec, psi, funnel, model, state, t, u1) -> np.ndarray:
    """Second-input law keeping |v| above v_min.

    The augmented funnel is the constant pair (0, spec.alpha_band); ``funnel``
    is accepted for a uniform signature and not consulted.
    """
    return u2_aug_control_diag(spec, psi, model, state, t, u1)[0]


def u2_aug_control_diag(spec, psi, model, state, t, u1, coupling=None):
    state = np.asarray(state, dtype=float)
    m2 = model.structure.m2
    c = coupling if coupling is not None else coupling_coeffs(model, psi, state)
    rho_aug = c.v_norm - spec.v_min
    lo, hi = spec.aug_funnel_bounds()
    label = classify_bounds(rho_aug, lo, hi)
    if label.region is Region.UNCONTROLLED:
        return np.zeros(m2), TaskDiagnostics(label, v_norm=c.v_norm)
    if c.v_singular:
        raise SingularityError("|v| below floor: augmented coupling undefined")
    feed = -float(c.G @ np.atleast_1d(u1))
    kappa = spec.kappa_aug(rho_aug, lo, hi, 0.0, feed)
    u2 = _law(kappa, spec.K_aug, c.v_aug, spec.delta_aug)
    return u2, TaskDiagnostics(label, kappa, v_norm=c.v_norm)


def u2_practical_control(spec: ControllerSpec, psi, funnel: FunnelSpec, model, state, t, u1) -> np.ndarray:
    return u2_practical_control_diag(spec, psi, funnel, model, state, t, u1)[0]


def u2_practical_control_diag(spec, psi, funnel, model, state, t, u1, coupling=None):
    state = np.asarray(state, dtype=float)
    m2 = model.structure.m2
    lo, hi = funnel.bounds(t)
    if coupling is None:
        rho = static_robustness(psi, state, 0)[0]
        label = classify_bounds(rho, lo, hi)
        if label.region is Region.UNCONTROLLED:
            return np.zeros(m2), TaskDiagnostics(label)
        coupling = coupling_coeffs(model, psi, state)
    rho = coupling.rho
    label = classify_bounds(rho, lo, hi)
    if label.region is Region.UNCONTROLLED:
        return np.zeros(m2), TaskDiagnostics(label, v_norm=coupling.v_norm)
    v2 = coupling.v2_for(u1, spec.delta)
    kappa = spec.kappa2(rho, lo, hi, funnel.gamma.deriv(t))
    denom = float(v2 @ v2) + spec.delta2
    if denom < SINGULAR_FLOOR ** 2:
        # v2 vanishes legitimately (e.g. delta = 0 or u1 = 0)
        return np.zeros(m2), TaskDiagnostics(label, kappa, v_norm=coupling.v_norm)
    return (kappa * spec.K2 / denom) * v2, TaskDiagnostics(label, kappa, v_norm=coupling.v_norm)
