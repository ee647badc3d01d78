"""Specification curves and the region classification they induce.

A funnel is a lower curve gamma(t), which the robustness must stay above,
and an upper curve Gamma(t) above which the controller is switched off.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_EPSILON = 1e-3


class FunnelError(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    """``constant`` c, ``affine`` c0 + slope*t, or ``affine-capped``
    min(cap, c0 + slope*t).

    At the cap kink the derivative is taken from the affine branch.
    """

    kind: str
    c0: float = 0.0
    slope: float = 0.0
    cap: float = math.inf

    def __post_init__(self):
        if self.kind not in ("constant", "affine", "affine-capped"):
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def constant(cls, c):
        return cls("constant", c0=float(c))

    @classmethod
    def affine(cls, c0, slope):
        return cls("affine", c0=float(c0), slope=float(slope))

    @classmethod
    def affine_capped(cls, c0, slope, cap):
        return cls("affine-capped", c0=float(c0), slope=float(slope), cap=float(cap))

    def value(self, t):
        if self.kind == "constant":
            return self.c0
        v = self.c0 + self.slope * t
        if self.kind == "affine-capped" and v > self.cap:
            return self.cap
        return v

    def deriv(self, t):
        if self.kind == "constant":
            return 0.0
        if self.kind == "affine-capped" and self.c0 + self.slope * t > self.cap:
            return 0.0
        return self.slope

    def __call__(self, t):
        return self.value(t)

    def to_dict(self):
        if self.kind == "constant":
            return {"kind": "constant", "c": self.c0}
        d = {"kind": self.kind, "c0": self.c0, "slope": self.slope}
        if self.kind == "affine-capped":
            d["cap"] = self.cap
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == "constant":
            return cls.constant(d["c"])
        if kind == "affine":
            return cls.affine(d["c0"], d["slope"])
        if kind == "affine-capped":
            return cls.affine_capped(d["c0"], d["slope"], d["cap"])
        raise ValueError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class FunnelSpec:
    gamma: Curve
    Gamma: Curve
    epsilon: float = DEFAULT_EPSILON
    horizon: float = 10.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise FunnelError("epsilon must be positive")
        ts = np.linspace(0.0, self.horizon, 4001)
        gap = np.array([self.Gamma(t) - self.gamma(t) for t in ts])
        if gap.min() < self.epsilon - 1e-12:
            k = int(np.argmin(gap))
            raise FunnelError(
                f"Gamma - gamma = {gap[k]:.4g} < epsilon = {self.epsilon} at t = {ts[k]:.4g}"
            )

    def bounds(self, t):
        return self.gamma(t), self.Gamma(t)

    def to_dict(self):
        return {
            "gamma": self.gamma.to_dict(),
            "Gamma": self.Gamma.to_dict(),
            "epsilon": self.epsilon,
        }


class Region(enum.Enum):
    UNCONTROLLED = "uncontrolled"
    INTEREST = "interest"
    VIOLATION = "violation"


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    s: float | None = None  # (Gamma - rho) / (Gamma - gamma), only inside the funnel


def classify(spec: FunnelSpec, rho: float, t: float) -> RegionLabel:
    lo, hi = spec.bounds(t)
    return classify_bounds(rho, lo, hi)


def classify_bounds(rho, lo, hi):
    if rho > hi:
        return RegionLabel(Region.UNCONTROLLED)
    if rho < lo:
        return RegionLabel(Region.VIOLATION)
    return RegionLabel(Region.INTEREST, (hi - rho) / (hi - lo))


def funnel_for_task(kind: str, *, horizon: float = 10.0, epsilon: float = DEFAULT_EPSILON, **p) -> FunnelSpec:
    """Build the curve pair for an ``eventually`` or ``always`` task.

    eventually: gamma = min(gamma_cap, c0 + slope*t), Gamma = min(final_floor, c0 + band + slope*t).
    ``gamma_cap`` defaults to 0, the lowest level that still certifies the
    task once reached; it keeps gamma below Gamma after the rise.

    always: gamma = floor, Gamma = floor + band.
    """
    if kind == "eventually":
        deadline = float(p.pop("deadline"))
        final_floor = float(p.pop("final_floor"))
        c0 = float(p.pop("c0"))
        slope = float(p.pop("slope"))
        band = float(p.pop("band", 1.0))
        gamma_cap = float(p.pop("gamma_cap", 0.0))
        _no_extra(p)
        if not deadline > 0:
            raise FunnelError("deadline must be positive")
        if not band > 0:
            raise FunnelError("band must be positive")
        if gamma_cap < 0:
            raise FunnelError("gamma_cap below 0 cannot certify an eventually task")
        if c0 < 0 and (slope <= 0 or -c0 / slope > deadline):
            raise FunnelError(f"gamma = {c0} + {slope}*t does not reach 0 by t = {deadline}")
        gamma = Curve.affine_capped(c0, slope, gamma_cap)
        Gamma = Curve.affine_capped(c0 + band, slope, final_floor)
        return FunnelSpec(gamma, Gamma, epsilon, horizon)
    if kind == "always":
        floor = float(p.pop("floor", 0.0))
        band = float(p.pop("band"))
        _no_extra(p)
        if not band > 0:
            raise FunnelError("band must be positive")
        return FunnelSpec(Curve.constant(floor), Curve.constant(floor + band), epsilon, horizon)
    raise ValueError(f"unknown task kind {kind!r}")


def _no_extra(p):
    if p:
        raise TypeError(f"unexpected funnel parameters: {sorted(p)}")
