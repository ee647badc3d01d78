"""Parametric predicate functions h(p) over a 2-D position projection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Below this distance a circle predicate has no defined gradient.
SINGULAR_FLOOR = 1e-9

KINDS = ("circle-inside", "circle-outside", "halfplane")


class SingularityError(ArithmeticError):
    """A gradient or coupling term is undefined at the requested state."""


@dataclass(frozen=True)
class Predicate:
    """Named predicate with h(p) >= 0 meaning true.

    ``circle-inside``: h = r - |p - c|
    ``circle-outside``: h = |p - c| - r
    ``halfplane``: h = n.p - b, with n normalised at construction

    ``dims`` picks the two state coordinates that form p.
    """

    name: str
    kind: str
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    normal: tuple[float, float] = (1.0, 0.0)
    offset: float = 0.0
    dims: tuple[int, int] = field(default=(0, 1))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown predicate kind {self.kind!r}")
        if self.kind == "halfplane":
            nx, ny = (float(c) for c in self.normal)
            norm = math.hypot(nx, ny)
            if norm == 0.0:
                raise ValueError("halfplane normal must be non-zero")
            object.__setattr__(self, "normal", (nx / norm, ny / norm))
            object.__setattr__(self, "offset", float(self.offset) / norm)
        else:
            if not self.radius > 0:
                raise ValueError(f"radius must be > 0, got {self.radius}")
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
            object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def circle_inside(cls, name, center, radius, dims=(0, 1)):
        return cls(name, "circle-inside", center=tuple(center), radius=radius, dims=tuple(dims))

    @classmethod
    def circle_outside(cls, name, center, radius, dims=(0, 1)):
        return cls(name, "circle-outside", center=tuple(center), radius=radius, dims=tuple(dims))

    @classmethod
    def halfplane(cls, name, normal, offset, dims=(0, 1)):
        return cls(name, "halfplane", normal=tuple(normal), offset=offset, dims=tuple(dims))

    @classmethod
    def from_dict(cls, name, d):
        kind = d["kind"]
        dims = tuple(d.get("dims", (0, 1)))
        if kind == "halfplane":
            return cls.halfplane(name, d["normal"], d["offset"], dims)
        return cls(name, kind, center=tuple(d["center"]), radius=d["radius"], dims=dims)

    def to_dict(self):
        if self.kind == "halfplane":
            d = {"kind": self.kind, "normal": list(self.normal), "offset": self.offset}
        else:
            d = {"kind": self.kind, "center": list(self.center), "radius": self.radius}
        if self.dims != (0, 1):
            d["dims"] = list(self.dims)
        return d

    def value(self, p):
        """h evaluated at a 2-vector ``p``."""
        if self.kind == "halfplane":
            return self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset
        dist = math.hypot(p[0] - self.center[0], p[1] - self.center[1])
        if self.kind == "circle-inside":
            return self.radius - dist
        return dist - self.radius

    def derivatives(self, p):
        """Return (h, dh/dp, d2h/dp2) at ``p``.

        Raises SingularityError at the centre of a circle.
        """
        if self.kind == "halfplane":
            return self.value(p), np.array(self.normal), np.zeros((2, 2))
        e = np.array([p[0] - self.center[0], p[1] - self.center[1]])
        dist = math.hypot(e[0], e[1])
        if dist < SINGULAR_FLOOR:
            raise SingularityError(f"predicate {self.name!r}: |p - c| below {SINGULAR_FLOOR}")
        unit = e / dist
        ux, uy = unit
        hess = np.array([[1.0 - ux * ux, -ux * uy], [-ux * uy, 1.0 - uy * uy]]) / dist
        if self.kind == "circle-inside":
            return self.radius - dist, -unit, -hess
        return dist - self.radius, unit, hess

    def project(self, state):
        return state[self.dims[0]], state[self.dims[1]]


def eval_predicate(p: Predicate, state_proj) -> float:
    return p.value(state_proj)
