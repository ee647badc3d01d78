"""Control-affine system models and the input-coupling terms of a task.

Models have the form xdot = f(x) + g(x) u + w. Structured models split the
state into (x1, x2) and the input into (u1, u2) with

    x1dot = f1(x1) + g11(x2) u1             + w1
    x2dot = f2(x)  + g21(x)  u1 + g22(x) u2 + w2

which is the shape of the unicycle with x1 = (x, y), x2 = theta, u = (v, omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .stl.predicates import SINGULAR_FLOOR, SingularityError
from .stl.robustness import static_robustness


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean Gaussian process noise held constant over each step.

    ``cov_diag`` is a diffusion intensity (units^2/s): a step of length dt
    draws w ~ N(0, diag(cov)/dt), so the integrated disturbance has
    covariance diag(cov)*dt. With ``scaling="sample"`` the held value itself
    has covariance diag(cov) instead. Samples are clipped at ``clip_sigmas``
    standard deviations and then to ``[-bound, bound]``.
    """

    cov_diag: tuple = ()
    clip_sigmas: Optional[float] = 4.0
    bound: Optional[tuple] = None
    scaling: str = "diffusion"

    def __post_init__(self):
        cov = tuple(float(c) for c in self.cov_diag)
        if any(c < 0 for c in cov):
            raise ValueError("noise covariance must be non-negative")
        object.__setattr__(self, "cov_diag", cov)
        if self.scaling not in ("diffusion", "sample"):
            raise ValueError(f"unknown noise scaling {self.scaling!r}")
        if self.bound is not None:
            object.__setattr__(self, "bound", tuple(float(b) for b in self.bound))

    @property
    def active(self):
        return any(c > 0 for c in self.cov_diag)

    def sample(self, rng: np.random.Generator, dt: float) -> np.ndarray:
        cov = np.asarray(self.cov_diag)
        std = np.sqrt(cov / dt if self.scaling == "diffusion" else cov)
        w = std * rng.standard_normal(len(std))
        if self.clip_sigmas is not None:
            lim = self.clip_sigmas * std
            w = np.clip(w, -lim, lim)
        if self.bound is not None:
            b = np.asarray(self.bound)
            w = np.clip(w, -b, b)
        return w

    @classmethod
    def none(cls, n):
        return cls(cov_diag=(0.0,) * n)


@dataclass(frozen=True)
class StructuredSplit:
    """Block accessors of a structured model and their partial derivatives.

    Shapes: f1 (n1,), df1_dx1 (n1, n1), f2 (n2,), df2_dx (n2, n),
    g11 (n1, m1), dg11_dx2 (n1, m1, n2), g21 (n2, m1), dg21_dx (n2, m1, n),
    g22 (n2, m2), dg22_dx (n2, m2, n).
    """

    n1: int
    n2: int
    m1: int
    m2: int
    f1: Callable
    df1_dx1: Callable
    f2: Callable
    df2_dx: Callable
    g11: Callable
    dg11_dx2: Callable
    g21: Callable
    dg21_dx: Callable
    g22: Callable
    dg22_dx: Callable

    def split(self, x):
        return x[: self.n1], x[self.n1:]


@dataclass(frozen=True)
class SystemModel:
    n: int
    m: int
    drift: Callable
    input_map: Callable
    noise: NoiseSpec
    structure: Optional[StructuredSplit] = None
    wrap: Callable = field(default=lambda x: x)
    name: str = "custom"

    def __post_init__(self):
        s = self.structure
        if s is not None and (s.n1 + s.n2 != self.n or s.m1 + s.m2 != self.m):
            raise ValueError("structured block sizes do not add up to (n, m)")
        if len(self.noise.cov_diag) not in (0, self.n):
            raise ValueError("noise covariance has the wrong dimension")

    def xdot(self, x, u, w=None):
        dx = self.drift(x) + self.input_map(x) @ u
        return dx if w is None else dx + w


def wrap_angle(theta):
    """Wrap to (-pi, pi]."""
    r = math.remainder(theta, 2 * math.pi)
    return math.pi if r == -math.pi else r


def _wrap_heading(x):
    x = np.array(x, dtype=float)
    x[2] = wrap_angle(x[2])
    return x


def unicycle_model(noise: Optional[NoiseSpec] = None) -> SystemModel:
    """xdot = v cos(theta), ydot = v sin(theta), thetadot = omega."""
    noise = noise if noise is not None else NoiseSpec.none(3)
    z = np.zeros

    def g(x):
        c, s = math.cos(x[2]), math.sin(x[2])
        return np.array([[c, 0.0], [s, 0.0], [0.0, 1.0]])

    split = StructuredSplit(
        n1=2, n2=1, m1=1, m2=1,
        f1=lambda x1: z(2),
        df1_dx1=lambda x1: z((2, 2)),
        f2=lambda x: z(1),
        df2_dx=lambda x: z((1, 3)),
        g11=lambda x2: np.array([[math.cos(x2[0])], [math.sin(x2[0])]]),
        dg11_dx2=lambda x2: np.array([[[-math.sin(x2[0])]], [[math.cos(x2[0])]]]),
        g21=lambda x: z((1, 1)),
        dg21_dx=lambda x: z((1, 1, 3)),
        g22=lambda x: np.ones((1, 1)),
        dg22_dx=lambda x: z((1, 1, 3)),
    )
    return SystemModel(
        n=3, m=2, drift=lambda x: z(3), input_map=g, noise=noise,
        structure=split, wrap=_wrap_heading, name="unicycle",
    )


def single_integrator(n: int = 2, noise: Optional[NoiseSpec] = None) -> SystemModel:
    """xdot = u with g = I; unstructured."""
    noise = noise if noise is not None else NoiseSpec.none(n)
    eye = np.eye(n)
    return SystemModel(
        n=n, m=n, drift=lambda x: np.zeros(n), input_map=lambda x: eye,
        noise=noise, name="single-integrator",
    )


def unicycle_flow(state, u, t):
    """Exact unicycle state after time t under constant input u = (v, omega)."""
    x, y, th = state
    v, om = u
    if abs(om) < 1e-12:
        return np.array([x + v * t * math.cos(th), y + v * t * math.sin(th), th])
    th1 = th + om * t
    return np.array([
        x + v / om * (math.sin(th1) - math.sin(th)),
        y - v / om * (math.cos(th1) - math.cos(th)),
        th1,
    ])


def _x1_derivatives(model, psi, state, order):
    s = model.structure
    rho, grad, hess, _ = static_robustness(psi, state, order)
    if grad[s.n1:].any():
        raise ValueError("task robustness must depend on x1 only for a structured model")
    g1 = grad[: s.n1]
    h1 = None if hess is None else hess[: s.n1, : s.n1]
    return rho, g1, h1


def v_term(model: SystemModel, psi, state) -> np.ndarray:
    """Input-coupling vector v with rho_dot_u = v . u (or v . u1 when structured)."""
    state = np.asarray(state, dtype=float)
    s = model.structure
    if s is None:
        _, grad, _, _ = static_robustness(psi, state, 1)
        return model.input_map(state).T @ grad
    _, g1, _ = _x1_derivatives(model, psi, state, 1)
    return s.g11(state[s.n1:]).T @ g1


@dataclass(frozen=True)
class Coupling:
    """Coefficients of the robustness derivatives of a task at one state.

    ``G`` and ``v_aug`` are None when |v| is below the singularity floor;
    ``v2`` is None unless a u1 was supplied.
    """

    rho: float
    v: np.ndarray
    v_norm: float
    dv_dx1: np.ndarray
    dv_dx2: np.ndarray
    G: Optional[np.ndarray]
    v_aug: Optional[np.ndarray]
    v2: Optional[np.ndarray]
    state: np.ndarray
    model: SystemModel

    @property
    def v_singular(self):
        return self.G is None

    def v2_for(self, u1, delta):
        """u2 coefficient in the second derivative of rho under the u1 law."""
        if delta <= 0:
            return np.zeros(self.model.structure.m2)
        u1 = np.atleast_1d(np.asarray(u1, dtype=float))
        g22 = self.model.structure.g22(self.state)
        return (2.0 * delta / (self.v_norm ** 2 + delta)) * (u1 @ self.dv_dx2 @ g22)

    def F(self, w=None):
        """Drift-and-noise part of d/dt |v| (the unknown terms)."""
        if self.v_singular:
            raise SingularityError("|v| below floor; F is undefined")
        s = self.model.structure
        x1, _ = s.split(self.state)
        w = np.zeros(self.model.n) if w is None else np.asarray(w, dtype=float)
        unit = self.v / self.v_norm
        return float(unit @ (self.dv_dx1 @ (s.f1(x1) + w[: s.n1]) + self.dv_dx2 @ (s.f2(self.state) + w[s.n1:])))


def coupling_coeffs(model: SystemModel, psi, state, u1=None, delta: float = 0.0) -> Coupling:
    """v, its partials, G (coefficient of u1 in d|v|/dt), v_aug (of u2) and
    v2 = 2*delta/(|v|^2 + delta) * (u1^T dv/dx2 g22)^T.
    """
    s = model.structure
    if s is None:
        raise ValueError("coupling coefficients need a structured model")
    state = np.asarray(state, dtype=float)
    x1, x2 = s.split(state)
    rho, grad1, hess1 = _x1_derivatives(model, psi, state, 2)
    g11 = s.g11(x2)
    v = g11.T @ grad1
    dv_dx1 = g11.T @ hess1
    dg = s.dg11_dx2(x2)
    dv_dx2 = (grad1 @ dg.reshape(dg.shape[0], -1)).reshape(dg.shape[1:])
    v_norm = math.sqrt(float(v @ v))
    G = v_aug = None
    if v_norm >= SINGULAR_FLOOR:
        unit = v / v_norm
        G = unit @ (dv_dx1 @ g11 + dv_dx2 @ s.g21(state))
        v_aug = unit @ dv_dx2 @ s.g22(state)
    c = Coupling(rho, v, v_norm, dv_dx1, dv_dx2, G, v_aug, None, state, model)
    if u1 is not None:
        c = replace(c, v2=c.v2_for(u1, delta))
    return c
