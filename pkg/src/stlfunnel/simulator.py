"""Fixed-step closed-loop simulation and post-hoc STL checking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .combiner import TaskBundle, combine
from .controllers import augmented_robustness
from .stl.predicates import SingularityError
from .stl.robustness import RobustnessValue, eval_robustness


class SimulationError(RuntimeError):
    def __init__(self, message, t):
        super().__init__(f"t={t:.6g}s: {message}")
        self.t = t


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.005
    horizon: float = 10.0
    seed: int = 0
    input_limits: Optional[tuple] = None
    record_stride: int = 2
    noise: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.horizon < self.dt:
            raise ValueError("horizon must be at least one step")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    @property
    def n_steps(self):
        return int(round(self.horizon / self.dt))


@dataclass
class Trajectory:
    """Recorded closed-loop run; every array has one row per sample."""

    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    rho: np.ndarray
    gamma: np.ndarray
    Gamma: np.ndarray
    alpha: np.ndarray
    labels: list
    noise: np.ndarray
    rho_aug: np.ndarray
    task_names: Sequence[str] = ()
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def min_rho(self):
        return self.rho.min(axis=0)

    def min_margin(self):
        """min_t (rho_i - gamma_i) per task."""
        return (self.rho - self.gamma).min(axis=0)


def rk4_step(rhs, x, t, dt, w):
    """One classical RK4 step of xdot = rhs(x, t) + w with w held constant."""
    k1 = rhs(x, t) + w
    k2 = rhs(x + 0.5 * dt * k1, t + 0.5 * dt) + w
    k3 = rhs(x + 0.5 * dt * k2, t + 0.5 * dt) + w
    k4 = rhs(x + dt * k3, t + dt) + w
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def closed_loop_rhs(model, bundle, input_limits=None):
    def rhs(x, t):
        if bundle is None:
            return model.drift(x)
        u = combine(bundle, x, t, input_limits).u
        return model.drift(x) + model.input_map(x) @ u

    return rhs


def step(model, controller, state, t, dt, noise_sample=None, input_limits=None):
    """Advance one RK4 step; ``controller`` is a TaskBundle, a callable
    u(x, t), or None for the uncontrolled drift. Heading-type coordinates are
    wrapped after the step.
    """
    if isinstance(controller, TaskBundle) or controller is None:
        rhs = closed_loop_rhs(model, controller, input_limits)
    else:
        def rhs(x, tt):
            return model.drift(x) + model.input_map(x) @ np.asarray(controller(x, tt), dtype=float)
    w = np.zeros(model.n) if noise_sample is None else np.asarray(noise_sample, dtype=float)
    x = np.asarray(state, dtype=float)
    nxt = rk4_step(rhs, x, t, dt, w)
    if not np.all(np.isfinite(nxt)):
        raise SimulationError("non-finite state", t)
    return model.wrap(nxt)


def simulate(model, bundle: TaskBundle, x0, config: SimConfig) -> Trajectory:
    """Integrate from ``x0`` over [0, horizon]; funnel violations are recorded, never fatal."""
    rng = np.random.default_rng(config.seed)
    use_noise = config.noise and model.noise.active
    limits = config.input_limits
    dt = config.dt
    M = len(bundle.tasks)
    x = model.wrap(np.asarray(x0, dtype=float))

    rec_t, rec_x, rec_u, rec_w = [], [], [], []
    rec_rho, rec_lo, rec_hi, rec_a, rec_lab, rec_aug = [], [], [], [], [], []

    def control(xx, tt):
        try:
            return combine(bundle, xx, tt, limits)
        except SingularityError as exc:
            raise SimulationError(str(exc), tt) from exc

    def rhs(xx, tt):
        return model.drift(xx) + model.input_map(xx) @ control(xx, tt).u

    def record(tt, xx, out, w):
        rec_t.append(tt)
        rec_x.append(xx)
        rec_u.append(out.u)
        rec_w.append(w)
        rec_rho.append([d.rho for d in out.diagnostics])
        rec_a.append([d.weight for d in out.diagnostics])
        rec_lab.append([d.label.region.value for d in out.diagnostics])
        lo_hi = [task.funnel.bounds(tt) for task in bundle.tasks]
        rec_lo.append([b[0] for b in lo_hi])
        rec_hi.append([b[1] for b in lo_hi])
        aug = []
        for task in bundle.tasks:
            if task.controller.kind == "general":
                aug.append(math.nan)
                continue
            try:
                aug.append(augmented_robustness(model, task.psi, xx, task.controller.v_min))
            except SingularityError:
                aug.append(math.nan)
        rec_aug.append(aug)

    n_steps = config.n_steps
    for k in range(n_steps + 1):
        t = k * dt
        w = model.noise.sample(rng, dt) if (use_noise and k < n_steps) else np.zeros(model.n)
        out = control(x, t)
        if k % config.record_stride == 0:
            record(t, x, out, w)
        if k == n_steps:
            break
        k1 = model.drift(x) + model.input_map(x) @ out.u + w
        k2 = rhs(x + 0.5 * dt * k1, t + 0.5 * dt) + w
        k3 = rhs(x + 0.5 * dt * k2, t + 0.5 * dt) + w
        k4 = rhs(x + dt * k3, t + dt) + w
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise SimulationError("non-finite state", t + dt)
        x = model.wrap(x)

    return Trajectory(
        times=np.array(rec_t),
        states=np.array(rec_x),
        inputs=np.array(rec_u),
        rho=np.array(rec_rho, dtype=float).reshape(-1, M),
        gamma=np.array(rec_lo, dtype=float).reshape(-1, M),
        Gamma=np.array(rec_hi, dtype=float).reshape(-1, M),
        alpha=np.array(rec_a, dtype=float).reshape(-1, M),
        labels=rec_lab,
        noise=np.array(rec_w),
        rho_aug=np.array(rec_aug, dtype=float).reshape(-1, M),
        task_names=[t.name for t in bundle.tasks],
        seed=config.seed,
    )


def run(scenario) -> Trajectory:
    """Simulate a loaded Scenario."""
    traj = simulate(scenario.model, scenario.bundle, scenario.x0, scenario.sim)
    traj.meta["scenario"] = scenario.name
    return traj


def check_satisfaction(trace, phi) -> RobustnessValue:
    """Robustness of ``phi`` at t = 0 over the recorded grid."""
    return eval_robustness(phi, trace, float(trace.times[0]))


def _run_one(job):
    from dataclasses import replace
    from .scenario import scenario_from_dict

    raw, sim, x0, kind = job
    sc = scenario_from_dict(raw)
    sc = replace(sc, sim=sim, x0=x0)
    if kind is not None:
        sc = sc.with_overrides(controller=kind)
    return run(sc)


def run_batch(scenarios, workers: int = 1):
    """Run independent scenarios; results come back in input order.

    ``workers > 1`` uses a process pool; each worker rebuilds its scenario
    from the raw JSON data since models hold closures. Runs share nothing,
    so the result does not depend on ``workers``.
    """
    scenarios = list(scenarios)
    if workers <= 1 or len(scenarios) < 2:
        return [run(s) for s in scenarios]
    from concurrent.futures import ProcessPoolExecutor

    jobs = [(s.raw, s.sim, s.x0, s.bundle.tasks[0].controller.kind) for s in scenarios]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))
