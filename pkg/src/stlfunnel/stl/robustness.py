"""Discrete-time spatial robustness on a uniform sampling grid.

Temporal windows are closed and include both endpoint samples. Ties in
min/max are resolved toward the leftmost operand and the earliest sample,
so the reported active leaf is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .formula import TEMPORAL, Always, And, Atom, Eventually, Not, TrueF, Until, is_temporal, leaves

_GRID_TOL = 1e-9


class InsufficientHorizonError(ValueError):
    pass


class EmptyWindowError(ValueError):
    """A temporal window contains no sample of the grid."""


def _check_window(phi, lo, hi, dt):
    if hi is not None and hi < lo:
        raise EmptyWindowError(f"window [{phi.a:g},{phi.b:g}] holds no sample at dt={dt:g}")


class TemporalFormulaError(TypeError):
    """A temporal operator appeared where only a state formula is allowed."""


@dataclass(frozen=True)
class SampledTrace:
    """Minimal trace: uniform ``times`` (N,) and ``states`` (N, n)."""

    times: np.ndarray
    states: np.ndarray


@dataclass(frozen=True)
class RobustnessValue:
    value: float
    leaf: str
    time_index: int
    time: float

    @property
    def satisfied(self):
        return self.value > 0


def grid_step(times):
    times = np.asarray(times, dtype=float)
    if len(times) < 2:
        return 1.0
    steps = np.diff(times)
    dt = (times[-1] - times[0]) / (len(times) - 1)
    if not np.allclose(steps, dt, rtol=1e-6, atol=1e-12):
        raise ValueError("trace is not sampled on a uniform grid")
    return dt


def _steps(x, dt, up):
    if x == math.inf:
        return None
    r = x / dt
    return int(math.floor(r + _GRID_TOL)) if up else int(math.ceil(r - _GRID_TOL))


class _Sig:
    """Robustness signal of one subformula plus its active leaf per sample."""

    __slots__ = ("val", "leaf", "when")

    def __init__(self, val, leaf, when):
        self.val = val
        self.leaf = leaf
        self.when = when

    def __len__(self):
        return len(self.val)


def _window_extreme(sig, lo, hi, length, use_max):
    if hi is None:
        # window runs to the end of the child signal
        n = len(sig)
        out_v = np.empty(length)
        out_j = np.empty(length, dtype=int)
        best = -1
        for i in range(n - 1, -1, -1):
            if best < 0 or (sig.val[i] >= sig.val[best] if use_max else sig.val[i] <= sig.val[best]):
                best = i
            k = i - lo
            if 0 <= k < length:
                out_v[k] = sig.val[best]
                out_j[k] = best
        return out_v, out_j
    windows = sliding_window_view(sig.val, hi - lo + 1)[lo:lo + length]
    pick = np.argmax(windows, axis=1) if use_max else np.argmin(windows, axis=1)
    idx = np.arange(length) + lo + pick
    return sig.val[idx], idx


def _signal(phi, states, dt, counter):
    if isinstance(phi, TrueF):
        k = next(counter)
        n = len(states)
        return _Sig(np.full(n, math.inf), np.full(n, k), np.arange(n))
    if isinstance(phi, Atom):
        k = next(counter)
        p = phi.predicate
        i, j = p.dims
        if p.kind == "halfplane":
            h = p.normal[0] * states[:, i] + p.normal[1] * states[:, j] - p.offset
        else:
            dist = np.hypot(states[:, i] - p.center[0], states[:, j] - p.center[1])
            h = p.radius - dist if p.kind == "circle-inside" else dist - p.radius
        return _Sig(h, np.full(len(h), k), np.arange(len(h)))
    if isinstance(phi, Not):
        s = _signal(phi.child, states, dt, counter)
        return _Sig(-s.val, s.leaf, s.when)
    if isinstance(phi, And):
        left = _signal(phi.left, states, dt, counter)
        right = _signal(phi.right, states, dt, counter)
        n = min(len(left), len(right))
        lv, rv = left.val[:n], right.val[:n]
        take_left = lv <= rv
        return _Sig(
            np.where(take_left, lv, rv),
            np.where(take_left, left.leaf[:n], right.leaf[:n]),
            np.where(take_left, left.when[:n], right.when[:n]),
        )
    if isinstance(phi, (Eventually, Always)):
        child = _signal(phi.child, states, dt, counter)
        lo, hi = _steps(phi.a, dt, False), _steps(phi.b, dt, True)
        _check_window(phi, lo, hi, dt)
        length = len(child) - (lo if hi is None else hi)
        if length <= 0:
            return _Sig(np.empty(0), np.empty(0, dtype=int), np.empty(0, dtype=int))
        vals, idx = _window_extreme(child, lo, hi, length, isinstance(phi, Eventually))
        return _Sig(vals, child.leaf[idx], child.when[idx])
    if isinstance(phi, Until):
        return _until(phi, states, dt, counter)
    raise TypeError(f"not an STL formula: {phi!r}")


def _until(phi, states, dt, counter):
    left = _signal(phi.left, states, dt, counter)
    right = _signal(phi.right, states, dt, counter)
    n = min(len(left), len(right))
    lo, hi = _steps(phi.a, dt, False), _steps(phi.b, dt, True)
    _check_window(phi, lo, hi, dt)
    length = n - (lo if hi is None else hi)
    length = max(length, 0)
    vals = np.empty(length)
    leaf = np.empty(length, dtype=int)
    when = np.empty(length, dtype=int)
    for i in range(length):
        end = n - 1 if hi is None else i + hi
        run = left.val[i:end + 1]
        prefix = np.minimum.accumulate(run)
        cand = np.minimum(right.val[i + lo:end + 1], prefix[lo:])
        j = int(np.argmax(cand))
        t1 = i + lo + j
        vals[i] = cand[j]
        if prefix[lo + j] <= right.val[t1]:
            src = i + int(np.argmin(run[:lo + j + 1]))
            leaf[i], when[i] = left.leaf[src], left.when[src]
        else:
            leaf[i], when[i] = right.leaf[t1], right.when[t1]
    return _Sig(vals, leaf, when)


def _leaf_name(leaf):
    return "true" if isinstance(leaf, TrueF) else leaf.name


def robustness_signal(phi, trace):
    """Robustness of ``phi`` at every sample where its horizon fits.

    Returns (times, values); the arrays are shorter than the trace by the
    formula's horizon in samples.
    """
    states = np.asarray(trace.states, dtype=float)
    dt = grid_step(trace.times)
    sig = _signal(phi, states, dt, iter(range(1 << 62)))
    return np.asarray(trace.times)[: len(sig)], sig.val


def eval_robustness(phi, trace, t: float = 0.0) -> RobustnessValue:
    times = np.asarray(trace.times, dtype=float)
    states = np.asarray(trace.states, dtype=float)
    dt = grid_step(times)
    i = int(round((t - times[0]) / dt))
    if i < 0 or abs(times[0] + i * dt - t) > 1e-6 * max(dt, 1.0):
        raise ValueError(f"t={t} is not a sample time of the trace")
    sig = _signal(phi, states, dt, iter(range(1 << 62)))
    if i >= len(sig):
        raise InsufficientHorizonError(
            f"trace ends at {times[-1]:g}s; formula needs samples up to "
            f"{t:g}s plus its horizon at t={t}"
        )
    names = leaves(phi)
    k = int(sig.when[i])
    return RobustnessValue(float(sig.val[i]), _leaf_name(names[int(sig.leaf[i])]), k, float(times[k]))


def active_leaf(psi, state):
    """Return (value, sign, leaf) realising a state formula's robustness.

    ``sign`` is -1 when an odd number of negations sits above the leaf.
    """
    if isinstance(psi, TEMPORAL):
        raise TemporalFormulaError(f"temporal operator in state formula: {psi}")
    if isinstance(psi, TrueF):
        return math.inf, 1.0, psi
    if isinstance(psi, Atom):
        return psi.predicate.value(psi.predicate.project(state)), 1.0, psi
    if isinstance(psi, Not):
        v, sign, leaf = active_leaf(psi.child, state)
        return -v, -sign, leaf
    if isinstance(psi, And):
        left = active_leaf(psi.left, state)
        right = active_leaf(psi.right, state)
        return left if left[0] <= right[0] else right
    raise TypeError(f"not an STL formula: {psi!r}")


def static_robustness(psi, state, order=1):
    """Value, gradient and (``order=2``) Hessian of a state formula.

    Derivatives are those of the active leaf, taken with respect to the full
    state vector. Returns (value, grad, hess, leaf_name); grad/hess are None
    when ``order`` is lower.
    """
    if is_temporal(psi):
        raise TemporalFormulaError(f"temporal operator in state formula: {psi}")
    n = len(state)
    value, sign, leaf = active_leaf(psi, state)
    name = _leaf_name(leaf)
    grad = hess = None
    if isinstance(leaf, TrueF):
        if order >= 1:
            grad = np.zeros(n)
        if order >= 2:
            hess = np.zeros((n, n))
        return value, grad, hess, name
    if order == 0:
        return value, None, None, name
    p = leaf.predicate
    _, dh, d2h = p.derivatives(p.project(state))
    i, j = p.dims
    grad = np.zeros(n)
    grad[i], grad[j] = sign * dh[0], sign * dh[1]
    if order >= 2:
        hess = np.zeros((n, n))
        hess[i, i], hess[i, j] = sign * d2h[0, 0], sign * d2h[0, 1]
        hess[j, i], hess[j, j] = sign * d2h[1, 0], sign * d2h[1, 1]
    return value, grad, hess, name


def robustness_gradient(psi, state):
    """Gradient of a non-temporal formula's robustness at ``state``."""
    return static_robustness(psi, np.asarray(state, dtype=float), order=1)[1]
