"""Independent reference implementations used by the tests.

Nothing here imports the evaluator internals: the STL oracle works from the
textbook definition on sample times, finite differences are plain central
differences, and the structured test model carries hand-derived partials.
"""

import math

import numpy as np

from stlfunnel.dynamics import NoiseSpec, StructuredSplit, SystemModel
from stlfunnel.stl import Always, And, Atom, Eventually, Not, Predicate, TrueF, Until

TOL = 1e-9


def brute_rho(phi, times, h, i):
    """Robustness of ``phi`` at sample ``i``; ``h`` maps predicate name -> values."""
    t = times[i]
    if isinstance(phi, TrueF):
        return math.inf
    if isinstance(phi, Atom):
        return float(h[phi.predicate.name][i])
    if isinstance(phi, Not):
        return -brute_rho(phi.child, times, h, i)
    if isinstance(phi, And):
        return min(brute_rho(phi.left, times, h, i), brute_rho(phi.right, times, h, i))
    if isinstance(phi, (Eventually, Always, Until)):
        # a window is covered when no grid sample inside it lies past the end
        dt = times[1] - times[0] if len(times) > 1 else 1.0
        if t + phi.b >= times[-1] + dt - TOL:
            raise ValueError("window leaves the trace")
        win = [j for j in range(len(times)) if t + phi.a - TOL <= times[j] <= t + phi.b + TOL]
        if not win:
            raise LookupError("empty window")
        if isinstance(phi, Eventually):
            return max(brute_rho(phi.child, times, h, j) for j in win)
        if isinstance(phi, Always):
            return min(brute_rho(phi.child, times, h, j) for j in win)
        best = -math.inf
        for j in win:
            lhs = min(brute_rho(phi.left, times, h, k) for k in range(i, j + 1))
            best = max(best, min(brute_rho(phi.right, times, h, j), lhs))
        return best
    raise TypeError(phi)


def has_empty_window(phi, dt):
    for node in _walk(phi):
        if isinstance(node, (Eventually, Always, Until)) and node.b != math.inf:
            k = math.ceil(node.a / dt - TOL)
            if k * dt > node.b + TOL:
                return True
    return False


def _walk(phi):
    yield phi
    for attr in ("child", "left", "right"):
        if hasattr(phi, attr):
            yield from _walk(getattr(phi, attr))


def brute_horizon(phi, dt=0.5):
    """Last time offset whose sample the formula reads (bounds rounded to the grid)."""
    if isinstance(phi, (TrueF, Atom)):
        return 0.0
    if isinstance(phi, Not):
        return brute_horizon(phi.child, dt)
    if isinstance(phi, And):
        return max(brute_horizon(phi.left, dt), brute_horizon(phi.right, dt))
    reach = dt * math.floor(phi.b / dt + TOL)
    if isinstance(phi, (Eventually, Always)):
        return reach + brute_horizon(phi.child, dt)
    return reach + max(brute_horizon(phi.left, dt), brute_horizon(phi.right, dt))


def halfplane_preds(k=3):
    """Predicates reading one coordinate each: p_i has h = state[i]."""
    out = []
    for i in range(k):
        out.append(Predicate.halfplane(f"p{i}", (1.0, 0.0), 0.0, dims=(i, k)))
    return out


def random_formula(rng, preds, depth, bound_choices=(0.0, 0.5, 1.0, 1.5, 2.0, 0.75, 1.25)):
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.05:
            return TrueF()
        return Atom(preds[rng.integers(len(preds))])
    op = rng.integers(6)
    sub = lambda: random_formula(rng, preds, depth - 1, bound_choices)
    if op == 0:
        return Not(sub())
    if op == 1:
        return And(sub(), sub())
    a, b = sorted(rng.choice(bound_choices, 2))
    if a == b and a % 0.5:
        b = a + 0.25  # a point window off the grid holds no sample
    if op == 2:
        return Eventually(float(a), float(b), sub())
    if op == 3:
        return Always(float(a), float(b), sub())
    if op == 4:
        return Until(float(a), float(b), sub(), sub())
    return Not(sub())


def random_trace(rng, n_samples, k=3, dt=0.5, ties=False):
    """Trace whose state columns 0..k-1 are the predicate values; column k is padding."""
    if ties:
        vals = rng.integers(-2, 3, size=(n_samples, k)).astype(float)
    else:
        vals = rng.normal(size=(n_samples, k))
    states = np.hstack([vals, np.zeros((n_samples, 1))])
    times = dt * np.arange(n_samples)
    return times, states


def central_diff(f, x, h=1e-5):
    """Jacobian of f at x by central differences; f returns an array."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x), dtype=float)
    jac = np.zeros(f0.shape + x.shape)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        jac[..., k] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h)
    return jac


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    diff = np.abs(a - b).max(initial=0.0)
    return diff if scale < 1e-8 else diff / scale


def structured_test_model():
    """n1=2, n2=1, m1=1, m2=1 with nonzero drift and state-dependent g21/g22.

    f1 = (-0.3 a + sin b, 0.2 a^2), f2 = a th, g11 = (1 + 0.1 th^2)(cos th, sin th),
    g21 = 0.5 sin a, g22 = 1 + 0.2 cos th for x = (a, b, th).
    """
    def f1(x1):
        a, b = x1
        return np.array([-0.3 * a + math.sin(b), 0.2 * a * a])

    def df1_dx1(x1):
        a, b = x1
        return np.array([[-0.3, math.cos(b)], [0.4 * a, 0.0]])

    def f2(x):
        return np.array([x[0] * x[2]])

    def df2_dx(x):
        return np.array([[x[2], 0.0, x[0]]])

    def g11(x2):
        th = x2[0]
        s = 1 + 0.1 * th * th
        return s * np.array([[math.cos(th)], [math.sin(th)]])

    def dg11_dx2(x2):
        th = x2[0]
        s, ds = 1 + 0.1 * th * th, 0.2 * th
        return np.array([
            [[ds * math.cos(th) - s * math.sin(th)]],
            [[ds * math.sin(th) + s * math.cos(th)]],
        ])

    def g21(x):
        return np.array([[0.5 * math.sin(x[0])]])

    def dg21_dx(x):
        return np.array([[[0.5 * math.cos(x[0]), 0.0, 0.0]]])

    def g22(x):
        return np.array([[1 + 0.2 * math.cos(x[2])]])

    def dg22_dx(x):
        return np.array([[[0.0, 0.0, -0.2 * math.sin(x[2])]]])

    split = StructuredSplit(2, 1, 1, 1, f1, df1_dx1, f2, df2_dx, g11, dg11_dx2, g21, dg21_dx, g22, dg22_dx)

    def drift(x):
        return np.concatenate([f1(x[:2]), f2(x)])

    def gmat(x):
        g = np.zeros((3, 2))
        g[:2, :1] = g11(x[2:])
        g[2:, :1] = g21(x)
        g[2:, 1:] = g22(x)
        return g

    return SystemModel(3, 2, drift, gmat, NoiseSpec.none(3), split, name="test-structured")


def split_partial_errors(split, x, h=1e-6):
    """Relative error of every analytic partial in a StructuredSplit against central differences."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[: split.n1], x[split.n1:]
    return {
        "df1_dx1": rel_err(split.df1_dx1(x1), central_diff(split.f1, x1, h)),
        "df2_dx": rel_err(split.df2_dx(x), central_diff(split.f2, x, h)),
        "dg11_dx2": rel_err(split.dg11_dx2(x2), central_diff(split.g11, x2, h)),
        "dg21_dx": rel_err(split.dg21_dx(x), central_diff(split.g21, x, h)),
        "dg22_dx": rel_err(split.dg22_dx(x), central_diff(split.g22, x, h)),
    }
