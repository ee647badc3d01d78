"""Self-contained SVG plots with deterministic output.

Coordinates are printed with fixed precision so identical inputs give
identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
W, H = 480, 480
PAD = 40


def _f(v):
    return f"{v:.2f}"


class _Frame:
    """Affine map from data coordinates to the plotting box."""

    def __init__(self, xlim, ylim, width, height, pad=PAD, equal=False):
        x0, x1 = xlim
        y0, y1 = ylim
        if x1 <= x0:
            x0, x1 = x0 - 1, x1 + 1
        if y1 <= y0:
            y0, y1 = y0 - 1, y1 + 1
        sx = (width - 2 * pad) / (x1 - x0)
        sy = (height - 2 * pad) / (y1 - y0)
        if equal:
            sx = sy = min(sx, sy)
        self.x0, self.y0, self.sx, self.sy = x0, y0, sx, sy
        self.pad, self.height = pad, height
        self.xlim, self.ylim = (x0, x1), (y0, y1)

    def px(self, x):
        return self.pad + (x - self.x0) * self.sx

    def py(self, y):
        return self.height - self.pad - (y - self.y0) * self.sy

    def path(self, xs, ys):
        pts = [(self.px(a), self.py(b)) for a, b in zip(xs, ys) if math.isfinite(a) and math.isfinite(b)]
        if not pts:
            return ""
        head = f"M{_f(pts[0][0])},{_f(pts[0][1])}"
        return head + "".join(f" L{_f(x)},{_f(y)}" for x, y in pts[1:])


def _doc(width, height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def _axes(fr: _Frame, xlabel, ylabel, ticks=5):
    out = []
    (x0, x1), (y0, y1) = fr.xlim, fr.ylim
    out.append(
        f'<rect x="{_f(fr.px(x0))}" y="{_f(fr.py(y1))}" width="{_f(fr.px(x1) - fr.px(x0))}" '
        f'height="{_f(fr.py(y0) - fr.py(y1))}" fill="none" stroke="#444" stroke-width="1"/>'
    )
    for i in range(ticks + 1):
        xv = x0 + (x1 - x0) * i / ticks
        yv = y0 + (y1 - y0) * i / ticks
        out.append(f'<text x="{_f(fr.px(xv))}" y="{_f(fr.py(y0) + 14)}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{_f(fr.px(x0) - 4)}" y="{_f(fr.py(yv) + 4)}" text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{_f((fr.px(x0) + fr.px(x1)) / 2)}" y="{_f(fr.py(y0) + 30)}" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="12" y="{_f((fr.py(y0) + fr.py(y1)) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 12 {_f((fr.py(y0) + fr.py(y1)) / 2)})">{ylabel}</text>'
    )
    return out


def _legend(fr: _Frame, entries):
    out = []
    x = fr.px(fr.xlim[0]) + 8
    y = fr.py(fr.ylim[1]) + 14
    for i, (label, color, dash) in enumerate(entries):
        yy = y + 14 * i
        d = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{_f(x)}" y1="{_f(yy - 4)}" x2="{_f(x + 18)}" y2="{_f(yy - 4)}" stroke="{color}" stroke-width="2"{d}/>')
        out.append(f'<text x="{_f(x + 22)}" y="{_f(yy)}">{label}</text>')
    return out


def _auto_bounds(trajs, predicates, margin=0.3):
    xs, ys = [], []
    for tr in trajs:
        xs += [float(np.nanmin(tr.states[:, 0])), float(np.nanmax(tr.states[:, 0]))]
        ys += [float(np.nanmin(tr.states[:, 1])), float(np.nanmax(tr.states[:, 1]))]
    for p in predicates:
        if p.kind != "halfplane":
            xs += [p.center[0] - p.radius, p.center[0] + p.radius]
            ys += [p.center[1] - p.radius, p.center[1] + p.radius]
    return (min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin)


def trajectory_svg(trajs, predicates=(), bounds=None, labels=None, title=None):
    """Overhead view of one or more planar trajectories with circular predicate regions.

    Inside-type discs are drawn green, outside-type (obstacles) grey.
    """
    trajs = list(trajs)
    predicates = list(predicates)
    if bounds is None:
        bounds = _auto_bounds(trajs, predicates)
    fr = _Frame(bounds[:2], bounds[2:], W, H, equal=True)
    body = _axes(fr, "x", "y")
    for p in predicates:
        if p.kind == "halfplane":
            continue
        fill = "#b7e4c7" if p.kind == "circle-inside" else "#cccccc"
        body.append(
            f'<circle cx="{_f(fr.px(p.center[0]))}" cy="{_f(fr.py(p.center[1]))}" r="{_f(p.radius * fr.sx)}" '
            f'fill="{fill}" stroke="#555" stroke-width="1"/>'
        )
        body.append(f'<text x="{_f(fr.px(p.center[0]))}" y="{_f(fr.py(p.center[1]) + 4)}" text-anchor="middle">{p.name}</text>')
    entries = []
    for i, tr in enumerate(trajs):
        color = PALETTE[i % len(PALETTE)]
        body.append(f'<path d="{fr.path(tr.states[:, 0], tr.states[:, 1])}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        x, y = tr.states[0, 0], tr.states[0, 1]
        body.append(f'<circle cx="{_f(fr.px(x))}" cy="{_f(fr.py(y))}" r="3" fill="{color}"/>')
        if tr.states.shape[1] >= 3:
            th = tr.states[0, 2]
            body.append(
                f'<line x1="{_f(fr.px(x))}" y1="{_f(fr.py(y))}" x2="{_f(fr.px(x) + 14 * math.cos(th))}" '
                f'y2="{_f(fr.py(y) - 14 * math.sin(th))}" stroke="{color}" stroke-width="2"/>'
            )
        if labels is not None:
            entries.append((labels[i], color, None))
    if entries:
        body += _legend(fr, entries)
    if title:
        body.append(f'<text x="{W / 2:.2f}" y="16" text-anchor="middle" font-size="13">{title}</text>')
    return _doc(W, H, body)


def robustness_svg(traj, extra=None, title=None):
    """rho_i(t) against its funnel (gamma_i dashed, Gamma_i dotted) for every task.

    ``extra`` is an optional list of (label, values, lower, upper) series,
    e.g. the augmented robustness with its constant bounds.
    """
    t = traj.times
    series = []
    for i, name in enumerate(traj.task_names):
        series.append((name, traj.rho[:, i], traj.gamma[:, i], traj.Gamma[:, i]))
    for item in extra or ():
        series.append(item)
    vals = np.concatenate([np.concatenate([s[1], s[2], s[3]]) for s in series])
    vals = vals[np.isfinite(vals)]
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo or 1.0
    fr = _Frame((float(t[0]), float(t[-1])), (lo - 0.05 * span, hi + 0.05 * span), 640, 400)
    body = _axes(fr, "t [s]", "robustness")
    entries = []
    for i, (name, rho, gam, Gam) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        body.append(f'<path d="{fr.path(t, gam)}" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="6 3"/>')
        body.append(f'<path d="{fr.path(t, Gam)}" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="2 2"/>')
        body.append(f'<path d="{fr.path(t, rho)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        entries.append((f"rho {name}", color, None))
    body.append(f'<line x1="{_f(fr.px(t[0]))}" y1="{_f(fr.py(0))}" x2="{_f(fr.px(t[-1]))}" y2="{_f(fr.py(0))}" stroke="#999" stroke-width="0.5"/>')
    body += _legend(fr, entries + [("lower curve", "#444", "6 3"), ("upper curve", "#444", "2 2")])
    if title:
        body.append(f'<text x="320" y="16" text-anchor="middle" font-size="13">{title}</text>')
    return _doc(640, 400, body)


def write(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
