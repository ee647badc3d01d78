"""Trace CSV reading and writing.

Columns: t, the state, the applied input, then rho/gamma/Gamma/alpha per
task (suffixed with the task index), then the noise sample. Values are
written with 9 significant digits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .stl.robustness import SampledTrace

STATE_COLS = ("x", "y", "theta")
INPUT_COLS = ("u1", "u2")


def _fmt(v):
    return format(float(v), ".9g")


def header(n_tasks, n=3, m=2):
    state = STATE_COLS if n == 3 else tuple(f"x{i + 1}" for i in range(n))
    inputs = INPUT_COLS if m == 2 else tuple(f"u{i + 1}" for i in range(m))
    cols = ["t", *state, *inputs]
    for i in range(1, n_tasks + 1):
        cols += [f"rho_{i}", f"gamma_{i}", f"Gamma_{i}", f"alpha_{i}"]
    cols += [f"w{i + 1}" for i in range(n)]
    return cols


def write_trace(traj, path):
    n = traj.states.shape[1]
    m = traj.inputs.shape[1]
    M = traj.rho.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header(M, n, m))
        for k in range(len(traj.times)):
            row = [traj.times[k], *traj.states[k], *traj.inputs[k]]
            for i in range(M):
                row += [traj.rho[k, i], traj.gamma[k, i], traj.Gamma[k, i], traj.alpha[k, i]]
            row += list(traj.noise[k])
            w.writerow([_fmt(v) for v in row])


@dataclass
class TraceTable:
    columns: list
    data: np.ndarray

    def col(self, name):
        return self.data[:, self.columns.index(name)]

    @property
    def times(self):
        return self.col("t")

    @property
    def n_tasks(self):
        return sum(1 for c in self.columns if c.startswith("rho_"))

    @property
    def states(self):
        w = [c for c in self.columns if c.startswith("w")]
        n = len(w)
        return self.data[:, 1:1 + n]

    def to_sampled(self) -> SampledTrace:
        return SampledTrace(self.times, self.states)


def read_trace(path) -> TraceTable:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trace file")
    cols = rows[0]
    if cols[:1] != ["t"]:
        raise ValueError(f"{path}: not a trace CSV (first column must be t)")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != len(cols):
        raise ValueError(f"{path}: ragged rows")
    return TraceTable(cols, data)
