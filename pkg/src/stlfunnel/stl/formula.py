"""STL formula tree and its canonical text form.

Temporal bounds are in seconds. An upper bound of ``math.inf`` means the
window extends to the end of whatever trace the formula is evaluated on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .predicates import Predicate


class StlFormula:
    """Base class for formula nodes."""

    def __and__(self, other):
        return And(self, other)

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class TrueF(StlFormula):
    pass


@dataclass(frozen=True)
class Atom(StlFormula):
    predicate: Predicate

    @property
    def name(self):
        return self.predicate.name


@dataclass(frozen=True)
class Not(StlFormula):
    child: StlFormula


@dataclass(frozen=True)
class And(StlFormula):
    left: StlFormula
    right: StlFormula


def _check_bounds(a, b):
    if not (0 <= a <= b):
        raise ValueError(f"time bounds must satisfy 0 <= a <= b, got [{a}, {b}]")


@dataclass(frozen=True)
class Until(StlFormula):
    a: float
    b: float
    left: StlFormula
    right: StlFormula

    def __post_init__(self):
        _check_bounds(self.a, self.b)


@dataclass(frozen=True)
class Eventually(StlFormula):
    a: float
    b: float
    child: StlFormula

    def __post_init__(self):
        _check_bounds(self.a, self.b)


@dataclass(frozen=True)
class Always(StlFormula):
    a: float
    b: float
    child: StlFormula

    def __post_init__(self):
        _check_bounds(self.a, self.b)


TEMPORAL = (Until, Eventually, Always)


def children(phi):
    if isinstance(phi, (Not, Eventually, Always)):
        return (phi.child,)
    if isinstance(phi, (And, Until)):
        return (phi.left, phi.right)
    return ()


def is_temporal(phi) -> bool:
    if isinstance(phi, TEMPORAL):
        return True
    return any(is_temporal(c) for c in children(phi))


def horizon(phi) -> float:
    """Nested sum of upper time bounds (``inf`` for open-ended windows)."""
    if isinstance(phi, (Eventually, Always)):
        return phi.b + horizon(phi.child)
    if isinstance(phi, Until):
        return phi.b + max(horizon(phi.left), horizon(phi.right))
    return max((horizon(c) for c in children(phi)), default=0.0)


def leaves(phi):
    """Atoms and True nodes in preorder; the position is the tie-break index."""
    if isinstance(phi, (Atom, TrueF)):
        return [phi]
    out = []
    for c in children(phi):
        out.extend(leaves(c))
    return out


def predicates(phi):
    return {leaf.predicate.name: leaf.predicate for leaf in leaves(phi) if isinstance(leaf, Atom)}


def depth(phi) -> int:
    """Operator nesting depth; atoms and true have depth 0."""
    kids = children(phi)
    return 1 + max(depth(c) for c in kids) if kids else 0


def _num(x):
    if x == math.inf:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _bounds(node):
    if node.a == 0 and node.b == math.inf:
        return ""
    return f"[{_num(node.a)},{_num(node.b)}]"


def _unary_operand(phi):
    text = to_text(phi)
    if isinstance(phi, (And, Until)):
        return f"({text})"
    return text


def to_text(phi) -> str:
    """Canonical text; ``parse_formula(to_text(phi))`` rebuilds ``phi``."""
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Not):
        return "!" + _unary_operand(phi.child)
    if isinstance(phi, Eventually):
        return f"F{_bounds(phi)} " + _unary_operand(phi.child)
    if isinstance(phi, Always):
        return f"G{_bounds(phi)} " + _unary_operand(phi.child)
    if isinstance(phi, And):
        left = to_text(phi.left)
        if isinstance(phi.left, Until):
            left = f"({left})"
        return f"{left} & {_unary_operand(phi.right)}"
    if isinstance(phi, Until):
        left = to_text(phi.left)
        if not isinstance(phi.left, (Atom, TrueF)):
            left = f"({left})"
        return f"{left} U{_bounds(phi)} {_unary_operand(phi.right)}"
    raise TypeError(f"not an STL formula: {phi!r}")
