"""Goal specifications and their achievement functions.

A vector is satisficing exactly when its achievement value is ``<= 0``:
``(f - t)**2`` vanishes only at ``f == t`` and ``(f - lb)(f - ub)`` is
non-positive only on ``[lb, ub]``.  All arithmetic is exact (Python ints and
``Fraction``), so the threshold needs no epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .qubo_core import MINIMIZE, QuboInstance


def achievement_exact(f: int, t: int) -> int:
    return (f - t) ** 2


def achievement_interval(f: int, lb: int, ub: int) -> int:
    if lb > ub:
        raise ValueError(f"empty interval [{lb}, {ub}]")
    return (f - lb) * (f - ub)


def is_satisficing(af) -> bool:
    return af <= 0


@dataclass(frozen=True)
class Exact:
    t: int

    def af(self, f: int) -> int:
        return achievement_exact(f, self.t)

    def negated(self) -> Exact:
        return Exact(-self.t)

    def __str__(self):
        return f"exact:{self.t}"


@dataclass(frozen=True)
class Interval:
    lb: int
    ub: int

    def __post_init__(self):
        if self.lb > self.ub:
            raise ValueError(f"empty interval [{self.lb}, {self.ub}]")

    def af(self, f: int) -> int:
        return achievement_interval(f, self.lb, self.ub)

    def negated(self) -> Interval:
        return Interval(-self.ub, -self.lb)

    def __str__(self):
        return f"interval:{self.lb}:{self.ub}"


@dataclass(frozen=True)
class Component:
    inst: QuboInstance
    weight: Fraction
    t: int


@dataclass(frozen=True)
class WeightedMulti:
    """``sum w_k (x'Q_k x - t_k)**2`` over components sharing one bit vector."""

    components: tuple[Component, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("WeightedMulti needs at least one component")
        if len({c.inst.n for c in self.components}) != 1:
            raise ValueError("all component instances must have equal n")
        if any(c.weight <= 0 for c in self.components):
            raise ValueError("weights must be positive")

    @classmethod
    def of(cls, *triples) -> WeightedMulti:
        """Build from ``(inst, w, t)`` triples; weights accept ints, strings or Fractions."""
        return cls(tuple(Component(inst, Fraction(w), int(t)) for inst, w, t in triples))

    @property
    def n(self) -> int:
        return self.components[0].inst.n

    def af(self, fs: Sequence[int]) -> Fraction:
        return achievement_multi(fs, self)

    def __str__(self):
        return "multi:" + ";".join(
            f"{c.inst.name or '?'}@{c.weight}@{c.t}" for c in self.components
        )


TargetSpec = Union[Exact, Interval, WeightedMulti]


def achievement_multi(fs: Sequence[int], spec: WeightedMulti) -> Fraction:
    if len(fs) != len(spec.components):
        raise ValueError(f"expected {len(spec.components)} objective values, got {len(fs)}")
    return sum((c.weight * (f - c.t) ** 2 for f, c in zip(fs, spec.components)), Fraction(0))


def bounds(target: Exact | Interval) -> tuple[int, int]:
    """Closed satisficing range of a single-objective target."""
    if isinstance(target, Exact):
        return target.t, target.t
    return target.lb, target.ub


def for_sense(target: Exact | Interval, sense: str) -> Exact | Interval:
    """Translate a target stated in the instance's sense to the minimization form."""
    return target if sense == MINIMIZE else target.negated()


def open_to_closed_integral(lb: int, ub: int) -> Interval:
    """Open ``(lb, ub)`` as the equivalent closed interval over integer objectives."""
    if ub - lb < 2:
        raise ValueError(f"no integer strictly between {lb} and {ub}")
    return Interval(lb + 1, ub - 1)


def round_half_away(v: Fraction) -> int:
    v = Fraction(v)
    mag = math.floor(abs(v) + Fraction(1, 2))
    return mag if v >= 0 else -mag


def target_from_pct(bks: int, p) -> int:
    """``p * bks`` rounded half away from zero; ``p`` in (0, 1]."""
    p = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
    if not 0 < p <= 1:
        raise ValueError(f"percentage {p} outside (0, 1]")
    return round_half_away(p * bks)


def lexicographic_interval(f_star: int, delta: int) -> Interval:
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return Interval(f_star, f_star + delta)


def parse_target(text: str, bks: int | None = None) -> Exact | Interval:
    """Parse ``exact:T``, ``interval:LB:UB``, ``pct:P`` (needs ``bks``) or ``lex:FSTAR:DELTA``."""
    kind, _, rest = text.strip().partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "exact" and len(args) == 1:
            return Exact(int(args[0]))
        if kind == "interval" and len(args) == 2:
            return Interval(int(args[0]), int(args[1]))
        if kind == "lex" and len(args) == 2:
            return lexicographic_interval(int(args[0]), int(args[1]))
        if kind == "pct" and len(args) == 1:
            if bks is None:
                raise ValueError("pct target needs a best-known value")
            return Exact(target_from_pct(bks, Fraction(args[0])))
    except ZeroDivisionError:
        raise ValueError(f"bad target {text!r}") from None
    raise ValueError(f"unrecognized target {text!r}")
