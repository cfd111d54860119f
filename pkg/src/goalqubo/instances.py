"""Benchmark instance generation, best-known-value tables and solution files."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .qubo_core import MAXIMIZE, MINIMIZE, BitVector, QuboInstance
from .tabu_search import SolutionRecord, SolutionSet
from .targets import is_satisficing


class FormatError(ValueError):
    """Malformed BKS or solutions file."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Uniform random QUBO.  Defaults follow the ORLIB bqp families: [-100, 100] at 10%."""

    n: int
    density: float | Fraction = Fraction(1, 10)
    coeff_min: int = -100
    coeff_max: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 < self.density <= 1:
            raise ValueError("density must be in (0, 1]")
        if self.coeff_min > self.coeff_max:
            raise ValueError("coeff_min > coeff_max")
        if self.coeff_min == self.coeff_max == 0:
            raise ValueError("coefficient range contains only zero")


def generate(spec: GeneratorSpec, sense: str = MINIMIZE, name: str = "") -> QuboInstance:
    """Each pair ``i <= j`` kept with probability ``density``; coefficient uniform, nonzero."""
    rng = np.random.default_rng(spec.seed)
    iu, ju = np.triu_indices(spec.n)
    keep = rng.random(iu.size) < float(spec.density)
    # draw from the range with zero removed
    lo, hi = spec.coeff_min, spec.coeff_max
    has_zero = lo <= 0 <= hi
    width = hi - lo + 1 - int(has_zero)
    draws = rng.integers(0, width, size=int(keep.sum())) + lo
    if has_zero:
        draws = np.where(draws >= 0, draws + 1, draws)
    triples = zip(iu[keep].tolist(), ju[keep].tolist(), draws.tolist())
    return QuboInstance.from_triples(spec.n, triples, sense, name)


@dataclass(frozen=True)
class BksEntry:
    value: int
    sense: str = MAXIMIZE


def load_bks(path, sense: str = MAXIMIZE) -> dict[str, BksEntry]:
    """``name value`` per line, ``#`` comments.  ORLIB values are maxima by default."""
    table: dict[str, BksEntry] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        parts = s.split()
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 'name value'")
        name, value = parts
        try:
            v = int(value)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: bad value {value!r}") from None
        if name in table:
            raise FormatError(f"{path}:{lineno}: duplicate name {name!r}")
        table[name] = BksEntry(v, sense)
    return table


def _header(S: SolutionSet) -> str:
    return f"n={S.n} target={S.target} seed={S.seed} sense={S.sense}"


def format_solutions(S: SolutionSet) -> str:
    lines = [_header(S)]
    for r in S.records:
        lines.append(f"{r.x.hex()},{r.f},{r.af},{r.iter_found},{r.time_found}")
    return "\n".join(lines) + "\n"


def write_solutions(S: SolutionSet, path) -> None:
    Path(path).write_text(format_solutions(S))


def parse_solutions(text: str, ordering: str = "obj-desc") -> SolutionSet:
    lines = text.splitlines()
    if not lines:
        raise FormatError("missing header")
    meta = {}
    for part in lines[0].split():
        key, sep, value = part.partition("=")
        if not sep:
            raise FormatError(f"bad header field {part!r}")
        meta[key] = value
    if set(meta) != {"n", "target", "seed", "sense"}:
        raise FormatError(f"header must carry n, target, seed, sense: {lines[0]!r}")
    try:
        n, seed = int(meta["n"]), int(meta["seed"])
    except ValueError:
        raise FormatError("non-integer n or seed in header") from None

    records = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise FormatError(f"line {lineno}: expected 5 fields")
        try:
            x = BitVector.from_hex(n, fields[0])
            f = int(fields[1])
            af = Fraction(fields[2])
            af = int(af) if af.denominator == 1 else af
            it, ms = int(fields[3]), int(fields[4])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if not is_satisficing(af):
            raise FormatError(f"line {lineno}: record with af={af} > 0 is not satisficing")
        records.append(SolutionRecord(x, f, af, it, ms))
    if len({r.x.value for r in records}) != len(records):
        raise FormatError("duplicate bit patterns")
    return SolutionSet(records, ordering, n, meta["target"], seed, meta["sense"])


def read_solutions(path, ordering: str = "obj-desc") -> SolutionSet:
    return parse_solutions(Path(path).read_text(), ordering)
