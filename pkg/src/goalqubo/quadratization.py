"""Rosenberg reduction of the squared-deviation objective ``(x'Qx - t)^2`` to a QUBO.

Expanding the square gives a degree-4 pseudo-Boolean polynomial.  Products
``x_i x_j`` inside terms of degree > 2 are replaced by fresh variables
``z_ij`` and the penalty ``M (x_i x_j - 2 x_i z - 2 x_j z + 3 z)`` is added,
which is 0 when ``z = x_i x_j`` and at least ``M`` otherwise.  Only pairs of
original variables are substituted, so at most ``C(n, 2)`` auxiliaries appear.
This route exists to show the cost of the direct reformulation; it is
size-guarded, not tuned.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

from .qubo_core import MINIMIZE, QuboInstance

MAX_SQUARE_N = 16
MAX_AUX = 512
_INT64 = 2**63 - 1

Term = tuple[int, ...]


@dataclass(frozen=True)
class PseudoBooleanPoly:
    """``sum c_S prod_{i in S} x_i`` with sorted, duplicate-free index tuples ``S``."""

    n: int
    terms: dict[Term, int]

    def __post_init__(self):
        for S, c in self.terms.items():
            if list(S) != sorted(set(S)):
                raise ValueError(f"term {S} not sorted/deduplicated")
            if len(S) > 4:
                raise ValueError("degree exceeds 4")
            if S and not (0 <= S[0] and S[-1] < self.n):
                raise ValueError(f"term {S} out of range")

    @property
    def degree(self) -> int:
        return max((len(S) for S, c in self.terms.items() if c), default=0)

    def __call__(self, x) -> int:
        """Value at ``x`` given as a sequence of 0/1 or a packed int."""
        if isinstance(x, int):
            return sum(c for S, c in self.terms.items() if all((x >> i) & 1 for i in S))
        return sum(c for S, c in self.terms.items() if all(x[i] for i in S))


def _add(acc: dict, S, c: int):
    S = tuple(sorted(set(S)))
    v = acc.get(S, 0) + c
    if v:
        acc[S] = v
    else:
        acc.pop(S, None)


def square_objective(inst: QuboInstance, t: int) -> PseudoBooleanPoly:
    """``(x'Qx - t)^2`` expanded, with ``x_i^2 = x_i`` absorbed and constant ``t^2`` kept."""
    if inst.n > MAX_SQUARE_N:
        raise ValueError(f"n={inst.n} exceeds the size guard {MAX_SQUARE_N}")
    acc: dict[Term, int] = {}
    base = [((i,) if i == j else (i, j), q) for i, j, q in inst.coeffs]
    for (S1, c1) in base:
        for (S2, c2) in base:
            _add(acc, S1 + S2, c1 * c2)
    for S, c in base:
        _add(acc, S, -2 * t * c)
    _add(acc, (), t * t)
    if any(abs(c) > _INT64 for c in acc.values()):
        raise OverflowError("expanded coefficient exceeds 64 bits")
    return PseudoBooleanPoly(inst.n, acc)


def rosenberg_penalty(i: int, j: int, z: int, M: int) -> list[tuple[int, int, int]]:
    """``M (x_i x_j - 2 x_i z - 2 x_j z + 3 z)`` as ``(a, b, coeff)`` quadratic terms."""
    if M <= 0:
        raise ValueError("penalty must be positive")
    return [(i, j, M), (i, z, -2 * M), (j, z, -2 * M), (z, z, 3 * M)]


@dataclass(frozen=True)
class QuadratizationResult:
    qubo: QuboInstance
    aux_map: tuple[tuple[int, int, int], ...]  # (z_index, i, j)
    penalty: int
    offset: int  # constant term; min over z of qubo(x, z) + offset == poly(x)

    @property
    def aux_count(self) -> int:
        return len(self.aux_map)


def default_penalty(poly: PseudoBooleanPoly) -> int:
    return 1 + sum(abs(c) for c in poly.terms.values())


def reduce_to_qubo(poly: PseudoBooleanPoly, M: int | None = None) -> QuadratizationResult:
    """Substitute the most frequent original-variable pair until every term has degree <= 2.

    Ties between equally frequent pairs go to the lexicographically smallest.
    """
    if M is None:
        M = default_penalty(poly)
    if M <= 0:
        raise ValueError("penalty must be positive")
    n = poly.n
    terms = {S: c for S, c in poly.terms.items() if c}
    aux: dict[tuple[int, int], int] = {}
    next_var = n

    while True:
        counts: Counter = Counter()
        for S in terms:
            if len(S) > 2:
                counts.update(combinations([v for v in S if v < n], 2))
        if not counts:
            break
        top = max(counts.values())
        pair = min(p for p, k in counts.items() if k == top)
        if len(aux) >= MAX_AUX:
            raise ValueError(f"auxiliary count exceeds {MAX_AUX}")
        z = aux[pair] = next_var
        next_var += 1
        new_terms: dict[Term, int] = {}
        for S, c in terms.items():
            if len(S) > 2 and pair[0] in S and pair[1] in S:
                S = tuple(v for v in S if v not in pair) + (z,)
            _add(new_terms, S, c)
        for a, b, c in rosenberg_penalty(pair[0], pair[1], z, M):
            _add(new_terms, (a, b), c)
        terms = new_terms

    offset = terms.pop((), 0)
    triples = [(S[0], S[-1], c) for S, c in terms.items()]
    qubo = QuboInstance.from_triples(next_var, triples, MINIMIZE, "reduced")
    aux_map = tuple((z, i, j) for (i, j), z in sorted(aux.items(), key=lambda kv: kv[1]))
    return QuadratizationResult(qubo, aux_map, M, offset)


def format_aux_map(result: QuadratizationResult) -> str:
    """Sidecar text: one ``z_index i j`` line per auxiliary (1-based, like instance files)."""
    return "".join(f"{z + 1} {i + 1} {j + 1}\n" for z, i, j in result.aux_map)
