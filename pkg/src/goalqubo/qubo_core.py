"""QUBO instances, packed binary vectors and exact one-flip evaluation.

The objective is ``f(x) = sum q_ij x_i x_j`` over the stored upper-triangular
triples ``(i, j, q)`` with ``i <= j``.  A diagonal triple is a linear term; an
off-diagonal triple already carries the combined ``q_ij + q_ji`` weight and
is counted once.  There is no constant term, so ``f(0) == 0``.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

MINIMIZE = "minimize"
MAXIMIZE = "maximize"

#: per-coefficient magnitude accepted by the parser
MAX_ABS_COEFF = 2**31
#: bound on sum |q|; keeps every objective value and 2*f - (lb + ub) inside int64
MAX_ABS_TOTAL = 2**60


class ParseError(ValueError):
    """Malformed instance text."""


@dataclass(frozen=True)
class BitVector:
    """Fixed-length binary vector packed into a Python int (bit ``i`` is ``x_i``)."""

    n: int
    value: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative length")
        if self.value < 0 or self.value >> self.n:
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def zeros(cls, n: int) -> BitVector:
        return cls(n, 0)

    @classmethod
    def from_string(cls, s: str) -> BitVector:
        """Parse ``"1011"`` with ``x_0`` first."""
        s = s.strip()
        if any(c not in "01" for c in s):
            raise ValueError(f"not a bit string: {s!r}")
        return cls(len(s), sum(1 << i for i, c in enumerate(s) if c == "1"))

    @classmethod
    def from_array(cls, bits: Iterable[int]) -> BitVector:
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0/1")
        return cls(len(bits), sum(1 << i for i, b in enumerate(bits) if b))

    @classmethod
    def from_hex(cls, n: int, text: str) -> BitVector:
        return cls(n, int(text, 16))

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return "".join("1" if (self.value >> i) & 1 else "0" for i in range(self.n))

    def flip(self, i: int) -> BitVector:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return BitVector(self.n, self.value ^ (1 << i))

    def weight(self) -> int:
        return bin(self.value).count("1")

    def key(self) -> bytes:
        """Canonical byte encoding; injective for vectors of the same length."""
        return self.value.to_bytes((self.n + 7) // 8, "little")

    def hex(self) -> str:
        return format(self.value, f"0{max(1, (self.n + 3) // 4)}x")

    def to_array(self) -> np.ndarray:
        return np.array([(self.value >> i) & 1 for i in range(self.n)], dtype=np.int8)


@dataclass(frozen=True)
class QuboInstance:
    """Canonical upper-triangular QUBO.  Immutable; safe to share between runs."""

    n: int
    coeffs: tuple[tuple[int, int, int], ...]
    sense: str = MINIMIZE
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"unknown sense {self.sense!r}")
        seen = set()
        total = 0
        for i, j, q in self.coeffs:
            if not (0 <= i <= j < self.n):
                raise ValueError(f"bad index pair ({i}, {j}) for n={self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate key ({i}, {j})")
            seen.add((i, j))
            total += abs(q)
        if total > MAX_ABS_TOTAL:
            raise ValueError("sum of |q| exceeds 2**60")

    @classmethod
    def from_triples(
        cls,
        n: int,
        triples: Iterable[Sequence[int]],
        sense: str = MINIMIZE,
        name: str = "",
    ) -> QuboInstance:
        """Canonicalize arbitrary ``(i, j, q)`` triples: swap to ``i <= j``, sum, drop zeros."""
        acc: dict[tuple[int, int], int] = {}
        for i, j, q in triples:
            i, j, q = int(i), int(j), int(q)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"index out of range: ({i}, {j}) with n={n}")
            key = (i, j) if i <= j else (j, i)
            acc[key] = acc.get(key, 0) + q
        coeffs = tuple((i, j, q) for (i, j), q in sorted(acc.items()) if q != 0)
        return cls(n, coeffs, sense, name)

    @classmethod
    def from_matrix(cls, Q, sense: str = MINIMIZE, name: str = "") -> QuboInstance:
        Q = np.asarray(Q)
        n = Q.shape[0]
        return cls.from_triples(
            n, ((i, j, int(Q[i, j])) for i in range(n) for j in range(n) if Q[i, j]), sense, name
        )

    def minimization(self) -> QuboInstance:
        """Equivalent minimization instance (negated coefficients when maximizing)."""
        if self.sense == MINIMIZE:
            return self
        return QuboInstance(self.n, tuple((i, j, -q) for i, j, q in self.coeffs), MINIMIZE, self.name)

    @property
    def sign(self) -> int:
        """+1 for minimize, -1 for maximize: internal value = sign * original value."""
        return 1 if self.sense == MINIMIZE else -1

    @cached_property
    def abs_total(self) -> int:
        return sum(abs(q) for _, _, q in self.coeffs)

    @cached_property
    def diag(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for i, j, q in self.coeffs:
            if i == j:
                d[i] = q
        return d

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric off-diagonal adjacency as ``(indptr, indices, weights)``."""
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j, _ in self.coeffs:
            if i != j:
                deg[i] += 1
                deg[j] += 1
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        weights = np.empty(indptr[-1], dtype=np.int64)
        fill = indptr[:-1].copy()
        for i, j, q in self.coeffs:
            if i != j:
                indices[fill[i]], weights[fill[i]] = j, q
                fill[i] += 1
                indices[fill[j]], weights[fill[j]] = i, q
                fill[j] += 1
        return indptr, indices, weights

    def to_dense(self) -> np.ndarray:
        """Upper-triangular matrix with ``x @ U @ x == f(x)``."""
        U = np.zeros((self.n, self.n), dtype=np.int64)
        for i, j, q in self.coeffs:
            U[i, j] = q
        return U


def parse_instance(text: str | TextIO, sense: str = MINIMIZE, name: str = "") -> QuboInstance:
    """Read the sparse triple format: ``n m`` header, then ``i j q`` lines (1-based)."""
    if not isinstance(text, str):
        text = text.read()
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s and not s.startswith("#"):
            lines.append((lineno, s))
    if not lines:
        raise ParseError("empty input")

    lineno, header = lines[0]
    parts = header.split()
    try:
        if len(parts) != 2:
            raise ValueError
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"line {lineno}: expected 'n m' header, got {header!r}") from None
    if n < 1 or m < 0:
        raise ParseError(f"line {lineno}: bad header values n={n} m={m}")

    triples = []
    for lineno, s in lines[1:]:
        parts = s.split()
        try:
            if len(parts) != 3:
                raise ValueError
            i, j, q = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"line {lineno}: expected 'i j q', got {s!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"line {lineno}: index out of range 1..{n}")
        if abs(q) > MAX_ABS_COEFF:
            raise ParseError(f"line {lineno}: |q| exceeds 2**31")
        triples.append((i - 1, j - 1, q))
    if len(triples) != m:
        warnings.warn(f"header declares {m} triples, found {len(triples)}", stacklevel=2)
    try:
        return QuboInstance.from_triples(n, triples, sense, name)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_instance(inst: QuboInstance) -> str:
    out = io.StringIO()
    out.write(f"{inst.n} {len(inst.coeffs)}\n")
    for i, j, q in inst.coeffs:
        out.write(f"{i + 1} {j + 1} {q}\n")
    return out.getvalue()


def _check_len(inst: QuboInstance, x: BitVector):
    if len(x) != inst.n:
        raise ValueError(f"vector length {len(x)} != n={inst.n}")


def evaluate(inst: QuboInstance, x: BitVector) -> int:
    """From-scratch ``x'Qx`` as written in the instance (no sense adjustment)."""
    _check_len(inst, x)
    v = x.value
    return sum(q for i, j, q in inst.coeffs if (v >> i) & 1 and (v >> j) & 1)


@dataclass(eq=False)
class EvalState:
    """A vector with its cached objective and one-flip gains.

    ``gains[i]`` is ``f(flip(x, i)) - f(x)``.  Owned by a single walk.
    """

    inst: QuboInstance
    x: np.ndarray
    f: int
    gains: np.ndarray = field(repr=False)

    @property
    def bits(self) -> BitVector:
        return BitVector.from_array(self.x)

    def copy(self) -> EvalState:
        return EvalState(self.inst, self.x.copy(), self.f, self.gains.copy())

    def __eq__(self, other):
        if not isinstance(other, EvalState):
            return NotImplemented
        return (
            self.inst is other.inst
            and self.f == other.f
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.gains, other.gains)
        )


def init_state(inst: QuboInstance, x: BitVector) -> EvalState:
    _check_len(inst, x)
    xa = x.to_array()
    field_ = inst.diag.copy()
    indptr, indices, weights = inst.csr
    for i in range(inst.n):
        lo, hi = indptr[i], indptr[i + 1]
        field_[i] += int(np.dot(weights[lo:hi], xa[indices[lo:hi]]))
    gains = (1 - 2 * xa.astype(np.int64)) * field_
    return EvalState(inst, xa, evaluate(inst, x), gains)


def apply_flip(state: EvalState, i: int) -> EvalState:
    """Flip ``x_i`` in place, updating ``f`` and the gains of ``i``'s neighbours."""
    if not 0 <= i < state.inst.n:
        raise IndexError(f"variable {i} out of range")
    indptr, indices, weights = state.inst.csr
    state.f += int(state.gains[i])
    step = 1 - 2 * int(state.x[i])  # +1 when x_i goes 0 -> 1
    state.x[i] ^= 1
    state.gains[i] = -state.gains[i]
    lo, hi = indptr[i], indptr[i + 1]
    nb = indices[lo:hi]  # each neighbour appears once per row
    state.gains[nb] += (1 - 2 * state.x[nb].astype(np.int64)) * weights[lo:hi] * step
    return state
