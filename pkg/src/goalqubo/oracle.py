"""Exhaustive ground truth for small instances.

All ``2**n`` objective values are produced in one Gray-code sweep (one flip
per step, evaluated incrementally) and stored indexed by the packed vector.
"""

from __future__ import annotations

from itertools import combinations

import numba
import numpy as np

from .qubo_core import BitVector, QuboInstance, evaluate
from .tabu_search import SolutionRecord, SolutionSet
from .targets import TargetSpec, WeightedMulti, is_satisficing

DEFAULT_MAX_N = 24
HARD_MAX_N = 30


def _check_size(n: int, max_n: int):
    if max_n > HARD_MAX_N:
        raise ValueError(f"max_n may not exceed {HARD_MAX_N}")
    if n > max_n:
        raise ValueError(f"n={n} too large for enumeration (max {max_n})")


@numba.njit(cache=True)
def _gray_sweep(n, diag, indptr, indices, weights):
    values = np.zeros(1 << n, dtype=np.int64)
    x = np.zeros(n, dtype=np.int8)
    code = 0
    f = 0
    for k in range(1, 1 << n):
        v = 0
        while not (k >> v) & 1:
            v += 1
        local = diag[v]
        for p in range(indptr[v], indptr[v + 1]):
            local += weights[p] * x[indices[p]]
        f += (1 - 2 * x[v]) * local
        x[v] ^= 1
        code ^= 1 << v
        values[code] = f
    return values


def all_values(inst: QuboInstance, max_n: int = DEFAULT_MAX_N) -> np.ndarray:
    """``values[v] = f(x)`` where bit ``i`` of ``v`` is ``x_i`` (instance's own sense)."""
    _check_size(inst.n, max_n)
    indptr, indices, weights = inst.csr
    return _gray_sweep(inst.n, inst.diag, indptr, indices, weights)


def enumerate_satisficing(
    inst: QuboInstance, target: TargetSpec, max_n: int = DEFAULT_MAX_N
) -> SolutionSet:
    """Every vector whose achievement value is ``<= 0``, each re-checked directly."""
    if isinstance(target, WeightedMulti):
        tables = [all_values(c.inst, max_n) for c in target.components]
        hits = np.flatnonzero(np.all([t == c.t for t, c in zip(tables, target.components)], axis=0))
    else:
        values = all_values(inst, max_n)
        lb, ub = (target.t, target.t) if hasattr(target, "t") else (target.lb, target.ub)
        hits = np.flatnonzero((values >= lb) & (values <= ub))
    records = []
    for v in hits.tolist():
        bv = BitVector(inst.n, v)
        if not verify_solution(inst, bv, target):
            raise AssertionError(f"enumeration and direct evaluation disagree at {bv}")
        f = evaluate(inst, bv)
        af = target.af([evaluate(c.inst, bv) for c in target.components]) \
            if isinstance(target, WeightedMulti) else target.af(f)
        records.append(SolutionRecord(bv, f, af, 0))
    return SolutionSet(records, "obj-desc", inst.n, str(target), 0, inst.sense)


def verify_solution(inst: QuboInstance, x: BitVector, target: TargetSpec) -> bool:
    if len(x) != inst.n:
        raise ValueError(f"vector length {len(x)} != n={inst.n}")
    if isinstance(target, WeightedMulti):
        return is_satisficing(target.af([evaluate(c.inst, x) for c in target.components]))
    return is_satisficing(target.af(evaluate(inst, x)))


def _masks(n: int, radius: int) -> np.ndarray:
    out = []
    for r in range(1, radius + 1):
        for idx in combinations(range(n), r):
            out.append(sum(1 << i for i in idx))
    return np.array(out, dtype=np.int64)


@numba.njit(cache=True)
def _count_optima(values, masks, strict):
    count = 0
    for v in range(values.size):
        fv = values[v]
        ok = True
        for m in masks:
            fw = values[v ^ m]
            if fw < fv or (strict and fw == fv):
                ok = False
                break
        if ok:
            count += 1
    return count


def count_local_optima(
    inst: QuboInstance, radius: int, strict: bool = False, max_n: int = DEFAULT_MAX_N
) -> int:
    """Vectors no worse (minimization sense) than everything within Hamming ``radius``.

    With ``strict`` the vector must be strictly better than all of them.
    """
    _check_size(inst.n, max_n)
    if not 1 <= radius <= inst.n:
        raise ValueError(f"radius must be in [1, {inst.n}]")
    values = all_values(inst.minimization(), max_n)
    return int(_count_optima(values, _masks(inst.n, radius), strict))
