"""One-flip tabu search that collects every distinct satisficing vector it visits.

Each iteration scans the one-flip neighbourhood, moves to the admissible
neighbour with the smallest achievement value (improving or, at a local
optimum, least worsening), makes the flipped variable tabu for ``tenure``
iterations and records the new vector if it meets the target.

Single-objective targets run through a compiled kernel.  The kernel ranks
moves by ``|2 f - (lb + ub)|``, which orders moves exactly as the achievement
value does (``(f - t)**2`` and ``(f - lb)(f - ub)`` are both increasing in
that distance) while staying inside int64.  The pure-Python walk ranks by the
achievement value itself and is used for weighted multi-target runs, for
targets too large for int64 keys, and as a cross-check of the kernel.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence, TextIO, Union

import numba
import numpy as np

from .qubo_core import (
    MINIMIZE,
    BitVector,
    QuboInstance,
    apply_flip,
    evaluate,
    init_state,
)
from .targets import (
    Component,
    TargetSpec,
    WeightedMulti,
    bounds,
    for_sense,
    is_satisficing,
)

ORDERINGS = ("obj-desc", "obj-asc", "found")
TENURE_POLICIES = ("random", "fixed")
_KEY_LIMIT = 2**61
_CHUNK = 1 << 16
_TIMED_CHUNK = 1 << 12

Start = Union[str, BitVector]


@dataclass(frozen=True)
class SolverConfig:
    """Walk parameters.

    With ``tenure_policy="fixed"`` a variable flipped at iteration ``k`` gets
    expiry ``k + tenure``.  With ``"random"`` the expiry is ``k + d`` with ``d``
    drawn uniformly from ``min(2, tenure)..tenure`` per move; a fixed tenure
    lets small instances lock into a short limit cycle, and the draw breaks it.
    Either way a move is never undone at the next iteration when ``tenure >= 2``.
    ``time_limit`` is in milliseconds.
    """

    tenure: int = 10
    iter_limit: int | None = None
    time_limit: float | None = None
    seed: int = 0
    aspiration: bool = False
    start: Start = "all_zero"
    tenure_policy: str = "random"

    def __post_init__(self):
        if self.tenure < 1:
            raise ValueError("tenure must be >= 1")
        if self.tenure_policy not in TENURE_POLICIES:
            raise ValueError(f"tenure_policy must be one of {TENURE_POLICIES}")
        if self.iter_limit is None and self.time_limit is None:
            raise ValueError("set iter_limit and/or time_limit")
        if self.iter_limit is not None and self.iter_limit < 1:
            raise ValueError("iter_limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if not isinstance(self.start, BitVector) and self.start not in ("all_zero", "random"):
            raise ValueError(f"unknown start policy {self.start!r}")


@dataclass
class TabuState:
    """Variable ``i`` is tabu while ``current_iter < expiry[i]``."""

    expiry: np.ndarray
    current_iter: int = 0

    @classmethod
    def fresh(cls, n: int) -> TabuState:
        return cls(np.zeros(n, dtype=np.int64), 0)

    def is_tabu(self, i: int) -> bool:
        return self.current_iter < self.expiry[i]

    def count(self) -> int:
        return int(np.count_nonzero(self.current_iter < self.expiry))


@dataclass(frozen=True)
class SolutionRecord:
    x: BitVector
    f: int
    af: int | Fraction
    iter_found: int
    time_found: int = 0  # ms; only measured on time-limited runs


@dataclass
class SolutionSet:
    records: list[SolutionRecord]
    ordering: str = "obj-desc"
    n: int = 0
    target: str = ""
    seed: int = 0
    sense: str = MINIMIZE
    # run summary, not part of the serialized set
    iterations: int = field(default=0, compare=False)
    best_af: int | Fraction | None = field(default=None, compare=False)
    elapsed_ms: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}")
        self.records = sort_records(self.records, self.ordering)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def patterns(self) -> set[int]:
        return {r.x.value for r in self.records}

    def reordered(self, ordering: str) -> SolutionSet:
        return SolutionSet(
            list(self.records), ordering, self.n, self.target, self.seed, self.sense,
            self.iterations, self.best_af, self.elapsed_ms,
        )


def sort_records(records, ordering: str) -> list[SolutionRecord]:
    if ordering == "obj-desc":
        key = lambda r: (-r.f, r.x.value)  # noqa: E731
    elif ordering == "obj-asc":
        key = lambda r: (r.f, r.x.value)  # noqa: E731
    else:
        key = lambda r: (r.iter_found, r.x.value)  # noqa: E731
    return sorted(records, key=key)


def postprocess(records: Sequence[SolutionRecord]) -> list[SolutionRecord]:
    """Duplicate removal.  Collection already dedups, so this only verifies."""
    keys = {r.x.key() for r in records}
    if len(keys) != len(records):
        raise AssertionError("duplicate bit patterns in solution set")
    return list(records)


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for the ``index``-th target of a multi-target run."""
    lo, hi = np.random.SeedSequence([seed, index]).generate_state(2, np.uint32)
    return int(lo) | (int(hi) << 32)


# ---------------------------------------------------------------------------
# move selection


def _pick(candidates: list[int], u: float) -> int:
    r = int(u * len(candidates))
    return candidates[min(r, len(candidates) - 1)]


def _oldest_tabu(tabu: TabuState) -> int:
    return int(np.argmin(tabu.expiry))


def select_move(state, tabu: TabuState, target: TargetSpec, rng, aspiration: bool = False) -> int:
    """Index of the admissible flip with the smallest achievement value.

    ``state`` is an :class:`EvalState`, or one state per component for a
    :class:`WeightedMulti` target.  ``rng`` is a numpy ``Generator``; exactly
    one uniform is drawn per call.  Ties are broken uniformly by that draw;
    when every variable is tabu the oldest tabu variable is returned.
    """
    u = rng.random()
    if isinstance(target, WeightedMulti):
        states = list(state)
        n = states[0].inst.n
        afs = [
            target.af([s.f + int(s.gains[i]) for s in states]) for i in range(n)
        ]
    else:
        n = state.inst.n
        afs = [target.af(state.f + int(state.gains[i])) for i in range(n)]

    best = None
    candidates: list[int] = []
    for i in range(n):
        if tabu.is_tabu(i) and not (aspiration and is_satisficing(afs[i])):
            continue
        if best is None or afs[i] < best:
            best, candidates = afs[i], [i]
        elif afs[i] == best:
            candidates.append(i)
    if not candidates:
        return _oldest_tabu(tabu)
    return _pick(candidates, u)


@numba.njit(cache=True, nogil=True)
def _walk_kernel(indptr, indices, weights, x, gains, fbox, expiry, it0, uniforms,
                 tenure, random_tenure, lb, ub, aspiration, moves, fs, tabu_counts):
    n = x.size
    s = lb + ub
    f = fbox[0]
    for step in range(uniforms.shape[0]):
        it = it0 + step + 1
        best = 0
        count = 0
        ntabu = 0
        for i in range(n):
            nf = f + gains[i]
            if it < expiry[i]:
                ntabu += 1
                if not (aspiration and lb <= nf <= ub):
                    continue
            key = abs(2 * nf - s)
            if count == 0 or key < best:
                best = key
                count = 1
            elif key == best:
                count += 1
        if count == 0:
            choice = 0
            for i in range(1, n):
                if expiry[i] < expiry[choice]:
                    choice = i
        else:
            r = int(uniforms[step, 0] * count)
            if r >= count:
                r = count - 1
            choice = -1
            for i in range(n):
                nf = f + gains[i]
                if it < expiry[i] and not (aspiration and lb <= nf <= ub):
                    continue
                if abs(2 * nf - s) == best:
                    if r == 0:
                        choice = i
                        break
                    r -= 1
        f += gains[choice]
        direction = 1 - 2 * x[choice]
        x[choice] ^= 1
        gains[choice] = -gains[choice]
        for k in range(indptr[choice], indptr[choice + 1]):
            j = indices[k]
            gains[j] += (1 - 2 * x[j]) * weights[k] * direction
        if random_tenure:
            lo = min(2, tenure)
            expiry[choice] = it + lo + int(uniforms[step, 1] * (tenure - lo + 1))
        else:
            expiry[choice] = it + tenure
        moves[step] = choice
        fs[step] = f
        tabu_counts[step] = ntabu
    fbox[0] = f


# ---------------------------------------------------------------------------
# walks


def tabu_duration(cfg: SolverConfig, rng) -> int:
    """Iterations until a just-flipped variable is admissible again; one uniform per call."""
    u = rng.random()
    if cfg.tenure_policy == "random":
        lo = min(2, cfg.tenure)
        return lo + min(int(u * (cfg.tenure - lo + 1)), cfg.tenure - lo)
    return cfg.tenure


def _start_vector(inst: QuboInstance, cfg: SolverConfig, rng) -> BitVector:
    if isinstance(cfg.start, BitVector):
        if len(cfg.start) != inst.n:
            raise ValueError("start vector length mismatch")
        return cfg.start
    if cfg.start == "random":
        return BitVector.from_array(rng.integers(0, 2, inst.n))
    return BitVector.zeros(inst.n)


def _budget(cfg: SolverConfig, done: int, t0: float) -> int:
    """Iterations for the next chunk; 0 when a limit has been reached."""
    if cfg.iter_limit is not None and done >= cfg.iter_limit:
        return 0
    if cfg.time_limit is not None and (time.perf_counter() - t0) * 1e3 >= cfg.time_limit:
        return 0
    chunk = _TIMED_CHUNK if cfg.time_limit is not None else _CHUNK
    if cfg.iter_limit is not None:
        chunk = min(chunk, cfg.iter_limit - done)
    return chunk


def _kernel_chunks(inst: QuboInstance, lb: int, ub: int, cfg: SolverConfig, rng, x0: BitVector):
    """Yield ``(first_iter, moves, fs, tabu_counts, ms)`` per chunk of the compiled walk."""
    state = init_state(inst, x0)
    x = state.x.copy()
    gains = state.gains.astype(np.int64)
    fbox = np.array([state.f], dtype=np.int64)
    expiry = np.zeros(inst.n, dtype=np.int64)
    indptr, indices, weights = inst.csr
    t0 = time.perf_counter()
    done = 0
    while (chunk := _budget(cfg, done, t0)) > 0:
        uniforms = rng.random((chunk, 2))
        moves = np.empty(chunk, dtype=np.int64)
        fs = np.empty(chunk, dtype=np.int64)
        tabu_counts = np.empty(chunk, dtype=np.int64)
        _walk_kernel(indptr, indices, weights, x, gains, fbox, expiry, done, uniforms,
                     cfg.tenure, cfg.tenure_policy == "random", lb, ub, cfg.aspiration,
                     moves, fs, tabu_counts)
        yield done, moves, fs, tabu_counts, (time.perf_counter() - t0) * 1e3
        done += chunk


def _python_chunks(inst, target: TargetSpec, cfg: SolverConfig, rng, x0: BitVector):
    """Same contract as :func:`_kernel_chunks`, driven by :func:`select_move`."""
    multi = isinstance(target, WeightedMulti)
    if multi:
        states = [init_state(c.inst, x0) for c in target.components]
    else:
        states = [init_state(inst, x0)]
    lead = states[0]
    tabu = TabuState.fresh(lead.inst.n)
    arg = states if multi else lead
    t0 = time.perf_counter()
    done = 0
    while (chunk := _budget(cfg, done, t0)) > 0:
        moves = np.empty(chunk, dtype=np.int64)
        fs = []
        tabu_counts = np.empty(chunk, dtype=np.int64)
        for step in range(chunk):
            it = done + step + 1
            tabu.current_iter = it
            tabu_counts[step] = tabu.count()
            i = select_move(arg, tabu, target, rng, cfg.aspiration)
            for s in states:
                apply_flip(s, i)
            tabu.expiry[i] = it + tabu_duration(cfg, rng)
            moves[step] = i
            fs.append(tuple(s.f for s in states) if multi else lead.f)
        if not multi:
            fs = np.array(fs, dtype=np.int64)
        yield done, moves, fs, tabu_counts, (time.perf_counter() - t0) * 1e3
        done += chunk


def _internal_multi(spec: WeightedMulti) -> WeightedMulti:
    return WeightedMulti(tuple(
        Component(c.inst.minimization(), c.weight, c.t * c.inst.sign) for c in spec.components
    ))


def run(
    inst: QuboInstance,
    target: TargetSpec,
    cfg: SolverConfig,
    *,
    ordering: str = "obj-desc",
    engine: str = "auto",
    trace: TextIO | None = None,
) -> SolutionSet:
    """Tabu walk collecting all distinct satisficing vectors.

    ``target`` is stated in the instance's own sense.  ``engine`` is
    ``"auto"``, ``"kernel"`` or ``"python"``; both engines produce identical
    walks for a given seed.  With ``trace`` set, one line
    ``iter,flipped_var,f,af,tabu_count`` is written per iteration.
    """
    rng = np.random.default_rng(cfg.seed)
    x0 = _start_vector(inst, cfg, rng)
    internal = inst.minimization()
    trace_sign = inst.sign

    if isinstance(target, WeightedMulti):
        trace_sign = target.components[0].inst.sign
        if target.n != inst.n:
            raise ValueError(f"target dimension {target.n} != instance n={inst.n}")
        itarget = _internal_multi(target)
        use_kernel = False
        sat = None
    else:
        itarget = for_sense(target, inst.sense)
        lb, ub = bounds(itarget)
        fits = abs(lb) <= _KEY_LIMIT and abs(ub) <= _KEY_LIMIT
        if engine == "kernel" and not fits:
            raise ValueError("target magnitude too large for the compiled kernel")
        use_kernel = engine == "kernel" or (engine == "auto" and fits)
        sat = (lb, ub)

    if use_kernel:
        chunks = _kernel_chunks(internal, sat[0], sat[1], cfg, rng, x0)
    else:
        chunks = _python_chunks(internal, itarget, cfg, rng, x0)

    timed = cfg.time_limit is not None
    found: dict[int, tuple[int, int]] = {}
    best_af = None
    x = x0.value
    bit = [1 << i for i in range(inst.n)]
    iterations = 0
    elapsed = 0.0
    for first, moves, fs, tabu_counts, ms in chunks:
        if sat is not None:
            mask = (fs >= sat[0]) & (fs <= sat[1])
            chunk_best = itarget.af(_closest(fs, itarget))
        else:
            afs = [itarget.af(list(v)) for v in fs]
            mask = [is_satisficing(a) for a in afs]
            chunk_best = min(afs)
        best_af = chunk_best if best_af is None else min(best_af, chunk_best)
        stamp = int(ms) if timed else 0
        for k, (v, hit) in enumerate(zip(moves.tolist(), np.asarray(mask).tolist())):
            x ^= bit[v]
            if hit and x not in found:
                found[x] = (first + k + 1, stamp)
        if trace is not None:
            _write_trace(trace, first, moves, fs, tabu_counts, itarget, trace_sign)
        iterations = first + len(moves)
        elapsed = ms

    records = []
    for value, (it, stamp) in found.items():
        bv = BitVector(inst.n, value)
        records.append(_verified_record(inst, target, bv, it, stamp))
    return SolutionSet(
        postprocess(records), ordering, inst.n, str(target), cfg.seed, inst.sense,
        iterations, best_af, elapsed,
    )


def _closest(fs: np.ndarray, itarget) -> int:
    """Value in ``fs`` nearest the target midpoint, i.e. the chunk's smallest AF."""
    lb, ub = bounds(itarget)
    d = np.abs(2 * fs.astype(object) - (lb + ub))
    return int(fs[int(np.argmin(d))])


def _verified_record(inst, target, bv: BitVector, it: int, stamp: int) -> SolutionRecord:
    """Recompute f and AF from scratch; incremental drift must never reach the output."""
    if isinstance(target, WeightedMulti):
        af = target.af([evaluate(c.inst, bv) for c in target.components])
    else:
        af = target.af(evaluate(inst, bv))
    if not is_satisficing(af):
        raise RuntimeError(f"collected vector {bv} fails from-scratch verification")
    return SolutionRecord(bv, evaluate(inst, bv), af, it, stamp)


def _write_trace(out: TextIO, first, moves, fs, tabu_counts, itarget, sign):
    lines = []
    for k in range(len(moves)):
        f = fs[k]
        af = itarget.af(f if not isinstance(f, tuple) else list(f))
        shown = f[0] if isinstance(f, tuple) else f
        lines.append(f"{first + k + 1},{moves[k]},{sign * int(shown)},{af},{tabu_counts[k]}\n")
    out.write("".join(lines))


def optimize(inst: QuboInstance, cfg: SolverConfig) -> tuple[BitVector, int]:
    """Best vector seen by the walk when the goal is the optimum itself.

    Uses an exact target beyond every attainable value on the optimizing side,
    so minimizing the achievement value is minimizing (or maximizing) f.
    """
    internal = inst.minimization()
    rng = np.random.default_rng(cfg.seed)
    x0 = _start_vector(inst, cfg, rng)
    t = -(internal.abs_total + 1)
    best_x = x = x0.value
    best_f = evaluate(internal, x0)
    bit = [1 << i for i in range(inst.n)]
    for _, moves, fs, _, _ in _kernel_chunks(internal, t, t, cfg, rng, x0):
        k_best = int(np.argmin(fs))
        if int(fs[k_best]) < best_f:
            best_f = int(fs[k_best])
            for v in moves[: k_best + 1].tolist():
                x ^= bit[v]
            best_x = x
            for v in moves[k_best + 1:].tolist():
                x ^= bit[v]
        else:
            for v in moves.tolist():
                x ^= bit[v]
    bv = BitVector(inst.n, best_x)
    return bv, evaluate(inst, bv)


class ParallelRunError(RuntimeError):
    """Some targets failed; ``results`` holds the ones that completed."""

    def __init__(self, results, errors):
        super().__init__(f"{len(errors)} target run(s) failed: {list(errors.values())[0]!r}")
        self.results = results
        self.errors = errors


def run_parallel_targets(
    inst: QuboInstance,
    targets: Sequence[TargetSpec],
    cfg: SolverConfig,
    *,
    ordering: str = "obj-desc",
    max_workers: int | None = None,
) -> dict:
    """Independent runs per target, seeded with :func:`derive_seed`.

    Results depend only on the inputs, never on scheduling.
    """
    if len(set(targets)) != len(targets):
        raise ValueError("duplicate targets")
    if not targets:
        return {}
    cfgs = [
        replace(cfg, seed=derive_seed(cfg.seed, k))
        for k in range(len(targets))
    ]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(run, inst, t, c, ordering=ordering) for t, c in zip(targets, cfgs)]
    results, errors = {}, {}
    for t, fut in zip(targets, futures):
        exc = fut.exception()
        if exc is None:
            results[t] = fut.result()
        else:
            errors[t] = exc
    if errors:
        raise ParallelRunError(results, errors)
    return results
