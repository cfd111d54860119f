import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goalqubo.instances import GeneratorSpec, format_solutions, generate
from goalqubo.oracle import enumerate_satisficing
from goalqubo.qubo_core import BitVector, EvalState, QuboInstance, evaluate
from goalqubo.tabu_search import (
    ParallelRunError,
    SolutionRecord,
    SolutionSet,
    SolverConfig,
    TabuState,
    _verified_record,
    derive_seed,
    optimize,
    run,
    run_parallel_targets,
    select_move,
    tabu_duration,
)
from goalqubo.targets import Exact, Interval, WeightedMulti

from conftest import instances


def _state(n, f, gains):
    inst = QuboInstance.from_triples(n, [(0, 0, 1)])
    return EvalState(inst, np.zeros(n, dtype=np.int8), f, np.array(gains, dtype=np.int64))


def _tabu(expiry, it):
    return TabuState(np.array(expiry, dtype=np.int64), it)


def test_select_unique_minimizer():
    s = _state(3, 0, [4, 5, -2])
    assert select_move(s, TabuState.fresh(3), Exact(5), np.random.default_rng(0)) == 1


def test_select_least_worsening():
    # at f = t every move worsens; flipping 2 worsens least
    s = _state(3, 5, [-9, 6, 1])
    assert select_move(s, TabuState.fresh(3), Exact(5), np.random.default_rng(0)) == 2


def test_select_skips_tabu():
    s = _state(3, 0, [4, 5, -2])
    assert select_move(s, _tabu([0, 9, 0], 3), Exact(5), np.random.default_rng(0)) == 0


def test_select_all_tabu_fallback():
    s = _state(4, 0, [1, 2, 3, 4])
    assert select_move(s, _tabu([9, 7, 12, 7], 5), Exact(0), np.random.default_rng(0)) == 1


def test_select_aspiration_admits_satisficing_tabu_move():
    s = _state(3, 0, [4, 5, -2])
    tabu = _tabu([0, 9, 0], 3)
    assert select_move(s, tabu, Exact(5), np.random.default_rng(0), aspiration=True) == 1
    # a tabu move that does not satisfy stays excluded
    assert select_move(s, tabu, Exact(6), np.random.default_rng(0), aspiration=True) == 0


def test_select_ties_are_uniform():
    s = _state(4, 0, [3, -3, 3, 7])  # moves 0, 1, 2 tie at AF 9 for t=0
    rng = np.random.default_rng(1)
    picks = Counter(select_move(s, TabuState.fresh(4), Exact(0), rng) for _ in range(3000))
    assert set(picks) == {0, 1, 2}
    assert all(900 < c < 1100 for c in picks.values())


def test_select_multi():
    a = _state(2, 0, [1, 2])
    b = _state(2, 0, [3, -1])
    inst = a.inst
    spec = WeightedMulti.of((inst, 1, 1), (inst, 1, 3))
    # flip 0: (0)^2 + (0)^2 = 0; flip 1: 1 + 16
    assert select_move([a, b], TabuState.fresh(2), spec, np.random.default_rng(0)) == 0


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig()
    with pytest.raises(ValueError):
        SolverConfig(tenure=0, iter_limit=1)
    with pytest.raises(ValueError):
        SolverConfig(iter_limit=1, start="middle")
    with pytest.raises(ValueError):
        SolverConfig(iter_limit=1, tenure_policy="adaptive")
    with pytest.raises(ValueError):
        SolverConfig(iter_limit=1, seed=2**64)


def test_tabu_duration_ranges():
    rng = np.random.default_rng(0)
    cfg = SolverConfig(tenure=10, iter_limit=1)
    ds = {tabu_duration(cfg, rng) for _ in range(2000)}
    assert ds == set(range(2, 11))
    assert tabu_duration(SolverConfig(tenure=10, iter_limit=1, tenure_policy="fixed"), rng) == 10
    assert tabu_duration(SolverConfig(tenure=1, iter_limit=1), rng) == 1


def test_run_one_variable():
    inst = QuboInstance.from_triples(1, [(0, 0, 5)])
    S = run(inst, Exact(5), SolverConfig(iter_limit=10))
    assert [str(r.x) for r in S] == ["1"]
    assert S.records[0].iter_found == 1 and S.records[0].f == 5 and S.records[0].af == 0


def test_run_interval_two_diagonals(two_diag):
    S = run(two_diag, Interval(1, 1), SolverConfig(tenure=1, iter_limit=100))
    assert {str(r.x) for r in S} == {"10", "01"}


def test_run_subset_of_oracle_n12():
    inst = generate(GeneratorSpec(12, 0.5, seed=21))
    x = BitVector(12, int(np.random.default_rng(21).integers(0, 2**12)))
    t = Exact(evaluate(inst, x))
    S = run(inst, t, SolverConfig(iter_limit=100_000, seed=3))
    assert len(S) > 0
    assert S.patterns() <= enumerate_satisficing(inst, t).patterns()


@settings(max_examples=40, deadline=None)
@given(instances(min_n=1, max_n=10), st.integers(-300, 300), st.integers(0, 40),
       st.integers(1, 12), st.booleans(), st.sampled_from(["random", "fixed"]),
       st.sampled_from(["all_zero", "random"]), st.integers(0, 2**64 - 1))
def test_kernel_and_python_walks_agree(inst, lb, width, tenure, asp, policy, start, seed):
    cfg = SolverConfig(tenure=tenure, iter_limit=400, seed=seed, aspiration=asp,
                       tenure_policy=policy, start=start)
    for target in (Exact(lb), Interval(lb, lb + width)):
        tk, tp = io.StringIO(), io.StringIO()
        a = run(inst, target, cfg, engine="kernel", trace=tk)
        b = run(inst, target, cfg, engine="python", trace=tp)
        assert a == b and a.best_af == b.best_af and a.iterations == b.iterations == 400
        assert tk.getvalue() == tp.getvalue()


@settings(max_examples=25, deadline=None)
@given(instances(min_n=2, max_n=12), st.integers(-200, 200), st.integers(0, 30), st.integers(0, 1000))
def test_subset_of_oracle_property(inst, lb, width, seed):
    target = Interval(lb, lb + width)
    S = run(inst, target, SolverConfig(iter_limit=2000, seed=seed))
    assert S.patterns() <= enumerate_satisficing(inst, target).patterns()
    assert len(S.patterns()) == len(S.records)
    for r in S:
        assert r.f == evaluate(inst, r.x) and r.af == target.af(r.f) and r.af <= 0


def test_determinism_byte_identical(random_small):
    cfg = SolverConfig(iter_limit=20_000, seed=77)
    t = Interval(-40, 40)
    a, b = run(random_small, t, cfg), run(random_small, t, cfg)
    assert format_solutions(a) == format_solutions(b)
    assert len(a) > 0


def test_seed_changes_walk(random_small):
    t = Interval(-40, 40)
    traces = []
    for seed in (1, 2):
        buf = io.StringIO()
        run(random_small, t, SolverConfig(iter_limit=500, seed=seed), trace=buf)
        traces.append(buf.getvalue())
    assert traces[0] != traces[1]


def _trace_moves(text):
    rows = [line.split(",") for line in text.splitlines()]
    return [int(r[1]) for r in rows], rows


def test_trace_format(random_small):
    buf = io.StringIO()
    run(random_small, Exact(0), SolverConfig(iter_limit=50, seed=1), trace=buf)
    moves, rows = _trace_moves(buf.getvalue())
    assert len(rows) == 50 and [int(r[0]) for r in rows] == list(range(1, 51))
    x = BitVector.zeros(10)
    for r in rows:
        x = x.flip(int(r[1]))
        f = evaluate(random_small, x)
        assert int(r[2]) == f and int(r[3]) == f * f
        assert 0 <= int(r[4]) <= 10


@pytest.mark.parametrize("tenure", [2, 5, 10])
def test_tabu_discipline_fixed_policy(tenure):
    inst = generate(GeneratorSpec(16, 0.4, seed=tenure))
    buf = io.StringIO()
    run(inst, Interval(-50, 50), SolverConfig(tenure=tenure, iter_limit=3000, seed=4,
                                              tenure_policy="fixed"), trace=buf)
    moves, _ = _trace_moves(buf.getvalue())
    last = {}
    for k, v in enumerate(moves, 1):
        if v in last:
            assert k - last[v] >= tenure
        last[v] = k


@pytest.mark.parametrize("policy", ["random", "fixed"])
def test_cycle_escape(policy):
    inst = generate(GeneratorSpec(8, 0.6, seed=1))
    buf = io.StringIO()
    run(inst, Exact(1), SolverConfig(tenure=2, iter_limit=5000, seed=2, tenure_policy=policy),
        trace=buf)
    moves, _ = _trace_moves(buf.getvalue())
    assert all(a != b for a, b in zip(moves, moves[1:]))


def test_random_policy_respects_drawn_expiry():
    inst = generate(GeneratorSpec(20, 0.4, seed=8))
    buf = io.StringIO()
    run(inst, Interval(-30, 30), SolverConfig(tenure=6, iter_limit=3000, seed=8), trace=buf)
    moves, rows = _trace_moves(buf.getvalue())
    gaps = []
    last = {}
    for k, v in enumerate(moves, 1):
        if v in last:
            gaps.append(k - last[v])
        last[v] = k
    assert min(gaps) >= 2
    # tabu count never exceeds tenure - 1 outstanding flips
    assert max(int(r[4]) for r in rows) <= 5


def test_sense_negation_gives_same_solutions():
    base = generate(GeneratorSpec(10, 0.5, seed=4))
    flipped = QuboInstance(base.n, tuple((i, j, -q) for i, j, q in base.coeffs), "maximize")
    cfg = SolverConfig(iter_limit=5000, seed=9)
    a = run(base, Interval(-60, 20), cfg)
    b = run(flipped, Interval(-20, 60), cfg)
    assert a.patterns() == b.patterns()
    assert sorted(r.f for r in a) == sorted(-r.f for r in b)
    assert b.sense == "maximize"


def test_orderings(random_small):
    S = run(random_small, Interval(-50, 50), SolverConfig(iter_limit=3000, seed=1))
    fs = [r.f for r in S]
    assert fs == sorted(fs, reverse=True)
    assert [r.f for r in S.reordered("obj-asc")] == sorted(fs)
    found = [r.iter_found for r in S.reordered("found")]
    assert found == sorted(found)
    with pytest.raises(ValueError):
        S.reordered("random")


def test_verified_record_rejects_drift(two_diag):
    with pytest.raises(RuntimeError):
        _verified_record(two_diag, Exact(1), BitVector.from_string("11"), 1, 0)


def test_time_limited_run(random_small):
    S = run(random_small, Interval(-50, 50), SolverConfig(time_limit=150, seed=1))
    assert S.iterations > 0 and len(S) > 0
    replay = run(random_small, Interval(-50, 50), SolverConfig(iter_limit=S.iterations, seed=1))
    assert replay.patterns() == S.patterns()


def test_python_fallback_for_huge_targets(two_diag):
    S = run(two_diag, Exact(2**62), SolverConfig(iter_limit=20))
    assert len(S) == 0 and S.best_af == (2 - 2**62) ** 2
    with pytest.raises(ValueError):
        run(two_diag, Exact(2**62), SolverConfig(iter_limit=20), engine="kernel")


def test_multi_target_run_subset_of_oracle():
    a = generate(GeneratorSpec(10, 0.5, seed=30))
    b = generate(GeneratorSpec(10, 0.5, seed=31), sense="maximize")
    x = BitVector.from_string("1011001110")
    spec = WeightedMulti.of((a, 1, evaluate(a, x)), (b, "5/2", evaluate(b, x)))
    S = run(a, spec, SolverConfig(iter_limit=3000, seed=5))
    oracle = enumerate_satisficing(a, spec).patterns()
    assert x.value in oracle and S.patterns() <= oracle
    for r in S:
        assert r.af == 0
    with pytest.raises(ValueError):
        run(generate(GeneratorSpec(9, 0.5)), spec, SolverConfig(iter_limit=5))


def test_multi_single_component_matches_exact():
    inst = generate(GeneratorSpec(9, 0.5, seed=2))
    cfg = SolverConfig(iter_limit=2000, seed=6)
    a = run(inst, WeightedMulti.of((inst, 1, 40)), cfg)
    b = run(inst, Exact(40), cfg)
    assert a.patterns() == b.patterns()


def test_parallel_matches_sequential(random_small):
    targets = [Exact(10), Interval(-20, 5)]
    cfg = SolverConfig(iter_limit=5000, seed=12)
    par = run_parallel_targets(random_small, targets, cfg)
    for k, t in enumerate(targets):
        seq = run(random_small, t, SolverConfig(iter_limit=5000, seed=derive_seed(12, k)))
        assert format_solutions(par[t]) == format_solutions(seq)


def test_parallel_empty_and_duplicates(random_small):
    cfg = SolverConfig(iter_limit=10)
    assert run_parallel_targets(random_small, [], cfg) == {}
    with pytest.raises(ValueError):
        run_parallel_targets(random_small, [Exact(1), Exact(1)], cfg)


def test_parallel_exact_and_degenerate_interval_agree():
    inst = generate(GeneratorSpec(11, 0.5, seed=40))
    t = evaluate(inst, BitVector(11, 1234))
    res = run_parallel_targets(inst, [Exact(t), Interval(t, t)], SolverConfig(iter_limit=100_000))
    oracle = enumerate_satisficing(inst, Exact(t)).patterns()
    assert res[Exact(t)].patterns() == res[Interval(t, t)].patterns() == oracle


def test_parallel_error_keeps_siblings(random_small):
    bad = WeightedMulti.of((generate(GeneratorSpec(4, 1.0)), 1, 0))
    with pytest.raises(ParallelRunError) as info:
        run_parallel_targets(random_small, [Exact(3), bad], SolverConfig(iter_limit=100))
    assert Exact(3) in info.value.results and bad in info.value.errors


def test_derive_seed_distinct():
    seeds = {derive_seed(5, k) for k in range(100)}
    assert len(seeds) == 100 and all(0 <= s < 2**64 for s in seeds)


@pytest.mark.parametrize("sense", ["minimize", "maximize"])
def test_optimize_finds_optimum_small(sense):
    from goalqubo.oracle import all_values
    inst = generate(GeneratorSpec(12, 0.5, seed=3), sense=sense)
    x, f = optimize(inst, SolverConfig(iter_limit=20_000, seed=1))
    values = all_values(inst)
    best = values.min() if sense == "minimize" else values.max()
    assert f == best == evaluate(inst, x)


def test_solution_set_duplicate_guard():
    r = SolutionRecord(BitVector.from_string("10"), 1, 0, 1)
    from goalqubo.tabu_search import postprocess
    with pytest.raises(AssertionError):
        postprocess([r, r])
    assert len(SolutionSet([r], n=2)) == 1
