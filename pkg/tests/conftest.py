import numpy as np
import pytest
from hypothesis import strategies as st

from goalqubo.instances import GeneratorSpec, generate
from goalqubo.qubo_core import BitVector, QuboInstance


def brute_value(inst: QuboInstance, bits) -> int:
    """Term-by-term x'Qx over a dense copy; shares nothing with the library evaluators."""
    U = np.zeros((inst.n, inst.n), dtype=object)
    for i, j, q in inst.coeffs:
        U[i, j] = q
    x = [int(b) for b in bits]
    return sum(U[i, j] * x[i] * x[j] for i in range(inst.n) for j in range(inst.n))


def bits_of(value: int, n: int):
    return [(value >> i) & 1 for i in range(n)]


@st.composite
def instances(draw, min_n=1, max_n=8, qmax=100):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    coeffs = [(i, j, draw(st.integers(-qmax, qmax).filter(bool))) for i, j in chosen]
    return QuboInstance.from_triples(n, coeffs)


@st.composite
def instance_and_vector(draw, **kw):
    inst = draw(instances(**kw))
    v = draw(st.integers(0, 2**inst.n - 1))
    return inst, BitVector(inst.n, v)


@pytest.fixture
def two_diag():
    return QuboInstance.from_triples(2, [(0, 0, 1), (1, 1, 1)])


@pytest.fixture
def random_small():
    return generate(GeneratorSpec(10, 0.5, -100, 100, seed=11))


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """``criterion(label, ok, detail)`` records one acceptance line, then asserts ``ok``."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(label, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
