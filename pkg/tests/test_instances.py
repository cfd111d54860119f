import numpy as np
import pytest

from goalqubo.instances import (
    FormatError,
    GeneratorSpec,
    format_solutions,
    generate,
    load_bks,
    parse_solutions,
    read_solutions,
    write_solutions,
)
from goalqubo.qubo_core import BitVector, parse_instance, serialize_instance
from goalqubo.tabu_search import SolutionRecord, SolutionSet, SolverConfig, run
from goalqubo.targets import Interval


def test_full_density_keeps_every_pair():
    inst = generate(GeneratorSpec(3, 1.0))
    assert len(inst.coeffs) == 6
    assert all(q != 0 and -100 <= q <= 100 for _, _, q in inst.coeffs)


def test_generator_deterministic():
    spec = GeneratorSpec(40, 0.2, seed=123)
    assert serialize_instance(generate(spec)) == serialize_instance(generate(spec))
    assert generate(spec) != generate(GeneratorSpec(40, 0.2, seed=124))


def test_generator_density_statistics():
    pairs = 51 * 50 // 2
    mean, sd = 0.1 * pairs, np.sqrt(pairs * 0.1 * 0.9)
    for seed in range(100):
        m = len(generate(GeneratorSpec(50, 0.1, seed=seed)).coeffs)
        assert abs(m - mean) <= 4 * sd


def test_generator_excludes_zero_and_honours_range():
    inst = generate(GeneratorSpec(30, 1.0, -1, 1, seed=2))
    assert {q for _, _, q in inst.coeffs} == {-1, 1}
    inst = generate(GeneratorSpec(20, 1.0, 3, 5, seed=2))
    assert {q for _, _, q in inst.coeffs} <= {3, 4, 5}


def test_generator_spec_validation():
    for kw in ({"n": 0}, {"n": 3, "density": 0}, {"n": 3, "density": 1.5},
               {"n": 3, "coeff_min": 5, "coeff_max": 1}, {"n": 3, "coeff_min": 0, "coeff_max": 0}):
        with pytest.raises(ValueError):
            GeneratorSpec(**kw)


def test_generated_roundtrip():
    inst = generate(GeneratorSpec(25, 0.3, seed=8))
    assert parse_instance(serialize_instance(inst)) == inst


def test_load_bks(tmp_path):
    p = tmp_path / "bks.txt"
    p.write_text("# ORLIB\n2500.1 1515944\n\n2500.2 1471392  # comment\n")
    table = load_bks(p)
    assert table["2500.1"].value == 1515944 and table["2500.1"].sense == "maximize"
    assert len(table) == 2
    p.write_text("")
    assert load_bks(p) == {}
    p.write_text("a 1\na 2\n")
    with pytest.raises(FormatError):
        load_bks(p)
    p.write_text("a x\n")
    with pytest.raises(FormatError):
        load_bks(p)


def test_solutions_roundtrip(tmp_path):
    inst = generate(GeneratorSpec(15, 0.4, seed=3))
    S = run(inst, Interval(-40, 40), SolverConfig(iter_limit=2000, seed=1), ordering="found")
    assert len(S) > 1
    path = tmp_path / "sol.txt"
    write_solutions(S, path)
    back = read_solutions(path, ordering="found")
    assert back == S
    assert format_solutions(back) == path.read_text()


def test_solutions_header_and_hex():
    recs = [SolutionRecord(BitVector.from_string("10010"), 7, -3, 4, 0)]
    text = format_solutions(SolutionSet(recs, n=5, target="interval:5:9", seed=2, sense="maximize"))
    assert text == "n=5 target=interval:5:9 seed=2 sense=maximize\n09,7,-3,4,0\n"


def test_empty_solutions_file():
    S = SolutionSet([], n=4, target="exact:1", seed=0)
    text = format_solutions(S)
    assert text == "n=4 target=exact:1 seed=0 sense=minimize\n"
    assert parse_solutions(text) == S


def test_fractional_af_roundtrip():
    recs = [SolutionRecord(BitVector.from_string("11"), 0, 0, 1), ]
    S = SolutionSet(recs, n=2, target="multi:a@1/3@0")
    assert parse_solutions(format_solutions(S)) == S


@pytest.mark.parametrize("text", [
    "",
    "n=2 target=exact:1 seed=0\n",
    "n=2 target=exact:1 seed=0 sense=minimize\n1,1,4,1,0\n",
    "n=2 target=exact:1 seed=0 sense=minimize\n1,1,0,1\n",
    "n=2 target=exact:1 seed=0 sense=minimize\nzz,1,0,1,0\n",
    "n=2 target=exact:1 seed=0 sense=minimize\n1,1,0,1,0\n1,1,0,2,0\n",
    "n=2 target=exact:1 seed=0 sense=minimize\n9,1,0,1,0\n",
])
def test_malformed_solutions_rejected(text):
    with pytest.raises((FormatError, ValueError)):
        parse_solutions(text)
