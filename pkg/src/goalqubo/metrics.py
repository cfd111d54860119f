"""Hamming-distance diversity of a solution set."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable

from .qubo_core import BitVector


@dataclass(frozen=True)
class DiversityReport:
    set_size: int
    pair_count: int
    mean_hamming: Fraction
    median_hamming: Fraction
    max_hamming: int
    min_hamming: int

    def csv_header(self) -> str:
        return "set_size,pair_count,mean_hamming,median_hamming,max_hamming,min_hamming"

    def csv_row(self) -> str:
        return (
            f"{self.set_size},{self.pair_count},{float(self.mean_hamming):.6g},"
            f"{float(self.median_hamming):.6g},{self.max_hamming},{self.min_hamming}"
        )

    def pretty(self) -> str:
        return (
            f"solutions      {self.set_size}\n"
            f"pairs          {self.pair_count}\n"
            f"mean hamming   {float(self.mean_hamming):.4f}\n"
            f"median hamming {float(self.median_hamming):g}\n"
            f"min/max        {self.min_hamming}/{self.max_hamming}\n"
        )


def hamming(x: BitVector, y: BitVector) -> int:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return bin(x.value ^ y.value).count("1")


def diversity_report(S: Iterable) -> DiversityReport:
    """Statistics over all unordered pairs; accepts a SolutionSet or an iterable of BitVectors.

    The median of an even number of distances is the mean of the two middle ones.
    """
    vecs = [getattr(s, "x", s) for s in S]
    if len(vecs) < 2:
        raise ValueError("diversity needs at least two solutions")
    d = sorted(hamming(a, b) for a, b in combinations(vecs, 2))
    m = len(d)
    median = Fraction(d[m // 2]) if m % 2 else Fraction(d[m // 2 - 1] + d[m // 2], 2)
    return DiversityReport(len(vecs), comb(len(vecs), 2), Fraction(sum(d), m), median, d[-1], d[0])
