"""Local-optima count estimates for one-flip landscapes over ``{0,1}^n``.

Three estimates of the number of local optima ``M`` for move radius ``l``:

* ``ratio``        ``|X| / |X(x0, l)|``
* ``binomial``     ``2^n / sum_{i<=l} C(n, i)``   (exact rational)
* ``closed_form``  ``2 exp(-(n-2l-2)^2 / (4(n-l-1)))``

``closed_form`` is what ``binomial`` becomes after replacing the binomial sum
by the tail bound ``2^(n-1) exp(-(n-2l-2)^2 / (4(1+l-n)))``.  The two run in
opposite directions in ``l``: the binomial ratio shrinks as the ball grows,
while the closed form is bounded by 2 and increases towards ``n = 2l + 2``.
Both are implemented as written and reported side by side.

Everything is evaluated with mpmath at :data:`DPS` digits; at ``n`` in the
thousands ``2^n`` is far outside float range.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

DPS = 60


@dataclass(frozen=True)
class LandscapeEstimate:
    n: int | None
    l: int | None  # noqa: E741
    estimate: mpmath.mpf
    method: str
    exact: Fraction | None = None

    def __float__(self):
        return float(self.estimate)


def _mpf(v) -> mpmath.mpf:
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def estimate_ratio(space_size, reachable_size) -> LandscapeEstimate:
    if space_size <= 0 or reachable_size <= 0:
        raise ValueError("sizes must be positive")
    with mpmath.workdps(DPS):
        exact = None
        if isinstance(space_size, (int, Fraction)) and isinstance(reachable_size, (int, Fraction)):
            exact = Fraction(space_size) / Fraction(reachable_size)
            value = _mpf(exact)
        else:
            value = _mpf(space_size) / _mpf(reachable_size)
    return LandscapeEstimate(None, None, value, "ratio", exact)


def ball_size(n: int, l: int) -> int:  # noqa: E741
    """Vectors within Hamming distance ``l`` of a fixed vector."""
    return sum(comb(n, i) for i in range(l + 1))


def estimate_binomial(n: int, l: int) -> LandscapeEstimate:  # noqa: E741
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got n={n}, l={l}")
    exact = Fraction(2**n, ball_size(n, l))
    with mpmath.workdps(DPS):
        value = _mpf(exact)
    return LandscapeEstimate(n, l, value, "binomial", exact)


def _check_tail_domain(n: int, l: int):  # noqa: E741
    if l < 0 or l > n - 2:
        raise ValueError(f"need 0 <= l <= n - 2, got n={n}, l={l}")


def binomial_sum_bound(n: int, l: int) -> mpmath.mpf:  # noqa: E741
    """``2^(n-1) exp(-(n-2l-2)^2 / (4(1+l-n)))``; the denominator is negative for ``l <= n-2``."""
    _check_tail_domain(n, l)
    with mpmath.workdps(DPS):
        expo = -mpmath.mpf((n - 2 * l - 2) ** 2) / (4 * (1 + l - n))
        return mpmath.mpf(2) ** (n - 1) * mpmath.exp(expo)


def estimate_closed_form(n: int, l: int) -> LandscapeEstimate:  # noqa: E741
    _check_tail_domain(n, l)
    with mpmath.workdps(DPS):
        value = 2 * mpmath.exp(-mpmath.mpf((n - 2 * l - 2) ** 2) / (4 * (n - l - 1)))
    return LandscapeEstimate(n, l, value, "closed_form")


def bound_violations(n_max: int = 60) -> list[tuple[int, int, int, mpmath.mpf]]:
    """``(n, l, ball, bound)`` wherever the tail bound falls below the exact ball size.

    Comparison is exact: the bound is irrational, so it is compared at
    :data:`DPS` digits against the integer ball size, which is far larger
    than the working precision's rounding error for these ranges.
    """
    bad = []
    for n in range(2, n_max + 1):
        for l in range(0, n - 1):  # noqa: E741
            ball = ball_size(n, l)
            bound = binomial_sum_bound(n, l)
            with mpmath.workdps(DPS):
                if bound < ball:
                    bad.append((n, l, ball, bound))
    return bad


def profile_rows(n: int, ls, oracle_counts: dict | None = None) -> list[str]:
    """CSV rows ``n,l,binomial_estimate,closed_form,oracle_count``."""
    rows = []
    for l in ls:  # noqa: E741
        b = mpmath.nstr(estimate_binomial(n, l).estimate, 15)
        c = mpmath.nstr(estimate_closed_form(n, l).estimate, 15) if l <= n - 2 else ""
        o = "" if not oracle_counts or l not in oracle_counts else str(oracle_counts[l])
        rows.append(f"{n},{l},{b},{c},{o}")
    return rows
