"""Multi-indices k = (k_1, ..., k_d) represented as plain tuples of ints."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

MultiIndex = tuple


def order(k: MultiIndex) -> int:
    return sum(k)


def factorial(k: MultiIndex) -> int:
    return math.prod(math.factorial(ki) for ki in k)


def binom(k: MultiIndex, l: MultiIndex) -> int:
    if any(li > ki or li < 0 for ki, li in zip(k, l)):
        raise ValueError(f"binomial ({k} choose {l}) needs l <= k componentwise")
    return math.prod(math.comb(ki, li) for ki, li in zip(k, l))


def multinomial(k: MultiIndex, parts) -> int:
    out = factorial(k)
    for p in parts:
        out //= factorial(p)
    return out


def zero(d: int) -> MultiIndex:
    return (0,) * d


def add(k: MultiIndex, l: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(k, l))


def sub(k: MultiIndex, l: MultiIndex) -> MultiIndex:
    return tuple(a - b for a, b in zip(k, l))


@lru_cache(maxsize=None)
def of_order(d: int, n: int) -> tuple:
    """All multi-indices in dimension ``d`` with |k| == n, lexicographic."""
    return tuple(
        k for k in itertools.product(range(n + 1), repeat=d) if sum(k) == n
    )


def below(d: int, theta: float) -> tuple:
    """All k with |k| < theta (strict), ordered by |k| then lexicographically."""
    out = []
    n = 0
    while n < theta:
        out.extend(of_order(d, n))
        n += 1
    return tuple(out)


def up_to(d: int, n_max: int) -> tuple:
    """All k with |k| <= n_max."""
    return below(d, n_max + 0.5)


@lru_cache(maxsize=None)
def splits(k: MultiIndex) -> tuple:
    """All ordered pairs (k1, k2) with k1 + k2 == k."""
    firsts = itertools.product(*(range(ki + 1) for ki in k))
    return tuple((k1, sub(k, k1)) for k1 in firsts)


def compositions(k: MultiIndex, r: int):
    """All ordered r-tuples (k_1, ..., k_r) of multi-indices summing to k."""
    if r == 1:
        yield (k,)
        return
    for k1, rest in splits(k):
        for tail in compositions(rest, r - 1):
            yield (k1,) + tail


def power(h, k: MultiIndex):
    """Monomial h^k for displacement arrays ``h`` of shape (..., d)."""
    out = 1.0
    for i, ki in enumerate(k):
        if ki:
            out = out * h[..., i] ** ki
    return out
