"""Bony paraproduct, resonant product and their block-sequence analogues."""

from __future__ import annotations

import numpy as np

from . import multiindex as mi
from .errors import AliasingError, NonpositiveRegularity, ZeroMultiIndex
from .field import BlockSequence, Field, field_sum
from .spectral import DyadicPartition, lp_block, low_pass, moment_low_pass


def _check_pair(f: Field, g: Field, partition: DyadicPartition):
    partition.check_field(f)
    partition.check_field(g)
    if f.support + g.support >= f.N / 2:
        raise AliasingError(
            f"product bandwidth {f.support + g.support:g} reaches the Nyquist limit {f.N // 2}"
        )


def paraproduct(f: Field, g: Field, partition: DyadicPartition) -> Field:
    """f < g = sum_j Delta_{<j-1} f * Delta_j g."""
    _check_pair(f, g, partition)
    terms = []
    for j in range(1, partition.J_max + 1):
        gj = lp_block(g, j, partition)
        if gj.sup() == 0.0:
            continue
        terms.append(low_pass(f, j - 1, partition) * gj)
    return field_sum(terms, f.d, f.N)


def resonant(f: Field, g: Field, partition: DyadicPartition) -> Field:
    """f o g = sum_{|i-j|<=1} Delta_i f * Delta_j g."""
    _check_pair(f, g, partition)
    J = partition.J_max
    fb = {i: lp_block(f, i, partition) for i in range(-1, J + 1)}
    gb = {j: lp_block(g, j, partition) for j in range(-1, J + 1)}
    terms = []
    for i in range(-1, J + 1):
        for j in (i - 1, i, i + 1):
            if -1 <= j <= J and fb[i].sup() > 0 and gb[j].sup() > 0:
                terms.append(fb[i] * gb[j])
    return field_sum(terms, f.d, f.N)


def pair_op(fs: BlockSequence, gs: BlockSequence, shift: int = 1) -> BlockSequence:
    """(f, g) = {f^{<j-shift} g^j}_j with the regularity tag of ``gs``."""
    if shift < 0:
        raise ValueError(f"shift must be >= 0, got {shift}")
    for s in (fs, gs):
        if not s.alpha > 0:
            raise NonpositiveRegularity(f"sequence regularity must be positive, got {s.alpha}")
    if len(fs) != len(gs):
        raise ValueError(f"sequence lengths differ: {len(fs)} vs {len(gs)}")
    blocks = [fs.below(j - shift) * gs[j] for j in range(len(gs))]
    return BlockSequence(blocks, alpha=gs.alpha, note=f"pair(shift={shift})")


def multi_op(sequences, shift: int = 1) -> BlockSequence:
    """Left-nested (f_1, ..., f_n) = ((f_1, ..., f_{n-1}), f_n)."""
    sequences = list(sequences)
    if not sequences:
        raise ValueError("need at least one sequence")
    out = sequences[0]
    for s in sequences[1:]:
        out = pair_op(out, s, shift)
    return out


def mpl(g: Field, h: Field, l, partition: DyadicPartition) -> Field:
    """g <_l h = sum_j Delta^l_{<j-1} g * Delta_j h for a nonzero multi-index l."""
    l = tuple(l)
    if mi.order(l) == 0:
        raise ZeroMultiIndex("mpl needs a nonzero multi-index; use paraproduct for l = 0")
    _check_pair(g, h, partition)
    partition._check_order(l)
    terms = []
    for j in range(1, partition.J_max + 1):
        hj = lp_block(h, j, partition)
        if hj.sup() == 0.0:
            continue
        terms.append(moment_low_pass(g, j - 1, l, partition) * hj)
    return field_sum(terms, g.d, g.N)


def bony_residual(f: Field, g: Field, partition: DyadicPartition) -> float:
    """max |f g - (f < g + g < f + f o g)|, relative to max |f g|."""
    prod = f * g
    rhs = paraproduct(f, g, partition) + paraproduct(g, f, partition) + resonant(f, g, partition)
    scale = max(prod.sup(), 1e-300)
    return float(np.max(np.abs(prod.values - rhs.values))) / scale
