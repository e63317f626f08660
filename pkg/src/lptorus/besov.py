"""Besov-type norms, synthetic test functions and classical Taylor remainders."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import multiindex as mi
from .errors import (
    InsufficientScales,
    IntegerRegularity,
    NonpositiveRegularity,
    UnresolvedBandwidth,
)
from .field import BlockSequence, Field, grid
from .spectral import DyadicPartition, lp_block, spectral_derivative

INTEGER_TOL = 1e-9
ZERO_NORM = 1e-14

__all__ = [
    "BlockSequence",
    "RegularitySpec",
    "SplitMix64",
    "check_regularity",
    "besov_norm",
    "synth_lacunary",
    "synth_band",
    "synth_sequence",
    "classical_remainder",
    "block_decay_slope",
    "DecayFit",
]


def check_regularity(alpha: float, name: str = "regularity", allow_integer: bool = False) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise NonpositiveRegularity(f"{name} must be positive, got {alpha:g}")
    if not allow_integer and abs(alpha - round(alpha)) < INTEGER_TOL:
        raise IntegerRegularity(f"{name} must be non-integer, got {alpha:g}")
    return alpha


@dataclass(frozen=True)
class RegularitySpec:
    alpha: float

    def __post_init__(self):
        check_regularity(self.alpha)

    def __float__(self):
        return float(self.alpha)


class SplitMix64:
    """SplitMix64 generator (Steele, Lea, Flood 2014); bit-exact across platforms."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def integer(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi)."""
        return lo + int(self.uniform() * (hi - lo))


def besov_norm(f, alpha, partition: DyadicPartition | None = None) -> float:
    """sup_j 2^{j alpha} ||Delta_j f||_inf (Field) or sup_j 2^{j alpha} ||f^j||_inf (sequence)."""
    alpha = float(alpha)
    if not alpha > 0:
        raise NonpositiveRegularity(f"regularity must be positive, got {alpha:g}")
    if isinstance(f, BlockSequence):
        return f.norm(alpha)
    if partition is None:
        raise ValueError("a partition is needed for the norm of a field")
    partition.check_field(f)
    if f.support > partition.resolvable_radius:
        raise UnresolvedBandwidth(f"field support {f.support:g} is not resolvable on this grid")
    best = 0.0
    for j in range(-1, partition.J_max + 1):
        best = max(best, 2.0 ** (j * alpha) * lp_block(f, j, partition).sup())
    return best


def _check_synth(J: int, partition: DyadicPartition, top: float):
    if J < 0:
        raise ValueError(f"J must be nonnegative, got {J}")
    if J > partition.J_max or top > partition.resolvable_radius or top * 8.0 / 3.0 >= partition.N:
        raise UnresolvedBandwidth(f"J = {J} is not resolvable with N = {partition.N}")


def _mode_spectrum(g, modes):
    """rfft spectrum of sum A cos(kappa . x + phi) over (kappa, A, phi)."""
    full = np.zeros(g.shape, dtype=complex)
    scale = g.N**g.d / 2.0
    for kappa, amp, phi in modes:
        pos = tuple(kv % g.N for kv in kappa)
        neg = tuple((-kv) % g.N for kv in kappa)
        full[pos] += scale * amp * complex(math.cos(phi), math.sin(phi))
        full[neg] += scale * amp * complex(math.cos(phi), -math.sin(phi))
    return full[..., : g.N // 2 + 1]


def _direction_mode(radius: float, theta: float) -> tuple:
    kappa = (int(round(radius * math.cos(theta))), int(round(radius * math.sin(theta))))
    if kappa == (0, 0):
        kappa = (1, 0)
    return kappa


def synth_lacunary(alpha, seed: int, J: int, partition: DyadicPartition, ratio: float = 1.0) -> Field:
    """sum_{j=0}^{J} 2^{-j alpha} a_j cos(kappa_j x + phi_j), a_j in [1/2, 1].

    kappa_j = round(ratio 2^j).  With ``ratio = 1`` every mode sits where
    the dyadic symbols are flat; a ratio inside (1, 4/3) puts each mode in
    the transition band at the same relative position, so all symbol
    derivatives see it.  In d = 2 each mode points in a random direction.
    """
    alpha = check_regularity(alpha)
    if not 1.0 <= ratio < 2.0:
        raise ValueError(f"ratio must lie in [1, 2), got {ratio}")
    _check_synth(J, partition, ratio * 2.0**J)
    rng = SplitMix64(seed)
    modes = []
    for j in range(J + 1):
        amp = 2.0 ** (-j * alpha) * (0.5 + 0.5 * rng.uniform())
        phi = 2 * math.pi * rng.uniform()
        if partition.d == 1:
            kappa = (max(1, int(round(ratio * 2**j))),)
        else:
            kappa = _direction_mode(ratio * 2.0**j, 2 * math.pi * rng.uniform())
        modes.append((kappa, amp, phi))
    g = grid(partition.d, partition.N)
    support = max(math.sqrt(sum(kv * kv for kv in m[0])) for m in modes)
    desc = f"lacunary alpha={alpha:g} seed={seed} J={J} ratio={ratio:g}"
    return Field.from_spectrum(_mode_spectrum(g, modes), g, support, desc)


def synth_band(alpha, seed: int, J: int, partition: DyadicPartition, modes_per_octave: int = 4) -> Field:
    """Random modes spread over each octave [2^j, 2^{j+1}), j = 0..J.

    Each octave carries ``modes_per_octave`` cosines with amplitudes
    2^{-j alpha} a / modes_per_octave, a in [1/2, 1].  Unlike the lacunary
    series, the frequencies avoid the flat points of the dyadic symbols, so
    moment blocks of order >= 1 do not vanish.
    """
    alpha = check_regularity(alpha)
    top = 2.0 ** (J + 1)
    _check_synth(J, partition, top)
    rng = SplitMix64(seed)
    modes = []
    for j in range(J + 1):
        lo, hi = 2**j, 2 ** (j + 1)
        for _ in range(modes_per_octave):
            amp = 2.0 ** (-j * alpha) * (0.5 + 0.5 * rng.uniform()) / modes_per_octave
            phi = 2 * math.pi * rng.uniform()
            if partition.d == 1:
                kappa = (rng.integer(lo, hi),)
            else:
                radius = lo + (hi - lo) * rng.uniform()
                kappa = _direction_mode(radius, 2 * math.pi * rng.uniform())
            modes.append((kappa, amp, phi))
    g = grid(partition.d, partition.N)
    support = max(math.sqrt(sum(kv * kv for kv in m[0])) for m in modes)
    desc = f"band alpha={alpha:g} seed={seed} J={J}"
    return Field.from_spectrum(_mode_spectrum(g, modes), g, support, desc)


def synth_sequence(alpha, seed: int, J: int, partition: DyadicPartition, modes_per_octave: int = 1) -> BlockSequence:
    """A sequence with f^0 = a cos(x + phi) and f^j built from the octave [2^{j-1}, 2^j).

    Built directly rather than through the partition: slot j carries the
    modes of octave j - 1 of :func:`synth_band`, so f^j has spectrum in the
    ball of radius 2^j and ||f^j|| is about 2^{-j alpha}.
    """
    alpha = check_regularity(alpha)
    _check_synth(J, partition, 2.0 ** (J + 1))
    rng = SplitMix64(seed)
    g = grid(partition.d, partition.N)
    slots = [[] for _ in range(partition.n_blocks)]
    slots[0].append(((1,) + (0,) * (partition.d - 1), 0.5 + 0.5 * rng.uniform(), 2 * math.pi * rng.uniform()))
    for j in range(1, J + 2):
        lo, hi = 2 ** (j - 1), 2**j
        for _ in range(modes_per_octave):
            amp = 2.0 ** (-j * alpha) * (0.5 + 0.5 * rng.uniform()) / modes_per_octave
            phi = 2 * math.pi * rng.uniform()
            if partition.d == 1:
                kappa = (rng.integer(lo, hi),)
            else:
                kappa = _direction_mode(lo + (hi - lo) * rng.uniform(), 2 * math.pi * rng.uniform())
            slots[j].append((kappa, amp, phi))
    blocks = []
    for modes in slots:
        if not modes:
            blocks.append(Field.zeros(partition.d, partition.N))
            continue
        support = max(math.sqrt(sum(kv * kv for kv in m[0])) for m in modes)
        blocks.append(Field.from_spectrum(_mode_spectrum(g, modes), g, support))
    return BlockSequence(blocks, alpha=alpha, note=f"synthetic alpha={alpha:g} seed={seed} J={J}")


def taylor_derivatives(f: Field, theta: float, partition: DyadicPartition | None = None) -> dict:
    return {k: spectral_derivative(f, k, partition) for k in mi.below(f.d, theta)}


def classical_remainder(f: Field, theta: float, x, y, partition: DyadicPartition | None = None, derivatives=None):
    """f(y) - sum_{|k|<theta} (y-x)^k / k! d^k f(x), vectorised over index pairs.

    ``theta <= 0`` gives f(y).  Pass precomputed ``derivatives`` (from
    :func:`taylor_derivatives`) when evaluating the same field repeatedly.
    """
    g = f.grid
    h = g.displacement(x, y)
    if derivatives is None:
        derivatives = taylor_derivatives(f, theta, partition)
    out = f.at(y).astype(float)
    for k in mi.below(f.d, theta):
        out = out - mi.power(h, k) / mi.factorial(k) * derivatives[k].at(x)
    return out


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float
    j_min: int
    j_max: int

    def to_json(self) -> str:
        return json.dumps(
            {"slope": self.slope, "intercept": self.intercept, "r2": self.r2, "j_min": self.j_min, "j_max": self.j_max},
            sort_keys=True,
        )


def linear_fit(x, y) -> tuple:
    """Least-squares line; returns (slope, intercept, r2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def block_decay_slope(seq, j_range=None) -> DecayFit:
    """Slope of log2 ||f^j||_inf against j, skipping blocks below 1e-14.

    ``seq`` may be a BlockSequence or a plain array of sup norms.
    """
    norms = seq.sup_norms() if isinstance(seq, BlockSequence) else np.asarray(seq, dtype=float)
    js = np.arange(len(norms))
    if j_range is not None:
        lo, hi = j_range
        keep = (js >= lo) & (js <= hi)
        js, norms = js[keep], norms[keep]
    keep = norms >= ZERO_NORM
    js, norms = js[keep], norms[keep]
    if len(js) < 4:
        raise InsufficientScales(f"need at least 4 nonzero scales, found {len(js)}")
    slope, intercept, r2 = linear_fit(js, np.log2(norms))
    return DecayFit(slope, intercept, r2, int(js.min()), int(js.max()))


def decay_csv(norms) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "sup_norm"])
    for j, v in enumerate(norms):
        w.writerow([j, repr(float(v))])
    return buf.getvalue()
