"""Dyadic partition of unity and Littlewood-Paley machinery on the torus.

All operators here are Fourier multipliers evaluated at integer frequencies,
so block projections are exact finite computations.  Block indices follow
the usual convention: Delta_{-1} uses chi, Delta_j (j >= 0) uses
rho_j = rho(2^-j .).  Sequences built by :func:`lp_decompose` are shifted by
one, f^j = Delta_{j-1} f, so that they start at j = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import multiindex as mi
from . import symbols
from .errors import GridTooSmall, OrderExceeded, UnresolvedBandwidth
from .field import BlockSequence, Field, grid

MIN_SCALES = 4


@dataclass(frozen=True)
class DyadicPartition:
    """Smooth dyadic partition on the d-torus sampled at N points per axis.

    ``K_max`` bounds the derivative order used by symbol derivatives,
    spectral derivatives and moment blocks.
    """

    d: int
    N: int
    K_max: int = 4
    sharpness: float = 1.0

    @property
    def grid(self):
        return grid(self.d, self.N)

    @property
    def J_max(self) -> int:
        # largest j with 2^j * 8/3 < N/2
        j = -1
        while 2.0 ** (j + 1) * 8.0 / 3.0 < self.N / 2:
            j += 1
        return j

    @property
    def n_blocks(self) -> int:
        """Length of a decomposed sequence, f^0 .. f^{J_max+1}."""
        return self.J_max + 2

    @property
    def resolvable_radius(self) -> float:
        """Frequencies |xi| <= 2^(J_max+1) are covered by blocks -1..J_max."""
        return 2.0 ** (self.J_max + 1)

    def chi(self, xi) -> np.ndarray:
        return symbols.chi(xi, self.d, self.sharpness)

    def rho(self, xi) -> np.ndarray:
        return symbols.rho(xi, self.d, self.sharpness)

    def rho_j(self, xi, j: int, k=None) -> np.ndarray:
        """d^k rho_j at arbitrary points (rho_{-1} = chi)."""
        k = mi.zero(self.d) if k is None else tuple(k)
        self._check_order(k)
        xi = np.asarray(xi, dtype=float)
        if j == -1:
            return symbols.chi_derivative(xi, k, self.d, self.sharpness)
        n = mi.order(k)
        return 2.0 ** (-j * n) * symbols.rho_derivative(xi / 2.0**j, k, self.d, self.sharpness)

    def block_radii(self, j: int) -> tuple:
        """Open annulus (inner, outer) outside which rho_j vanishes."""
        if j == -1:
            return (-1.0, symbols.R_OUTER)
        return (2.0**j, 2.0**j * 8.0 / 3.0)

    def multiplier(self, j: int, k=None) -> np.ndarray:
        """d^k rho_j sampled on the rfft frequency grid (read-only, cached)."""
        k = mi.zero(self.d) if k is None else tuple(k)
        self._check_order(k)
        return _multiplier(self, j, k)

    def moment_multiplier(self, j: int, k) -> np.ndarray:
        """Symbol (-i d_xi)^k rho_j / k! of the moment-weighted block."""
        k = tuple(k)
        n = mi.order(k)
        return (-1j) ** n * self.multiplier(j, k) / mi.factorial(k)

    def _check_order(self, k):
        if mi.order(k) > self.K_max:
            raise OrderExceeded(f"|k| = {mi.order(k)} exceeds K_max = {self.K_max}")

    def check_block(self, j: int):
        if j < -1:
            raise ValueError(f"block index must be >= -1, got {j}")
        if j > self.J_max:
            raise UnresolvedBandwidth(f"block {j} exceeds J_max = {self.J_max} for N = {self.N}")

    def check_field(self, f: Field):
        if (f.d, f.N) != (self.d, self.N):
            raise ValueError(f"field grid (d={f.d}, N={f.N}) does not match partition (d={self.d}, N={self.N})")


@lru_cache(maxsize=256)
def _multiplier(p: DyadicPartition, j: int, k: tuple) -> np.ndarray:
    out = p.rho_j(p.grid.freqs, j, k)
    out.setflags(write=False)
    return out


def make_partition(step_sharpness: float = 1.0, K_max: int = 4, grid_spec=(1, 2**14)) -> DyadicPartition:
    d, N = grid_spec
    if step_sharpness <= 0:
        raise ValueError("step sharpness must be positive")
    grid(d, N)
    p = DyadicPartition(d=d, N=N, K_max=int(K_max), sharpness=float(step_sharpness))
    if p.J_max < MIN_SCALES:
        raise GridTooSmall(f"N = {N} resolves only J_max = {p.J_max} < {MIN_SCALES} dyadic scales")
    return p


def _apply(f: Field, symbol: np.ndarray, support: float) -> Field:
    return Field.from_spectrum(f.spectrum * symbol, f.grid, support)


def _block_support(f: Field, j: int, p: DyadicPartition) -> float | None:
    inner, outer = p.block_radii(j)
    if f.support <= inner:
        return None
    return min(f.support, outer)


def lp_block(f: Field, j: int, partition: DyadicPartition) -> Field:
    """Delta_j f."""
    partition.check_field(f)
    partition.check_block(j)
    support = _block_support(f, j, partition)
    if support is None:
        return Field.zeros(f.d, f.N)
    return _apply(f, partition.multiplier(j), support)


def low_pass(f: Field, j: int, partition: DyadicPartition) -> Field:
    """Delta_{<j} f = sum_{-1 <= i < j} Delta_i f (zero for j <= -1)."""
    partition.check_field(f)
    top = min(j, partition.J_max + 1)
    if top <= -1:
        return Field.zeros(f.d, f.N)
    symbol = sum(partition.multiplier(i) for i in range(-1, top))
    support = f.support if top > partition.J_max else min(f.support, 2.0**top * 4.0 / 3.0)
    return _apply(f, symbol, support)


def _check_resolvable(f: Field, p: DyadicPartition):
    if f.support > p.resolvable_radius:
        raise UnresolvedBandwidth(
            f"field support {f.support:g} exceeds the resolvable radius {p.resolvable_radius:g}"
        )


def lp_decompose(f: Field, partition: DyadicPartition, alpha: float | None = None) -> BlockSequence:
    """{Delta_{j-1} f} for j = 0 .. J_max + 1."""
    partition.check_field(f)
    _check_resolvable(f, partition)
    blocks = [lp_block(f, j - 1, partition) for j in range(partition.n_blocks)]
    return BlockSequence(blocks, alpha=float("nan") if alpha is None else alpha, note="lp_decompose")


def spectral_derivative(f: Field, k, partition: DyadicPartition | None = None) -> Field:
    """d^k f via the exact multiplier (i xi)^k."""
    k = tuple(k)
    if len(k) != f.d:
        raise ValueError(f"multi-index {k} does not match dimension {f.d}")
    if partition is not None:
        partition._check_order(k)
    if mi.order(k) == 0:
        return f
    return _apply(f, _derivative_symbol(f.d, f.N, k), f.support)


@lru_cache(maxsize=128)
def _derivative_symbol(d: int, N: int, k: tuple) -> np.ndarray:
    xi = grid(d, N).freqs
    out = np.ones(xi.shape[:-1], dtype=complex)
    for i, ki in enumerate(k):
        out = out * (1j * xi[..., i]) ** ki
    out.setflags(write=False)
    return out


def moment_block(g: Field, j: int, k, partition: DyadicPartition) -> Field:
    """Delta^k_j g: block of g weighted by the k-th moment of the kernel.

    Equal to the integral of F^{-1}(rho_j)(x - y) (y - x)^k / k! g(y) dy, i.e.
    the multiplier (-i d_xi)^k rho_j / k!.
    """
    k = tuple(k)
    partition.check_field(g)
    partition.check_block(j)
    partition._check_order(k)
    if mi.order(k) == 0:
        return lp_block(g, j, partition)
    support = _block_support(g, j, partition)
    if support is None:
        return Field.zeros(g.d, g.N)
    return _apply(g, partition.moment_multiplier(j, k), support)


def moment_low_pass(g: Field, j: int, k, partition: DyadicPartition) -> Field:
    """Delta^k_{<j} g = sum_{-1 <= i < j} Delta^k_i g."""
    k = tuple(k)
    partition.check_field(g)
    top = min(j, partition.J_max + 1)
    if top <= -1:
        return Field.zeros(g.d, g.N)
    symbol = sum(partition.moment_multiplier(i, k) for i in range(-1, top))
    support = g.support if top > partition.J_max else min(g.support, 2.0**top * 4.0 / 3.0)
    return _apply(g, symbol, support)


def moment_decompose(g: Field, k, partition: DyadicPartition, alpha: float | None = None) -> BlockSequence:
    """{Delta^k_{j-1} g} for j = 0 .. J_max + 1."""
    partition.check_field(g)
    _check_resolvable(g, partition)
    blocks = [moment_block(g, j - 1, k, partition) for j in range(partition.n_blocks)]
    return BlockSequence(blocks, alpha=float("nan") if alpha is None else alpha, note=f"moment {tuple(k)}")


def pure_mode(kappa, d: int, N: int, phase: float = 0.0) -> Field:
    """cos(kappa . x + phase) with an exactly band-limited spectrum."""
    kappa = np.atleast_1d(np.asarray(kappa, dtype=int))
    x = np.meshgrid(*[np.arange(N) * 2 * math.pi / N] * d, indexing="ij")
    values = np.cos(sum(kv * xv for kv, xv in zip(kappa, x)) + phase)
    g = grid(d, N)
    spec = np.fft.rfftn(values)
    radius = float(np.sqrt(np.sum(kappa.astype(float) ** 2)))
    spec[np.abs(g.radius - radius) > 0.5] = 0.0
    return Field.from_spectrum(spec, g, radius, f"cos({tuple(kappa.tolist())} . x + {phase:g})")
