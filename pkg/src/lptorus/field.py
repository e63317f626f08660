"""Band-limited periodic grid functions and sequences of them.

A :class:`Field` lives on the torus [0, 2pi)^d sampled at N points per axis.
Besides the samples it carries ``support``, an upper bound on |xi| over the
integer frequencies where its spectrum may be nonzero.  Products check that
the combined bound stays strictly below N/2, which makes the pointwise
product on the grid exact, and then clear the roundoff left beyond the bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from numbers import Number
from pathlib import Path

import numpy as np

from .errors import AliasingError

PFLD_MAGIC = b"PFLD0001"


@dataclass(frozen=True)
class Grid:
    d: int
    N: int

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def spectral_shape(self) -> tuple:
        return (self.N,) * (self.d - 1) + (self.N // 2 + 1,)

    @property
    def dx(self) -> float:
        return 2 * np.pi / self.N

    @cached_property
    def freqs(self) -> np.ndarray:
        """Integer frequencies on the rfft layout, shape (*spectral_shape, d)."""
        axes = [np.fft.fftfreq(self.N, 1.0 / self.N)] * (self.d - 1)
        axes.append(np.arange(self.N // 2 + 1, dtype=float))
        mesh = np.meshgrid(*axes, indexing="ij")
        out = np.stack(mesh, axis=-1)
        out.setflags(write=False)
        return out

    @cached_property
    def radius(self) -> np.ndarray:
        out = np.sqrt(np.sum(self.freqs**2, axis=-1))
        out.setflags(write=False)
        return out

    def displacement(self, x, y) -> np.ndarray:
        """Lift y - x (grid indices) to its representative in (-pi, pi]^d.

        Returns an array of shape (P, d) regardless of ``d``.
        """
        x = _as_index(x, self.d)
        y = _as_index(y, self.d)
        m = np.mod(y - x, self.N)
        m = np.where(m > self.N // 2, m - self.N, m)
        return m * self.dx


@lru_cache(maxsize=None)
def grid(d: int, N: int) -> Grid:
    if d not in (1, 2):
        raise ValueError(f"only d in {{1, 2}} is supported, got {d}")
    if N < 2 or N & (N - 1):
        raise ValueError(f"grid size must be a power of 2, got {N}")
    return Grid(d, N)


def _as_index(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=np.int64)
    if d == 1 and (p.ndim == 0 or p.shape[-1] != 1):
        p = p[..., None]
    return p.reshape(-1, d)


@dataclass(frozen=True, eq=False)
class Field:
    values: np.ndarray
    support: float
    description: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim not in (1, 2) or len(set(v.shape)) != 1:
            raise ValueError(f"field samples must be a square 1d/2d array, got {v.shape}")
        grid(v.ndim, v.shape[0])
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "support", float(self.support))

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> Grid:
        return grid(self.d, self.N)

    @cached_property
    def spectrum(self) -> np.ndarray:
        out = np.fft.rfftn(self.values)
        out.setflags(write=False)
        return out

    @classmethod
    def from_spectrum(cls, spec, g: Grid, support: float, description: str = "") -> "Field":
        spec = np.asarray(spec, dtype=complex)
        values = np.fft.irfftn(spec, s=g.shape, axes=tuple(range(g.d)))
        out = cls(values, support, description)
        spec = spec.copy()
        spec.setflags(write=False)
        out.__dict__["spectrum"] = spec
        return out

    @classmethod
    def zeros(cls, d: int, N: int) -> "Field":
        return cls(np.zeros((N,) * d), 0.0, "zero")

    @classmethod
    def constant(cls, c: float, d: int, N: int) -> "Field":
        return cls(np.full((N,) * d, float(c)), 0.0, f"constant {c}")

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def at(self, points) -> np.ndarray:
        """Sample at grid-index points (shape (P,) in d=1, (P, d) in general)."""
        idx = _as_index(points, self.d)
        return self.values[tuple(idx.T)]

    def with_support(self, support: float) -> "Field":
        return Field(self.values, support, self.description)

    def _check_grid(self, other: "Field"):
        if other.values.shape != self.values.shape:
            raise ValueError(f"grid mismatch: {self.values.shape} vs {other.values.shape}")

    def __add__(self, other):
        if isinstance(other, Number):
            return Field(self.values + other, self.support)
        self._check_grid(other)
        return Field(self.values + other.values, max(self.support, other.support))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Number):
            return Field(self.values - other, self.support)
        self._check_grid(other)
        return Field(self.values - other.values, max(self.support, other.support))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Field(-self.values, self.support)

    def __mul__(self, other):
        if isinstance(other, Number):
            return Field(self.values * float(other), self.support)
        return multiply(self, other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Field(self.values / float(c), self.support)


def multiply(f: Field, g: Field) -> Field:
    """Exact product of band-limited fields (raises AliasingError otherwise)."""
    f._check_grid(g)
    bound = f.support + g.support
    if bound >= f.N / 2:
        raise AliasingError(
            f"product bandwidth {bound:g} reaches the Nyquist limit {f.N // 2}"
        )
    values = f.values * g.values
    if f.support == 0.0 or g.support == 0.0:
        return Field(values, bound)
    spec = np.fft.rfftn(values)
    spec[f.grid.radius > bound] = 0.0
    return Field.from_spectrum(spec, f.grid, bound)


def field_sum(fields, d: int | None = None, N: int | None = None) -> Field:
    """Fixed-order sum; an empty sum needs ``d`` and ``N``."""
    total = None
    for f in fields:
        total = f if total is None else total + f
    if total is None:
        return Field.zeros(d, N)
    return total


@dataclass(frozen=True, eq=False)
class BlockSequence:
    """A finite element {f^j}_{j=0..L-1} of the sequence space with regularity tag.

    ``ball`` is the radius R with spectrum of f^j inside the ball of radius
    R 2^j; it is recomputed from the block supports when omitted.
    """

    blocks: tuple
    alpha: float
    ball: float | None = None
    note: str = ""

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("a block sequence needs at least one block")
        object.__setattr__(self, "blocks", blocks)
        if self.ball is None:
            ball = max(b.support / 2.0**j for j, b in enumerate(blocks))
            object.__setattr__(self, "ball", ball)

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, j):
        return self.blocks[j]

    def __iter__(self):
        return iter(self.blocks)

    @property
    def d(self) -> int:
        return self.blocks[0].d

    @property
    def N(self) -> int:
        return self.blocks[0].N

    @cached_property
    def prefix_sums(self) -> tuple:
        """prefix_sums[j] = sum_{i<j} f^i for j = 0..L."""
        out = [Field.zeros(self.d, self.N)]
        for b in self.blocks:
            out.append(out[-1] + b)
        return tuple(out)

    def below(self, j: int) -> Field:
        """f^{<j}; zero for j <= 0 and the full sum for j >= L."""
        j = min(max(j, 0), len(self.blocks))
        return self.prefix_sums[j]

    def at_least(self, j: int) -> Field:
        """f^{>=j}."""
        return self.total() - self.below(j)

    def total(self) -> Field:
        return self.prefix_sums[-1]

    def sup_norms(self) -> np.ndarray:
        return np.array([b.sup() for b in self.blocks])

    def norm(self, alpha: float | None = None) -> float:
        a = self.alpha if alpha is None else alpha
        j = np.arange(len(self.blocks))
        return float(np.max(2.0 ** (j * a) * self.sup_norms()))


def write_pfld(path, f: Field, description: str | None = None) -> None:
    header = {
        "d": f.d,
        "N": f.N,
        "support": f.support,
        "description": f.description if description is None else description,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(PFLD_MAGIC)
        fh.write(blob + b"\n")
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes(order="C"))


def read_pfld(path) -> Field:
    raw = Path(path).read_bytes()
    if raw[:8] != PFLD_MAGIC:
        raise ValueError(f"{path}: not a PFLD file (bad magic {raw[:8]!r})")
    end = raw.index(b"\n", 8)
    header = json.loads(raw[8:end])
    d, N = int(header["d"]), int(header["N"])
    payload = raw[end + 1 :]
    expected = 8 * N**d
    if len(payload) != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, found {len(payload)}")
    values = np.frombuffer(payload, dtype="<f8").reshape((N,) * d)
    return Field(values.astype(float), header["support"], header.get("description", ""))
