"""Generalised Taylor expansions of multicomponent paraproducts.

The abstract layer works on block sequences bound to component ids inside a
:class:`CalcContext`.  A word is a tuple of ids; for a word w = i_1 ... i_n
the context provides

* ``f_word``   the left-nested multicomponent sequence and its sum,
* ``D_kj``     the block correction functions D^{k,j}_w (any k),
* ``D_k``      D^k_w = sum_j D^{k,j}_w, only for |k| < alpha_w,
* ``C_kj``     the tail/head remainders C^{k,j}_w,
* ``T_poly``   Taylor polynomials with D^k (or D^{k,j}) coefficients,
* ``omega_word`` / ``omega_theta_j``  the remainders and their block pieces.

Everything is memoised per context; values are write-once.

The concrete layer builds the two- and three-factor remainders of ordinary
paraproducts (``D2``, ``omega2``, ``R_seq``, ``omega3``) from fields.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import multiindex as mi
from .besov import check_regularity, classical_remainder, taylor_derivatives
from .errors import IntegerRegularity, OrderOutOfRange, UnboundComponent
from .field import BlockSequence, Field, field_sum
from .paraproduct import mpl, pair_op, paraproduct
from .spectral import (
    DyadicPartition,
    lp_block,
    lp_decompose,
    low_pass,
    moment_block,
    moment_decompose,
    spectral_derivative,
)

INTEGER_TOL = 1e-9


def _is_integer(a: float) -> bool:
    return abs(a - round(a)) < INTEGER_TOL


@dataclass(frozen=True)
class Word:
    """Component ids with their regularities.

    Construction enforces that every contiguous partial sum of the
    regularities is non-integer.
    """

    ids: tuple
    alphas: tuple

    def __post_init__(self):
        ids, alphas = tuple(self.ids), tuple(float(a) for a in self.alphas)
        if not ids:
            raise ValueError("a word needs at least one component")
        if len(ids) != len(alphas):
            raise ValueError("ids and regularities differ in length")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "alphas", alphas)
        for a in alphas:
            check_regularity(a, allow_integer=True)
        n = len(alphas)
        for i in range(n):
            for j in range(i + 1, n + 1):
                s = sum(alphas[i:j])
                if _is_integer(s):
                    raise IntegerRegularity(
                        f"partial sum of regularities {ids[i:j]} is an integer ({s:g})"
                    )

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def alpha(self) -> float:
        return sum(self.alphas)

    def prefix(self, m: int) -> "Word":
        return Word(self.ids[:m], self.alphas[:m])

    def suffix(self, m: int) -> "Word":
        """Components m+1..n (zero-based slice ``[m:]``)."""
        return Word(self.ids[m:], self.alphas[m:])

    def __str__(self):
        return "|".join(map(str, self.ids))


class CalcContext:
    """Sequences bound to component ids, the shift N and memo tables."""

    def __init__(self, partition: DyadicPartition, shift: int = 1):
        self.partition = partition
        self.shift = int(shift)
        self.seqs: dict = {}
        self._f: dict = {}
        self._deriv: dict = {}
        self._dkj: dict = {}
        self._dk: dict = {}
        self._ckj: dict = {}

    @property
    def d(self) -> int:
        return self.partition.d

    def bind(self, cid, seq: BlockSequence, alpha: float | None = None) -> None:
        if cid in self.seqs:
            raise ValueError(f"component {cid!r} is already bound")
        if alpha is not None:
            seq = BlockSequence(seq.blocks, alpha=float(alpha), ball=seq.ball, note=seq.note)
        check_regularity(seq.alpha, f"regularity of component {cid!r}", allow_integer=True)
        if self.seqs and len(seq) != self.length:
            raise ValueError(f"sequence length {len(seq)} differs from bound length {self.length}")
        self.seqs[cid] = seq

    @property
    def length(self) -> int:
        return len(next(iter(self.seqs.values())))

    def word(self, ids) -> Word:
        """Build a Word from ids (a string of single-character ids is split)."""
        if isinstance(ids, Word):
            return ids
        if isinstance(ids, str):
            ids = (ids,) if ids in self.seqs else tuple(ids)
        ids = tuple(ids)
        for i in ids:
            if i not in self.seqs:
                raise UnboundComponent(f"component {i!r} is not bound")
        return Word(ids, tuple(self.seqs[i].alpha for i in ids))

    # ---- sequences ---------------------------------------------------

    def f_word(self, w) -> BlockSequence:
        w = self.word(w)
        if w.ids not in self._f:
            if w.n == 1:
                self._f[w.ids] = self.seqs[w.ids[0]]
            else:
                self._f[w.ids] = pair_op(self.f_word(w.prefix(w.n - 1)), self.seqs[w.ids[-1]], self.shift)
        return self._f[w.ids]

    def block(self, w, j: int) -> Field:
        seq = self.f_word(w)
        if 0 <= j < len(seq):
            return seq[j]
        return Field.zeros(self.d, self.partition.N)

    def d_block(self, w, k, j: int) -> Field:
        """d^k f^j_w (cached)."""
        w = self.word(w)
        key = (w.ids, tuple(k), j)
        if key not in self._deriv:
            self._deriv[key] = spectral_derivative(self.block(w, j), k)
        return self._deriv[key]

    # ---- correction functions -----------------------------------------

    def D_kj(self, w, k, j: int) -> Field:
        w, k = self.word(w), tuple(k)
        key = (w.ids, k, j)
        if key in self._dkj:
            return self._dkj[key]
        out = self.d_block(w, k, j)
        for m in range(1, w.n):
            head, tail = w.prefix(m), w.suffix(m)
            for k1, k2 in mi.splits(k):
                if mi.order(k1) < head.alpha and mi.order(k2) >= tail.alpha:
                    out = out - mi.binom(k, k1) * (self.D_k(head, k1) * self.D_kj(tail, k2, j))
        self._dkj[key] = out
        return out

    def D_k(self, w, k) -> Field:
        w, k = self.word(w), tuple(k)
        if not mi.order(k) < w.alpha:
            raise OrderOutOfRange(f"D^k_w needs |k| < {w.alpha:g}, got |k| = {mi.order(k)}")
        key = (w.ids, k)
        if key not in self._dk:
            self._dk[key] = field_sum(
                (self.D_kj(w, k, j) for j in range(self.length)), self.d, self.partition.N
            )
        return self._dk[key]

    def C_kj(self, w, k, j: int) -> Field:
        w, k = self.word(w), tuple(k)
        j = min(max(j, 0), self.length)
        key = (w.ids, k, j)
        if key in self._ckj:
            return self._ckj[key]
        out = spectral_derivative(self.f_word(w).below(j), k)
        if mi.order(k) < w.alpha:
            out = out - self.D_k(w, k)
        for m in range(1, w.n):
            head, tail = w.prefix(m), w.suffix(m)
            for k1, k2 in mi.splits(k):
                if mi.order(k1) < head.alpha:
                    out = out - mi.binom(k, k1) * (self.D_k(head, k1) * self.C_kj(tail, k2, j))
        self._ckj[key] = out
        return out

    def D_k_tail_slope(self, w, k) -> float:
        """Fitted slope of log2 ||D^{k,j}_w|| in j (negative when the sum converges)."""
        from .besov import block_decay_slope

        norms = [self.D_kj(w, k, j).sup() for j in range(self.length)]
        return block_decay_slope(norms).slope

    # ---- pointwise objects --------------------------------------------

    def T_poly(self, w, x, y, theta: float | None = None, j: int | None = None):
        """sum_{|k|<theta} (y-x)^k/k! D^k_w(x), or D^{k,j}_w(x) when ``j`` is given."""
        w = self.word(w)
        theta = w.alpha if theta is None else float(theta)
        h = self.partition.grid.displacement(x, y)
        out = np.zeros(len(h))
        for k in mi.below(self.d, theta):
            coef = self.D_k(w, k) if j is None else self.D_kj(w, k, j)
            out = out + mi.power(h, k) / mi.factorial(k) * coef.at(x)
        return out

    def omega_word(self, w, x, y, _memo=None):
        """Omega_w(y, x) = f_w(y) - T_w - sum_m T_{1..m} Omega_{m+1..n}."""
        w = self.word(w)
        memo = {} if _memo is None else _memo
        if w.ids in memo:
            return memo[w.ids]
        out = self.f_word(w).total().at(y) - self.T_poly(w, x, y)
        for m in range(1, w.n):
            out = out - self.T_poly(w.prefix(m), x, y) * self.omega_word(w.suffix(m), x, y, memo)
        memo[w.ids] = out
        return out

    def omega_theta_j(self, w, theta: float, j: int, x, y, _memo=None):
        """Block piece Omega^{theta,j}_w(y, x)."""
        w = self.word(w)
        memo = {} if _memo is None else _memo
        key = (w.ids, float(theta), j)
        if key in memo:
            return memo[key]
        out = self.block(w, j).at(y) - self.T_poly(w, x, y, theta=theta, j=j)
        for m in range(1, w.n):
            tail = w.suffix(m)
            out = out - self.T_poly(w.prefix(m), x, y) * self.omega_theta_j(tail, tail.alpha, j, x, y, memo)
        memo[key] = out
        return out

    def omega_theta_below(self, w, theta: float, j: int, x, y, _memo=None):
        """Omega^{theta,<j}_w = sum_{0 <= i < j} Omega^{theta,i}_w."""
        memo = {} if _memo is None else _memo
        out = np.zeros(len(self.partition.grid.displacement(x, y)))
        for i in range(0, min(j, self.length)):
            out = out + self.omega_theta_j(w, theta, i, x, y, memo)
        return out

    def C_decay(self, w, k) -> np.ndarray:
        return np.array([self.C_kj(w, k, j).sup() for j in range(self.length)])


# module-level spellings of the context operations


def f_word(ctx: CalcContext, w):
    seq = ctx.f_word(w)
    return seq, seq.total()


def D_kj(ctx: CalcContext, w, k, j):
    return ctx.D_kj(w, k, j)


def D_k(ctx: CalcContext, w, k):
    return ctx.D_k(w, k)


def C_kj(ctx: CalcContext, w, k, j):
    return ctx.C_kj(w, k, j)


def T_poly(ctx: CalcContext, w, x, y, theta=None):
    return ctx.T_poly(w, x, y, theta)


def omega_word(ctx: CalcContext, w, x, y):
    return ctx.omega_word(w, x, y)


def omega_theta_j(ctx: CalcContext, w, theta, j, x, y):
    return ctx.omega_theta_j(w, theta, j, x, y)


# ---------------------------------------------------------------------------
# concrete two- and three-factor objects


def _check_regs(*alphas):
    for a in alphas:
        check_regularity(a)


class PairRemainder:
    """Omega^{alpha,beta}(f, g) with its correction functions D^k(f, g)."""

    def __init__(self, f: Field, g: Field, alpha: float, beta: float, partition: DyadicPartition, fg: Field | None = None):
        _check_regs(alpha, beta, alpha + beta)
        self.f, self.g = f, g
        self.alpha, self.beta = float(alpha), float(beta)
        self.partition = partition
        self.fg = paraproduct(f, g, partition) if fg is None else fg

    @cached_property
    def df(self) -> dict:
        return taylor_derivatives(self.f, max(self.alpha, self.alpha + self.beta), self.partition)

    @cached_property
    def dg(self) -> dict:
        return taylor_derivatives(self.g, self.alpha + self.beta, self.partition)

    def D(self, k) -> Field:
        k = tuple(k)
        if not mi.order(k) < self.alpha + self.beta:
            raise OrderOutOfRange(f"D^k(f, g) needs |k| < {self.alpha + self.beta:g}")
        out = spectral_derivative(self.fg, k, self.partition)
        for k1, k2 in mi.splits(k):
            if mi.order(k1) < self.alpha and mi.order(k2) >= self.beta:
                out = out - mi.binom(k, k1) * (self.df[k1] * self.dg[k2])
        return out

    @cached_property
    def coefficients(self) -> dict:
        return {k: self.D(k) for k in mi.below(self.f.d, self.alpha + self.beta)}

    def __call__(self, x, y):
        h = self.partition.grid.displacement(x, y)
        out = self.fg.at(y).astype(float)
        for k, Dk in self.coefficients.items():
            out = out - mi.power(h, k) / mi.factorial(k) * Dk.at(x)
        omega_g = classical_remainder(self.g, self.beta, x, y, derivatives=self.dg)
        for k in mi.below(self.f.d, self.alpha):
            out = out - mi.power(h, k) / mi.factorial(k) * self.df[k].at(x) * omega_g
        return out


def D2(f: Field, g: Field, k, alpha: float, beta: float, partition: DyadicPartition) -> Field:
    """D^k(f, g) = d^k(f < g) - sum_{|k1|<alpha, |k2|>=beta} C(k, k1) d^k1 f d^k2 g."""
    return PairRemainder(f, g, alpha, beta, partition).D(k)


def omega2(f: Field, g: Field, alpha: float, beta: float, x, y, partition: DyadicPartition):
    return PairRemainder(f, g, alpha, beta, partition)(x, y)


def omega2_low(f: Field, g: Field, x, y, partition: DyadicPartition, fg: Field | None = None):
    """(f<g)(y) - (f<g)(x) - f(x)(g(y) - g(x)): the form valid when alpha + beta < 1."""
    fg = paraproduct(f, g, partition) if fg is None else fg
    return fg.at(y) - fg.at(x) - f.at(x) * (g.at(y) - g.at(x))


def R_seq(f: Field, g: Field, alpha: float, beta: float, partition: DyadicPartition, fg: Field | None = None) -> BlockSequence:
    """R^j = Delta_{j-1}(f < g) - sum_{|k|<alpha} Delta_{<j-2}(d^k f) Delta^k_{j-1} g."""
    _check_regs(alpha, beta, alpha + beta)
    fg = paraproduct(f, g, partition) if fg is None else fg
    ks = mi.below(f.d, alpha)
    dfs = {k: spectral_derivative(f, k, partition) for k in ks}
    blocks = []
    for j in range(partition.n_blocks):
        r = lp_block(fg, j - 1, partition)
        for k in ks:
            low = low_pass(dfs[k], j - 2, partition)
            if low.sup() == 0.0:
                continue
            r = r - low * moment_block(g, j - 1, k, partition)
        blocks.append(r)
    return BlockSequence(blocks, alpha=alpha + beta, note="R")


class TripleRemainder:
    """Omega^{alpha,beta,gamma}(f, g, h) built from the four-sequence decomposition.

    Components bound in ``ctx``: ``("1", k)`` = {Delta_{j-1} d^k f},
    ``("2", k)`` = {Delta^k_{j-1} g} for |k| < alpha, ``"3"`` = {R^j} and
    ``"4"`` = {Delta_{j-1} h}, all with shift 1 so that sums of pairs are
    Bony paraproducts.
    """

    def __init__(self, f: Field, g: Field, h: Field, alpha: float, beta: float, gamma: float, partition: DyadicPartition):
        _check_regs(alpha, beta, gamma, alpha + beta, beta + gamma, alpha + beta + gamma)
        self.f, self.g, self.h = f, g, h
        self.alpha, self.beta, self.gamma = float(alpha), float(beta), float(gamma)
        self.partition = partition
        self.total = self.alpha + self.beta + self.gamma
        self.fg = paraproduct(f, g, partition)
        self.fgh = paraproduct(self.fg, h, partition)
        self.ks = mi.below(f.d, self.alpha)
        self.ctx = CalcContext(partition, shift=1)
        for k in self.ks:
            n = mi.order(k)
            self.ctx.bind(("1", k), lp_decompose(spectral_derivative(f, k, partition), partition), self.alpha - n)
            self.ctx.bind(("2", k), moment_decompose(g, k, partition), self.beta + n)
        self.ctx.bind("3", R_seq(f, g, alpha, beta, partition, fg=self.fg))
        self.ctx.bind("4", lp_decompose(h, partition), self.gamma)

    def words(self) -> list:
        out = [self.ctx.word([("1", k), ("2", k), "4"]) for k in self.ks]
        out.append(self.ctx.word(["3", "4"]))
        return out

    @cached_property
    def D3(self) -> dict:
        """D^l(f, g, h): the polynomial coefficients collected from all words."""
        words = self.words()
        return {
            l: field_sum(self.ctx.D_k(w, l) for w in words)
            for l in mi.below(self.f.d, self.total)
        }

    @cached_property
    def pair_fg(self) -> PairRemainder:
        return PairRemainder(self.f, self.g, self.alpha, self.beta, self.partition, fg=self.fg)

    @cached_property
    def pair_gh(self) -> PairRemainder:
        return PairRemainder(self.g, self.h, self.beta, self.gamma, self.partition)

    @cached_property
    def df(self) -> dict:
        return taylor_derivatives(self.f, self.alpha, self.partition)

    @cached_property
    def mpls(self) -> dict:
        return {l: mpl(self.g, self.h, l, self.partition) for l in self.ks if mi.order(l) > 0}

    def omega_l(self, l, x, y):
        """Omega_l^{beta,gamma}(g, h)."""
        if mi.order(l) == 0:
            return self.pair_gh(x, y)
        return classical_remainder(self.mpls[l], self.beta + self.gamma + mi.order(l), x, y, self.partition)

    def __call__(self, x, y):
        h = self.partition.grid.displacement(x, y)
        out = self.fgh.at(y).astype(float)
        for l, Dl in self.D3.items():
            out = out - mi.power(h, l) / mi.factorial(l) * Dl.at(x)
        for l in self.ks:
            om = self.omega_l(l, x, y)
            for k in mi.below(self.f.d, self.alpha - mi.order(l)):
                kl = mi.add(k, l)
                out = out - mi.power(h, k) / mi.factorial(k) * self.df[kl].at(x) * om
        omega_h = classical_remainder(self.h, self.gamma, x, y, self.partition)
        for k, Dk in self.pair_fg.coefficients.items():
            out = out - mi.power(h, k) / mi.factorial(k) * Dk.at(x) * omega_h
        return out

    def abstract(self, x, y):
        """sum_{|k|<alpha} Omega^{(k)}_{124} + Omega_{34} from the abstract recursion."""
        out = 0.0
        for w in self.words():
            out = out + self.ctx.omega_word(w, x, y)
        return out


def omega3(f: Field, g: Field, h: Field, alpha: float, beta: float, gamma: float, x, y, partition: DyadicPartition):
    """Value of Omega^{alpha,beta,gamma}(f, g, h)(y, x) and the D^l(f, g, h) used."""
    tr = TripleRemainder(f, g, h, alpha, beta, gamma, partition)
    return tr(x, y), tr.D3


# ---------------------------------------------------------------------------
# identities: each returns (lhs, rhs, scale) with scale the largest term


def _sup(v) -> float:
    v = v.values if isinstance(v, Field) else np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0


def _ref(ctx: CalcContext, w, k) -> float:
    """sup |d^k f_w|, the size of the object the correction terms are taken from."""
    return _sup(spectral_derivative(ctx.f_word(w).total(), k))


def word_partitions(w: Word, r: int):
    """Splits of w into r contiguous nonempty subwords."""
    for cuts in itertools.combinations(range(1, w.n), r - 1):
        bounds = (0,) + cuts + (w.n,)
        yield [Word(w.ids[a:b], w.alphas[a:b]) for a, b in zip(bounds, bounds[1:])]


def identity_wdofd(ctx: CalcContext, w, k, j):
    """D^{k,j}_w rebuilt from the partition formula."""
    w, k = ctx.word(w), tuple(k)
    n = w.n
    head, last = w.prefix(n - 1), w.suffix(n - 1)
    terms = []
    for k1, k2 in mi.splits(k):
        terms.append(mi.binom(k, k1) * (ctx.C_kj(head, k1, j - ctx.shift) * ctx.d_block(last, k2, j)))
    for r in range(2, n + 1):
        sign = (-1) ** r
        for parts in word_partitions(w, r):
            for ks in mi.compositions(k, r):
                if not all(mi.order(ki) < p.alpha for ki, p in zip(ks, parts)):
                    continue
                prod = ctx.D_kj(parts[-1], ks[-1], j)
                for ki, p in zip(ks[:-1], parts[:-1]):
                    prod = ctx.D_k(p, ki) * prod
                terms.append((sign * mi.multinomial(k, ks)) * prod)
    lhs = ctx.D_kj(w, k, j)
    rhs = field_sum(terms, ctx.d, ctx.partition.N)
    scale = max([_sup(lhs), _ref(ctx, w, k)] + [_sup(t) for t in terms])
    return lhs, rhs, scale


def identity_explicit_c(ctx: CalcContext, w, k, j):
    """C^{k,j}_w from the head/tail sums over C of the prefix word."""
    w, k = ctx.word(w), tuple(k)
    n = w.n
    head, last = w.prefix(n - 1), w.suffix(n - 1)
    L = ctx.length
    below = mi.order(k) < w.alpha
    idx = range(j, L) if below else range(0, min(j, L))
    terms = []
    for k1, k2 in mi.splits(k):
        for i in idx:
            t = mi.binom(k, k1) * (ctx.C_kj(head, k1, i - ctx.shift) * ctx.d_block(last, k2, i))
            terms.append(-t if below else t)
    lhs = ctx.C_kj(w, k, j)
    rhs = field_sum(terms, ctx.d, ctx.partition.N)
    scale = max([_sup(lhs), _ref(ctx, w, k)] + [_sup(t) for t in terms])
    return lhs, rhs, scale


def identity_lmm1(ctx: CalcContext, w, theta, j, x, y):
    """Omega^{theta,j}_w against Omega^theta(f^j_w) minus the D^k-weighted suffix pieces."""
    w = ctx.word(w)
    h = ctx.partition.grid.displacement(x, y)
    memo = {}
    lhs = ctx.omega_theta_j(w, theta, j, x, y, memo)
    first = classical_remainder(ctx.block(w, j), theta, x, y)
    terms = [first]
    for m in range(1, w.n):
        head, tail = w.prefix(m), w.suffix(m)
        for k in mi.below(ctx.d, head.alpha):
            t = mi.power(h, k) / mi.factorial(k) * ctx.D_k(head, k).at(x) * ctx.omega_theta_j(
                tail, theta - mi.order(k), j, x, y, memo
            )
            terms.append(-t)
    rhs = np.sum(terms, axis=0)
    scale = max([_sup(lhs)] + [_sup(t) for t in terms])
    return lhs, rhs, scale


def identity_lmm2(ctx: CalcContext, w, theta, j, x, y):
    """Omega^{theta,j}_w = Omega^{theta,<j-N}_{1..n-1} f_n^j + sum C^{k,j-N}_{1..n-1} Omega_n^{theta-|k|,j}."""
    w = ctx.word(w)
    n = w.n
    head, last = w.prefix(n - 1), w.suffix(n - 1)
    h = ctx.partition.grid.displacement(x, y)
    memo = {}
    lhs = ctx.omega_theta_j(w, theta, j, x, y, memo)
    terms = [ctx.omega_theta_below(head, theta, j - ctx.shift, x, y, memo) * ctx.block(last, j).at(y)]
    for k in mi.below(ctx.d, theta):
        t = (
            mi.power(h, k) / mi.factorial(k)
            * ctx.C_kj(head, k, j - ctx.shift).at(x)
            * ctx.omega_theta_j(last, theta - mi.order(k), j, x, y, memo)
        )
        terms.append(t)
    rhs = np.sum(terms, axis=0)
    scale = max([_sup(lhs)] + [_sup(t) for t in terms])
    return lhs, rhs, scale


def identity_block_sum(ctx: CalcContext, w, x, y):
    """Omega_w = sum_j Omega^{alpha_w, j}_w."""
    w = ctx.word(w)
    memo = {}
    lhs = ctx.omega_word(w, x, y)
    terms = [ctx.omega_theta_j(w, w.alpha, j, x, y, memo) for j in range(ctx.length)]
    rhs = np.sum(terms, axis=0)
    scale = max([_sup(lhs)] + [_sup(t) for t in terms])
    return lhs, rhs, scale


def identity_leibniz(f: Field, g: Field, theta: float, x, y):
    """Omega^theta(fg) = Omega^theta(f) g(y) + sum (y-x)^k/k! d^k f(x) Omega^{theta-|k|}(g)."""
    h = f.grid.displacement(x, y)
    lhs = classical_remainder(f * g, theta, x, y)
    terms = [classical_remainder(f, theta, x, y) * g.at(y)]
    for k in mi.below(f.d, theta):
        dk = spectral_derivative(f, k)
        terms.append(mi.power(h, k) / mi.factorial(k) * dk.at(x) * classical_remainder(g, theta - mi.order(k), x, y))
    rhs = np.sum(terms, axis=0)
    scale = max([_sup(lhs)] + [_sup(t) for t in terms])
    return lhs, rhs, scale
