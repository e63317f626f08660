"""Scaling-exponent regression, decay fits and identity residual suites."""

from __future__ import annotations

import csv
import io
import json
import math
import subprocess
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import calculus as calc
from . import multiindex as mi
from .besov import (
    SplitMix64,
    block_decay_slope,
    classical_remainder,
    linear_fit,
    synth_band,
    synth_lacunary,
    synth_sequence,
    taylor_derivatives,
)
from .errors import InsufficientScales, UnknownIdentity
from .paraproduct import bony_residual
from .spectral import DyadicPartition, moment_decompose

IDENTITIES = ("wdofd", "explicit_c", "lmm1", "lmm2", "bony", "reorg", "leibniz", "block_sum")
DECAY_TARGETS = ("c_kj", "r_seq", "d_kj", "moment_block")
FORMULAS = ("omega1", "omega2", "omega3", "omega_word")

SCALE_BINS = tuple(range(1, 12))
MIN_PER_BIN = 16


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class RemainderSample:
    formula: str
    word: str
    alpha_total: float
    x: tuple
    h: tuple
    abs_omega: float
    scale_bin: int

    CSV_COLUMNS = ("formula", "word", "alpha_total", "x", "h", "abs_omega", "scale_bin")

    def row(self) -> list:
        return [
            self.formula,
            self.word,
            repr(self.alpha_total),
            " ".join(str(v) for v in self.x),
            " ".join(repr(v) for v in self.h),
            repr(self.abs_omega),
            self.scale_bin,
        ]


def samples_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RemainderSample.CSV_COLUMNS)
    for s in samples:
        w.writerow(s.row())
    return buf.getvalue()


def _directions(d: int) -> list:
    if d == 1:
        return [(1,)]
    return [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


def sample_pairs(d: int, N: int, seed: int, n_base: int = 64, per_bin: int = 8, bins=SCALE_BINS):
    """Base points and grid-multiple displacements binned by |h| in [2^{-r-1}, 2^{-r}).

    Returns integer index arrays x, y of shape (P, d) and the bin of each pair.
    In d = 1 both signs of each multiple are used; in d = 2 each multiple is
    taken along 8 lattice directions.
    """
    rng = SplitMix64(seed)
    dx = 2 * math.pi / N
    base = np.array([[rng.integer(0, N) for _ in range(d)] for _ in range(n_base)], dtype=np.int64)
    xs, ys, rs = [], [], []
    for r in bins:
        hi, lo = 2.0**-r, 2.0 ** (-r - 1)
        for direction in _directions(d):
            length = dx * math.sqrt(sum(c * c for c in direction))
            m_lo, m_hi = math.ceil(lo / length), math.ceil(hi / length) - 1
            if m_hi < m_lo:
                continue
            ms = np.unique(np.round(np.linspace(m_lo, m_hi, min(per_bin, m_hi - m_lo + 1))).astype(np.int64))
            steps = [m * s for m in ms for s in ((1, -1) if d == 1 else (1,))]
            steps = steps[:per_bin]
            for m in steps:
                disp = np.array(direction, dtype=np.int64) * m
                xs.append(base)
                ys.append(np.mod(base + disp, N))
                rs.append(np.full(n_base, r))
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(rs)


def sample_remainder(evaluator, formula: str, word: str, alpha_total: float, d: int, N: int, seed: int,
                     n_base: int = 64, per_bin: int = 8) -> list:
    x, y, r = sample_pairs(d, N, seed, n_base, per_bin)
    values = np.abs(np.asarray(evaluator(x, y), dtype=float))
    h = _displacement(d, N, x, y)
    return [
        RemainderSample(formula, word, float(alpha_total), tuple(int(v) for v in x[i]), tuple(float(v) for v in h[i]), float(values[i]), int(r[i]))
        for i in range(len(values))
    ]


def _displacement(d, N, x, y):
    m = np.mod(y - x, N)
    m = np.where(m > N // 2, m - N, m)
    return m * (2 * math.pi / N)


# ---------------------------------------------------------------------------
# exponent fits


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r2: float
    r_min: int
    r_max: int
    counts: tuple = ()
    max_residual: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def fit_exponent(samples, drop_extremes: int = 2, min_per_bin: int = MIN_PER_BIN) -> ScalingFit:
    """Fit log2(max |Omega| per bin) against log2(max |h| per bin).

    Bins with fewer than ``min_per_bin`` samples are discarded, then
    ``drop_extremes`` of the finest and of the coarsest bins.
    """
    by_bin: dict = {}
    for s in samples:
        by_bin.setdefault(s.scale_bin, []).append(s)
    usable = sorted(r for r, ss in by_bin.items() if len(ss) >= min_per_bin)
    if drop_extremes:
        usable = usable[drop_extremes:-drop_extremes]
    if len(usable) < 5:
        raise InsufficientScales(f"need at least 5 scale bins after trimming, found {len(usable)}")
    counts = tuple(len(by_bin[r]) for r in usable)
    hs = np.array([max(math.sqrt(sum(c * c for c in s.h)) for s in by_bin[r]) for r in usable])
    om = np.array([max(s.abs_omega for s in by_bin[r]) for r in usable])
    if np.all(om == 0.0):
        return ScalingFit(math.nan, math.nan, math.nan, min(usable), max(usable), counts, 0.0, True)
    keep = om > 0
    if keep.sum() < 5:
        raise InsufficientScales("fewer than 5 bins with a nonzero remainder")
    lx, ly = np.log2(hs[keep]), np.log2(om[keep])
    slope, intercept, r2 = linear_fit(lx, ly)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return ScalingFit(slope, intercept, r2, min(usable), max(usable), counts, resid)


# ---------------------------------------------------------------------------
# remainder evaluators on synthetic inputs

# seeds of the second and third factor are offset so that they differ from
# the first factor's
_SEED_STRIDE = 1_000_003


def synth_fields(alphas, seed: int, partition: DyadicPartition, J: int | None = None) -> list:
    J = partition.J_max - 1 if J is None else J
    return [synth_band(a, seed + i * _SEED_STRIDE, J, partition) for i, a in enumerate(alphas)]


def make_evaluator(formula: str, alphas, seed: int, partition: DyadicPartition, J: int | None = None):
    """Return ``(evaluator, word label, alpha_total)`` for a named remainder."""
    alphas = tuple(float(a) for a in alphas)
    if formula == "omega1":
        # no products are formed, so the whole resolvable band can be used
        (a,) = alphas
        (f,) = synth_fields(alphas, seed, partition, partition.J_max if J is None else J)
        dv = taylor_derivatives(f, a, partition)
        return (lambda x, y: classical_remainder(f, a, x, y, derivatives=dv)), "1", a
    if formula == "omega2":
        a, b = alphas
        f, g = synth_fields(alphas, seed, partition, J)
        return calc.PairRemainder(f, g, a, b, partition), "12", a + b
    if formula == "omega3":
        a, b, c = alphas
        f, g, h = synth_fields(alphas, seed, partition, J)
        return calc.TripleRemainder(f, g, h, a, b, c, partition), "123", a + b + c
    if formula == "omega_word":
        ctx = sequence_context(alphas, seed, partition, J)
        w = ctx.word([str(i + 1) for i in range(len(alphas))])
        return (lambda x, y: ctx.omega_word(w, x, y)), "".join(w.ids), w.alpha
    raise UnknownIdentity(f"unknown formula {formula!r}; expected one of {FORMULAS}")


def sequence_context(alphas, seed: int, partition: DyadicPartition, J: int | None = None, shift: int = 1):
    J = partition.J_max - 1 if J is None else J
    ctx = calc.CalcContext(partition, shift)
    for i, a in enumerate(alphas):
        ctx.bind(str(i + 1), synth_sequence(a, seed + i * _SEED_STRIDE, J, partition))
    # validate the whole word up front
    ctx.word([str(i + 1) for i in range(len(alphas))])
    return ctx


@dataclass
class ScalingReport:
    formula: str
    alphas: tuple
    fits: list = field(default_factory=list)
    seeds: tuple = ()

    @property
    def expected(self) -> float:
        return round(float(sum(self.alphas)), 12)

    @property
    def median_slope(self) -> float:
        return float(np.median([f.slope for f in self.fits]))


def scaling_experiment(formula: str, alphas, seeds, partition: DyadicPartition, n_base: int = 64,
                       per_bin: int = 8, drop_extremes: int = 2, J: int | None = None, keep_samples: bool = False):
    """Per-seed ScalingFit for a remainder formula; returns (report, samples)."""
    report = ScalingReport(formula, tuple(float(a) for a in alphas), seeds=tuple(seeds))
    all_samples = []
    for seed in seeds:
        ev, word, total = make_evaluator(formula, alphas, seed, partition, J)
        samples = sample_remainder(ev, formula, word, total, partition.d, partition.N, seed, n_base, per_bin)
        report.fits.append(fit_exponent(samples, drop_extremes))
        if keep_samples:
            all_samples.extend(samples)
    return report, all_samples


# ---------------------------------------------------------------------------
# identities


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    params: dict
    residual: float
    scale: float
    checks: int

    def to_dict(self) -> dict:
        return asdict(self)


def _pairs(d: int, N: int, seed: int, count: int = 100):
    """``count`` random pairs with displacements spread over the scale bins."""
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    x = np.array([[rng.integer(0, N) for _ in range(d)] for _ in range(count)], dtype=np.int64)
    disp = []
    for _ in range(count):
        r = 1 + rng.integer(0, 11)
        m = max(1, int(2.0**-r / (2 * math.pi / N)))
        disp.append([rng.integer(-m, m + 1) for _ in range(d)])
    y = np.mod(x + np.array(disp, dtype=np.int64), N)
    return x, y


def _residual(lhs, rhs, scale) -> float:
    lhs = lhs.values if hasattr(lhs, "values") else np.asarray(lhs)
    rhs = rhs.values if hasattr(rhs, "values") else np.asarray(rhs)
    diff = float(np.max(np.abs(lhs - rhs))) if np.size(lhs) else 0.0
    return diff / scale if scale > 0 else diff


def run_identity_suite(ctx, identity: str, params: dict | None = None) -> IdentityReport:
    """Evaluate both sides of an identity and report the max relative residual.

    For the abstract identities ``ctx`` must have components "1".."n" bound
    and ``params["word"]`` names the word.  ``bony``, ``leibniz`` and
    ``reorg`` synthesise fields from ``params["alphas"]`` and
    ``params["seed"]`` on ``ctx.partition``.
    """
    params = dict(params or {})
    if identity not in IDENTITIES:
        raise UnknownIdentity(f"unknown identity {identity!r}; expected one of {IDENTITIES}")
    p = ctx.partition
    seed = int(params.get("seed", 0))
    x, y = _pairs(p.d, p.N, seed, int(params.get("pairs", 100)))
    k_max = int(params.get("k_max", 2))
    worst, worst_scale, checks = 0.0, 0.0, 0

    def record(lhs, rhs, scale):
        nonlocal worst, worst_scale, checks
        res = _residual(lhs, rhs, scale)
        checks += 1
        if res >= worst:
            worst, worst_scale = res, scale

    if identity in ("wdofd", "explicit_c", "lmm1", "lmm2", "block_sum"):
        w = ctx.word(params["word"])
        js = params.get("js") or list(range(ctx.length))
        if identity in ("wdofd", "explicit_c"):
            fn = calc.identity_wdofd if identity == "wdofd" else calc.identity_explicit_c
            for n in range(k_max + 1):
                for k in mi.of_order(p.d, n):
                    for j in js:
                        record(*fn(ctx, w, k, j))
        elif identity == "block_sum":
            record(*calc.identity_block_sum(ctx, w, x, y))
        else:
            fn = calc.identity_lmm1 if identity == "lmm1" else calc.identity_lmm2
            thetas = params.get("thetas") or [w.alpha, math.floor(w.alpha) + 1.0]
            for theta in thetas:
                for j in js:
                    record(*fn(ctx, w, theta, j, x, y))
    elif identity == "bony":
        alphas = params.get("alphas", (0.6, 0.7))
        f, g = synth_fields(alphas, seed, p)
        res = bony_residual(f, g, p)
        record(np.array([res]), np.array([0.0]), 1.0)
    elif identity == "leibniz":
        alphas = params.get("alphas", (0.6, 0.7))
        f, g = synth_fields(alphas, seed, p)
        theta = float(params.get("theta", sum(alphas)))
        record(*calc.identity_leibniz(f, g, theta, x, y))
    elif identity == "reorg":
        alphas = params.get("alphas", (0.6, 0.7, 0.9))
        f, g, h = synth_fields(alphas, seed, p)
        tr = calc.TripleRemainder(f, g, h, *alphas, p)
        a, b = tr(x, y), tr.abstract(x, y)
        scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), fgh_scale(tr, x, y))
        record(a, b, scale)
    return IdentityReport(identity, _jsonable(params), worst, worst_scale, checks)


def fgh_scale(tr, x, y) -> float:
    """Size of the largest single term in the triple remainder."""
    return float(np.max(np.abs(tr.fgh.at(y))))


# ---------------------------------------------------------------------------
# decay


@dataclass(frozen=True)
class DecayReport:
    target: str
    params: dict
    expected: float
    slopes: tuple
    slope: float
    j_min: int
    j_max: int

    def to_dict(self) -> dict:
        return asdict(self)


LACUNARY_RATIO = 1.1


def _decay_norms(ctx, target: str, params: dict, seed: int, p: DyadicPartition):
    if target in ("c_kj", "d_kj"):
        alphas = params["alphas"]
        c = ctx if ctx is not None and seed == int(params.get("seed", 0)) else sequence_context(alphas, seed, p)
        w = c.word([str(i + 1) for i in range(len(alphas))])
        k = tuple(params["k"])
        if target == "c_kj":
            norms = c.C_decay(w, k)
        else:
            norms = np.array([c.D_kj(w, k, j).sup() for j in range(c.length)])
        return norms, -(w.alpha - mi.order(k))
    if target == "r_seq":
        a, b = params["alphas"]
        J = params.get("J", p.J_max - 1)
        f = synth_lacunary(a, seed, J, p, ratio=LACUNARY_RATIO)
        g = synth_lacunary(b, seed + _SEED_STRIDE, J, p, ratio=LACUNARY_RATIO)
        return calc.R_seq(f, g, a, b, p).sup_norms(), -(a + b)
    if target == "moment_block":
        (b,) = params["alphas"]
        k = tuple(params["k"])
        g = synth_lacunary(b, seed, params.get("J", p.J_max), p, ratio=LACUNARY_RATIO)
        return moment_decompose(g, k, p).sup_norms(), -(b + mi.order(k))
    raise UnknownIdentity(f"unknown decay target {target!r}; expected one of {DECAY_TARGETS}")


def default_window(target: str, expected: float, p: DyadicPartition) -> tuple:
    """Fit window in j for a decay target.

    Decaying C and D skip the coarsest blocks and stop before the band edge,
    where the truncated tail sum steepens the decay.  Growing C needs a few
    scales before its head sum grows geometrically and is complete at the
    top.  R^j and moment blocks of the lacunary inputs start at j = 5, below
    which rounding ratio 2^j to an integer moves the modes along the symbol.
    """
    if target in ("c_kj", "d_kj"):
        return (3, p.J_max - 1) if expected < 0 else (5, p.J_max + 1)
    return (5, p.J_max)


def run_decay_suite(ctx, target: str, params: dict, partition: DyadicPartition | None = None) -> DecayReport:
    """Median over seeds of the fitted slope of log2 ||block_j|| in j.

    ``params``: ``alphas``, ``k`` (where relevant), ``seeds`` and an optional
    inclusive ``j_range``; see :func:`default_window` for the default.
    """
    p = partition if partition is not None else ctx.partition
    if target not in DECAY_TARGETS:
        raise UnknownIdentity(f"unknown decay target {target!r}; expected one of {DECAY_TARGETS}")
    seeds = list(params.get("seeds", [params.get("seed", 0)]))
    slopes, expected, j_range = [], None, params.get("j_range")
    for seed in seeds:
        norms, expected = _decay_norms(ctx, target, params, seed, p)
        lo, hi = tuple(j_range) if j_range else default_window(target, expected, p)
        if hi - lo + 1 < 5:
            raise InsufficientScales(f"need at least 5 scales, window is j = {lo}..{hi}")
        fit = block_decay_slope(norms, (lo, hi))
        if fit.j_max - fit.j_min + 1 < 5:
            raise InsufficientScales(f"need at least 5 usable scales, found j = {fit.j_min}..{fit.j_max}")
        slopes.append(fit.slope)
    return DecayReport(target, _jsonable(params), round(float(expected), 12), tuple(slopes), float(np.median(slopes)), lo, hi)


# ---------------------------------------------------------------------------
# reports


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, check=True, timeout=10,
            cwd=Path(__file__).resolve().parent,
        )
        return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        from . import __version__

        return __version__


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def report_json(suite: str, params: dict, expected, fitted, tolerance, passed: bool, seeds) -> str:
    doc = {
        "suite": suite,
        "params": _jsonable(params),
        "expected": _jsonable(expected),
        "fitted": _jsonable(fitted),
        "tolerance": tolerance,
        "pass": bool(passed),
        "seeds": _jsonable(list(seeds)),
        "git_describe": git_describe(),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
