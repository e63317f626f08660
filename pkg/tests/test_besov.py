import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lptorus.besov import (
    SplitMix64,
    besov_norm,
    block_decay_slope,
    check_regularity,
    classical_remainder,
    decay_csv,
    synth_band,
    synth_lacunary,
    synth_sequence,
)
from lptorus.errors import InsufficientScales, IntegerRegularity, NonpositiveRegularity, UnresolvedBandwidth
from lptorus.field import Field
from lptorus.spectral import lp_decompose, make_partition, pure_mode, spectral_derivative


def test_splitmix_reference_values():
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_regularity_guards():
    with pytest.raises(IntegerRegularity, match="non-integer"):
        check_regularity(2.0)
    with pytest.raises(NonpositiveRegularity):
        check_regularity(-0.1)
    assert check_regularity(0.6) == 0.6


def test_norm_of_single_block_mode(part):
    assert besov_norm(pure_mode((32,), 1, part.N), 0.5, part) == pytest.approx(4.0, abs=1e-12)
    assert besov_norm(Field.zeros(1, part.N), 0.5, part) == 0.0


def test_lacunary_norm_and_slope(part):
    f = synth_lacunary(0.6, 42, part.J_max - 1, part)
    assert 0.25 <= besov_norm(f, 0.6, part) <= 2.0
    assert besov_norm(f, 0.6, part) <= 2**-0.6 + 1e-12
    fit = block_decay_slope(lp_decompose(f, part), (1, part.J_max))
    assert abs(fit.slope + 0.6) <= 0.05


def test_lacunary_block_structure(part):
    # mode 2^j lands in Delta_{j-1} only
    f = synth_lacunary(0.6, 7, 8, part)
    seq = lp_decompose(f, part)
    nonzero = [j for j, b in enumerate(seq) if b.sup() > 1e-13]
    assert nonzero == list(range(0, 9))


def test_synthesis_is_deterministic(part):
    a = synth_lacunary(0.7, 3, 10, part, ratio=1.1)
    b = synth_lacunary(0.7, 3, 10, part, ratio=1.1)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, synth_lacunary(0.7, 4, 10, part, ratio=1.1).values)


def test_synthesis_resolvability(small):
    with pytest.raises(UnresolvedBandwidth):
        synth_band(0.5, 0, small.J_max + 1, small)
    with pytest.raises(ValueError):
        synth_lacunary(0.5, 0, 3, small, ratio=2.5)


def test_synth_sequence_support_and_size(part):
    seq = synth_sequence(0.8, 5, part.J_max - 1, part)
    assert len(seq) == part.n_blocks
    for j, b in enumerate(seq):
        assert b.support <= 2**j
        assert b.sup() <= 2 ** (-j * 0.8) + 1e-12
    assert seq.alpha == 0.8


def test_classical_remainder_examples(small):
    c = Field.constant(1.7, 1, small.N)
    x = np.arange(0, small.N, 13)
    y = (x + 5) % small.N
    assert np.max(np.abs(classical_remainder(c, 1.3, x, y))) == 0.0
    f = pure_mode((1,), 1, small.N)
    idx = np.arange(1, 40)
    h = idx * 2 * math.pi / small.N
    got = classical_remainder(f, 1.5, np.zeros_like(idx), idx)
    assert np.max(np.abs(got - (np.cos(h) - 1))) < 1e-13


def test_classical_remainder_order(small):
    f = synth_band(1.4, 2, small.J_max - 1, small)
    # theta <= 0 is plain evaluation
    x, y = np.array([3, 10]), np.array([7, 90])
    assert np.array_equal(classical_remainder(f, -1, x, y), f.at(y))


def test_decay_fit_examples():
    js = np.arange(10)
    assert block_decay_slope(2.0 ** (-1.3 * js)).slope == pytest.approx(-1.3, abs=1e-10)
    with pytest.raises(InsufficientScales):
        block_decay_slope(np.zeros(10))
    assert decay_csv([1.0, 0.5]).splitlines() == ["j,sup_norm", "0,1.0", "1,0.5"]


def test_lacunary_decay_slope_with_ratio(part):
    slopes = []
    for seed in range(4):
        g = synth_lacunary(0.7, seed, part.J_max, part, ratio=1.1)
        slopes.append(block_decay_slope(lp_decompose(g, part), (5, part.J_max)).slope)
    assert abs(np.median(slopes) + 0.7) <= 0.05


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 2.9).filter(lambda a: abs(a - round(a)) > 1e-3), st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_norm_homogeneous(alpha, c):
    p = make_partition(grid_spec=(1, 2**10))
    f = synth_band(0.5, 11, 6, p)
    assert besov_norm(c * f, alpha, p) == pytest.approx(abs(c) * besov_norm(f, alpha, p), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 64))
def test_splitmix_ranges(seed, n):
    rng = SplitMix64(seed)
    vals = [rng.uniform() for _ in range(n)]
    assert all(0.0 <= v < 1.0 for v in vals)
    assert all(3 <= rng.integer(3, 9) < 9 for _ in range(n))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.5), st.integers(0, 1000), st.integers(1, 300))
def test_remainder_steps_down_by_one_order(theta, seed, shift):
    # Omega^theta differs from Omega^{theta-1} exactly by the top-order Taylor term
    p = make_partition(grid_spec=(1, 2**10))
    f = synth_band(1.5, seed, 5, p)
    x = np.arange(0, p.N, 37)
    y = (x + shift) % p.N
    n = math.ceil(theta) - 1
    if n < 0 or abs(theta - round(theta)) < 1e-6:
        return
    h = p.grid.displacement(x, y)[:, 0]
    top = h**n / math.factorial(n) * spectral_derivative(f, (n,)).at(x)
    lhs = classical_remainder(f, theta - 1, x, y) - classical_remainder(f, theta, x, y)
    assert np.max(np.abs(lhs - top)) < 1e-10
