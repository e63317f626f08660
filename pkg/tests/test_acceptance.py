"""Acceptance criteria, each at its stated tolerance.

Every check records a line for the summary printed by conftest.
"""

import json

import numpy as np
import pytest

from lptorus import calculus as C
from lptorus.besov import besov_norm
from lptorus.cli import main
from lptorus.errors import IntegerRegularity
from lptorus.field import Field
from lptorus.paraproduct import bony_residual, paraproduct, resonant
from lptorus.spectral import lp_block, lp_decompose, make_partition, pure_mode
from lptorus.verify import (
    run_decay_suite,
    run_identity_suite,
    scaling_experiment,
    sequence_context,
    synth_fields,
)

SEEDS10 = list(range(10))


# ---------------------------------------------------------------- AC1


@pytest.mark.parametrize("grid_spec", [(1, 2**14), (2, 256)])
def test_ac1_partition_of_unity(grid_spec, acceptance):
    p = make_partition(grid_spec=grid_spec)
    r = p.grid.radius
    total = sum(p.multiplier(j) for j in range(-1, p.J_max + 1))
    resid = float(np.max(np.abs(total - 1.0)[r <= p.resolvable_radius]))
    assert acceptance(1, resid <= 1e-12, f"unity residual {resid:.1e} on {grid_spec}")


def test_ac1_pure_mode_diagonal(part, acceptance):
    worst = 0.0
    for kappa in (1, 3, 17, 32, 45, 700, 2047, 3000):
        mode = pure_mode((kappa,), 1, part.N, phase=0.3)
        for j in range(-1, part.J_max + 1):
            expected = float(part.rho_j(np.array([[kappa]]), j)[0]) * mode.values
            worst = max(worst, float(np.max(np.abs(lp_block(mode, j, part).values - expected))))
    assert acceptance(1, worst <= 1e-12, f"diagonal action {worst:.1e}")


def test_ac1_disjoint_blocks(part, acceptance):
    (f,) = synth_fields((0.6,), 3, part)
    nonzero = 0
    for j in range(-1, part.J_max + 1):
        bj = lp_block(f, j, part)
        for i in range(-1, part.J_max + 1):
            if abs(i - j) >= 2:
                nonzero += int(np.count_nonzero(lp_block(bj, i, part).values))
    assert acceptance(1, nonzero == 0, f"Δ_iΔ_j nonzero samples {nonzero}")


# ---------------------------------------------------------------- AC2


def test_ac2_bony(part, acceptance):
    worst = max(bony_residual(*synth_fields((0.6, 0.7), s, part), part) for s in range(20))
    assert acceptance(2, worst <= 1e-10, f"max residual {worst:.1e} over 20 seed pairs")


# ---------------------------------------------------------------- AC3


def test_ac3_norm_stability(part, acceptance):
    a, b = 0.6, 0.7
    cp, cr = [], []
    for s in range(20):
        f, g = synth_fields((a, b), s, part)
        nf, ng = besov_norm(f, a, part), besov_norm(g, b, part)
        cp.append(besov_norm(paraproduct(f, g, part), b, part) / (nf * ng))
        cr.append(besov_norm(resonant(f, g, part), a + b, part) / (nf * ng))
    sp, sr = max(cp) / min(cp), max(cr) / min(cr)
    assert acceptance(3, sp < 5 and sr < 5, f"spread paraproduct {sp:.2f}x, resonant {sr:.2f}x")


# ---------------------------------------------------------------- AC4

IDENTITY_CASES = [
    ("wdofd", (0.9, 0.8), {}),
    ("wdofd", (0.9, 0.8, 0.6), {}),
    ("wdofd", (0.9, 0.8, 0.6, 0.45), {}),
    ("explicit_c", (0.9, 0.8), {"k_max": 3}),
    ("explicit_c", (0.9, 0.8, 0.6), {"k_max": 3}),
    ("lmm1", (0.9, 0.8), {}),
    ("lmm1", (0.9, 0.8, 0.6), {}),
    ("lmm2", (0.9, 0.8), {}),
    ("lmm2", (0.9, 0.8, 0.6), {}),
]


@pytest.mark.parametrize("identity,alphas,extra", IDENTITY_CASES)
def test_ac4_abstract_identities(part, identity, alphas, extra, acceptance):
    ctx = sequence_context(alphas, 11, part)
    word = "".join(str(i + 1) for i in range(len(alphas)))
    rep = run_identity_suite(ctx, identity, {"word": word, "seed": 5, **extra})
    assert acceptance(4, rep.residual <= 1e-8, f"{identity} n={len(alphas)}: {rep.residual:.1e}")


@pytest.mark.parametrize("identity,alphas", [("reorg", (0.6, 0.7, 0.9)), ("reorg", (1.3, 0.4, 0.9)), ("leibniz", (0.6, 1.7))])
def test_ac4_field_identities(part, identity, alphas, acceptance):
    ctx = sequence_context((0.9,), 0, part)
    rep = run_identity_suite(ctx, identity, {"alphas": alphas, "seed": 2})
    tol = 1e-10 if identity == "leibniz" else 1e-8
    assert acceptance(4, rep.residual <= tol, f"{identity} {alphas}: {rep.residual:.1e}")


# ---------------------------------------------------------------- AC5

DECAY_CASES = [("c_kj", (0.6, 0.7), k) for k in (0, 1, 2)]
DECAY_CASES += [("c_kj", (0.6, 0.7, 0.9), k) for k in (0, 1, 2)]
DECAY_CASES += [("r_seq", (0.6, 0.7), 0), ("r_seq", (1.3, 0.4), 0)]
DECAY_CASES += [("moment_block", (0.7,), k) for k in (0, 1, 2)]


@pytest.mark.parametrize("target,alphas,k", DECAY_CASES)
def test_ac5_decay(part, target, alphas, k, acceptance):
    rep = run_decay_suite(None, target, {"alphas": alphas, "k": (k,), "seeds": SEEDS10}, part)
    ok = abs(rep.slope - rep.expected) <= 0.15
    assert acceptance(5, ok, f"{target} {alphas} k={k}: slope {rep.slope:.3f} vs {rep.expected:.2f}")


# ---------------------------------------------------------------- AC6

SCALING_CASES = [
    ("omega1", (0.6,), 0.10),
    ("omega1", (1.4,), 0.10),
    ("omega1", (2.3,), 0.10),
    ("omega2", (0.6, 0.7), 0.15),
    ("omega2", (1.3, 0.4), 0.15),
    ("omega2", (0.7, 1.6), 0.15),
    ("omega3", (0.6, 0.7, 0.9), 0.20),
    ("omega_word", (0.9, 0.8, 0.6), 0.20),
]


@pytest.mark.parametrize("formula,alphas,tol", SCALING_CASES)
def test_ac6_scaling(part, formula, alphas, tol, acceptance):
    rep, _ = scaling_experiment(formula, alphas, SEEDS10, part)
    ok = abs(rep.median_slope - rep.expected) <= tol
    assert acceptance(6, ok, f"{formula} {alphas}: median slope {rep.median_slope:.3f} vs {rep.expected:.2f}")


# ---------------------------------------------------------------- AC7


def test_ac7_low_regularity_reduction(part, acceptance):
    x = np.arange(0, part.N, 37)
    y = (x + 101) % part.N
    worst = 0.0
    for s in range(5):
        f, g = synth_fields((0.3, 0.5), s, part)
        worst = max(worst, float(np.max(np.abs(C.omega2(f, g, 0.3, 0.5, x, y, part) - C.omega2_low(f, g, x, y, part)))))
    assert acceptance(7, worst <= 1e-10, f"omega2 vs low-regularity form {worst:.1e}")


def test_ac7_d2_matches_abstract(part, acceptance):
    worst = 0.0
    for a, b in [(1.3, 0.4), (0.6, 0.7), (0.7, 1.6)]:
        f, g = synth_fields((a, b), 4, part)
        ctx = C.CalcContext(part)
        ctx.bind("1", lp_decompose(f, part), a)
        ctx.bind("2", lp_decompose(g, part), b)
        pr = C.PairRemainder(f, g, a, b, part)
        for k in pr.coefficients:
            d2, dk = pr.coefficients[k], ctx.D_k("12", k)
            worst = max(worst, float(np.max(np.abs(d2.values - dk.values))) / d2.sup())
    assert acceptance(7, worst <= 1e-8, f"D2 vs D_k(12) {worst:.1e}")


def test_ac7_pair_sum_is_paraproduct(part, acceptance):
    worst = 0.0
    for s in range(5):
        f, g = synth_fields((0.6, 0.7), s, part)
        ctx = C.CalcContext(part)
        ctx.bind("1", lp_decompose(f, part), 0.6)
        ctx.bind("2", lp_decompose(g, part), 0.7)
        diff = ctx.f_word("12").total().values - paraproduct(f, g, part).values
        worst = max(worst, float(np.max(np.abs(diff))))
    assert acceptance(7, worst <= 1e-10, f"Σ(f1,f2) vs f⩕g {worst:.1e}")


# ---------------------------------------------------------------- AC8


def test_ac8_constant_components(part, acceptance):
    x = np.arange(0, part.N, 29)
    y = (x + np.arange(len(x)) % 300 - 150) % part.N
    c = Field.constant(0.7, 1, part.N)
    worst = 0.0
    for s in range(3):
        f, g = synth_fields((0.6, 0.7), s, part)
        worst = max(worst, float(np.max(np.abs(C.omega2(f, c, 0.6, 0.7, x, y, part)))))
        worst = max(worst, float(np.max(np.abs(C.omega2(f, c, 1.3, 0.4, x, y, part)))))
        val, _ = C.omega3(f, g, c, 0.6, 0.7, 0.9, x, y, part)
        worst = max(worst, float(np.max(np.abs(val))))
    assert acceptance(8, worst <= 1e-12, f"max |Ω| with constant last factor {worst:.1e}")


# ---------------------------------------------------------------- AC9


@pytest.mark.parametrize(
    "argv",
    [
        ["synth", "--alpha", "2.0", "--seed", "1", "--out", "{tmp}/f.pfld"],
        ["remainder", "--formula", "omega1", "--alpha", "1.0", "--seeds", "1"],
        ["remainder", "--formula", "omega2", "--alpha", "0.5", "--beta", "0.5", "--seeds", "1"],
        ["remainder", "--formula", "omega3", "--alpha", "0.3", "--beta", "0.7", "--gamma", "0.6", "--seeds", "1"],
        ["remainder", "--formula", "omega3", "--alpha", "0.6", "--beta", "0.2", "--gamma", "0.8", "--seeds", "1"],
        ["remainder", "--formula", "omega_word", "--alphas", "0.9", "0.8", "0.2", "--seeds", "1"],
        ["check", "--identity", "wdofd", "--alphas", "0.5", "0.5"],
    ],
)
def test_ac9_guards_exit_2(argv, tmp_path, acceptance, capsys):
    argv = [a.replace("{tmp}", str(tmp_path)) for a in argv]
    code = main(argv)
    err = capsys.readouterr().err
    ok = code == 2 and "INTEGER_REGULARITY" in err
    shown = " ".join(a for a in argv if str(tmp_path) not in a)
    assert acceptance(9, ok, f"{shown}: exit {code}")


def test_ac9_word_construction(acceptance):
    with pytest.raises(IntegerRegularity):
        C.Word(("1", "2", "3"), (0.4, 0.6, 0.3))
    with pytest.raises(IntegerRegularity):
        C.Word(("1",), (2.0,))
    acceptance(9, True, "Word rejects integer partial sums")


# ---------------------------------------------------------------- AC10


def _run(argv):
    code = main(argv)
    assert code in (0, 3)


def test_ac10_determinism(tmp_path, acceptance):
    outs = []
    for rep, jobs in ((0, "1"), (1, "1"), (2, "2")):
        d = tmp_path / str(rep)
        d.mkdir()
        cfg = d / "cfg.json"
        cfg.write_text(json.dumps({"formula": "omega2", "alpha": 0.6, "beta": 0.7, "seeds": 2}))
        _run(["remainder", "--config", str(cfg), "--jobs", jobs, "--csv", str(d / "s.csv"), "--json", str(d / "r.json")])
        _run(["check", "--decay", "r_seq", "--seeds", "2", "--json", str(d / "decay.json")])
        _run(["synth", "--alpha", "0.6", "--seed", "42", "--out", str(d / "f.pfld")])
        _run(["blocks", "--in", str(d / "f.pfld"), "--out", str(d / "blocks.csv")])
        outs.append({p.name: p.read_bytes() for p in d.iterdir() if p.name != "cfg.json"})
    ok = outs[0] == outs[1] == outs[2]
    assert acceptance(10, ok, f"{len(outs[0])} artefacts byte-identical across 3 runs")
