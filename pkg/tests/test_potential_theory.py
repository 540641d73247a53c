"""Potential kernel, Green functions, harmonic u_A, hitting identities."""
import math

import numpy as np
import pytest

from stablewalk import stable_params_of
from stablewalk.errors import DegenerateDenominator
from stablewalk.killed_walk import run_kernel
from stablewalk.potential_theory import (
    FiniteSetPotential,
    PotentialTable,
    c_plus,
    green_origin,
    hit_before,
    potential_a,
)
from stablewalk.special import gamma_fn
from stablewalk.stable_numerics import constants


@pytest.fixture(scope="module")
def pot15(sym15):
    return PotentialTable.build(sym15, 64)


def test_a_zero(sym15):
    assert potential_a(sym15, 0) == 0.0


def test_a_positive_two_sided(pot15):
    for x in range(-50, 51):
        if x != 0:
            assert pot15.a(x) > 0.0


def test_a_against_abel_oracle(sym15, pot15):
    """a(3) matches the Abel-summed DP series at r = 1 - 1e-4 within 1e-3."""
    W = 3000
    tab = run_kernel(sym15, None, [0], 4000, window=W, keep=list(range(4001)))
    r = 1.0 - 1e-4
    for x, tol in ((3, 1e-3), (1, 1e-3), (-5, 4e-3)):
        tot, rn = 0.0, 1.0
        for n in range(4001):
            sl = tab.values[n][0]
            tot += rn * (sl[W] - sl[W - x])
            rn *= r
        assert abs(pot15.a(x) - tot) < tol


def test_subadditivity(pot15):
    pot15.fill(range(-110, 111))
    rng = np.random.default_rng(5)
    for _ in range(200):
        x, y = rng.integers(-50, 51, 2)
        assert pot15.a(int(x + y)) <= pot15.a(int(x)) + pot15.a(int(y)) + 1e-11


def test_lemma31_growth_trend(sym15):
    """c a(x)/|x|^{alpha-1} trends to the kappa_a constant on both sides."""
    p = stable_params_of(sym15)
    ct = constants(p)
    pot = PotentialTable(sym15)
    pot.fill([2 ** k for k in range(4, 14)] + [-(2 ** k) for k in range(4, 14)])
    for sign, target in ((1, ct.kappa_a_plus), (-1, ct.kappa_a_minus)):
        devs = [
            abs(p.c_circ * pot.a(sign * 2 ** k) / 2 ** (k * (p.alpha - 1)) - target)
            for k in (6, 9, 13)
        ]
        assert devs[0] > devs[-1]
        assert devs[-1] < 0.01 * abs(target)


def test_lemma31_increments_trend(sym15):
    """c (a(x+1) - a(x)) |x|^{2-alpha} trends to (alpha-1) kappa_a^+ for x > 0."""
    p = stable_params_of(sym15)
    ct = constants(p)
    pot = PotentialTable(sym15)
    xs = [2 ** k for k in (6, 9, 12)]
    pot.fill(xs + [x + 1 for x in xs])
    target = (p.alpha - 1.0) * ct.kappa_a_plus
    devs = [
        abs(p.c_circ * (pot.a(x + 1) - pot.a(x)) * x ** (2 - p.alpha) - target) for x in xs
    ]
    assert devs[0] > devs[-1]
    assert devs[-1] < 0.05 * abs(target)


def test_spectrally_positive_dichotomy(sp15):
    """gamma = 2-alpha: c a(-y)/|y|^{alpha-1} -> 1/Gamma(alpha), a(x) = o(x^{alpha-1})."""
    p = stable_params_of(sp15)
    pot = PotentialTable(sp15)
    pot.fill([2 ** k for k in (6, 9, 12)] + [-(2 ** k) for k in (6, 9, 12)])
    target = 1.0 / gamma_fn(p.alpha)
    devs = [abs(p.c_circ * pot.a(-(2 ** k)) / 2 ** (k * 0.5) - target) for k in (6, 9, 12)]
    assert devs[0] > devs[-1] and devs[-1] < 0.01 * target
    ratios = [p.c_circ * pot.a(2 ** k) / 2 ** (k * 0.5) for k in (6, 9, 12)]
    assert ratios[0] > ratios[-1]
    assert ratios[-1] < 0.02 * target


def test_left_continuous_vanishing_positive_side(lc15):
    pot = PotentialTable(lc15)
    for x in (1, 2, 5, 17, 64):
        assert abs(pot.a(x)) < 1e-9
    assert pot.a(-3) > 0


def test_green_origin_identities(pot15):
    assert green_origin(pot15, 5, 5) == pytest.approx(pot15.a(5) + pot15.a(-5), rel=1e-12)
    for x in range(-20, 21):
        for y in range(-20, 21):
            assert green_origin(pot15, x, y) > -1e-12


def test_green_origin_vs_dp_partial_sums(sym15, pot15):
    """DP partial sums increase to the closed form from below.

    The truncation gap decays like N^{-(1 - 1/alpha)}; it is checked against
    the hitting-time-asymptote tail bound
        sum_{n > N} p^n_0(x, y) <~ a_dag(x) a(-y) kappa c^{1/a} N^{1/a-1}/(1-1/a).
    """
    from stablewalk.killed_walk import _fft_stepper
    from stablewalk.stable_numerics import constants as _constants

    W = 1024
    step, _, _ = _fft_stepper(sym15, W)
    states = np.zeros((1, 2 * W + 1))
    states[0, 3 + W] = 1.0
    green = states[0].copy()
    partial = []
    N_checks = (1000, 3000)
    for n in range(1, max(N_checks) + 1):
        full = step(states)
        states = full[:, W : 3 * W + 1].copy()
        states[0, 0 + W] = 0.0
        green += states[0]
        if n in N_checks:
            partial.append({y: green[y + W] for y in (-5, 2, 7)})
    p = stable_params_of(sym15)
    ct = _constants(p)
    inv_a = 1.0 / p.alpha
    for y in (-5, 2, 7):
        closed = green_origin(pot15, 3, y)
        seq = [pp[y] for pp in partial]
        assert seq[0] < seq[1] <= closed + 1e-9
        for N, val in zip(N_checks, seq):
            bound = (
                pot15.a_dagger(3)
                * pot15.a(-y)
                * ct.kappa_hit
                * p.c_circ ** inv_a
                * N ** (inv_a - 1.0)
                / (1.0 - inv_a)
            )
            assert closed - val < 1.6 * bound


def test_finite_set_singleton_reduces_to_origin(sym15, pot15):
    fsp = FiniteSetPotential(pot15, [0])
    for x in range(-12, 13):
        assert fsp.u(x) == pytest.approx(pot15.a_dagger(x), abs=1e-11)
        for y in range(-6, 7):
            assert fsp.green(x, y) == pytest.approx(green_origin(pot15, x, y), abs=1e-10)
    assert fsp.hit_dist(5)[0] == pytest.approx(1.0, abs=1e-12)


def test_finite_set_green_zero_on_set(pot15):
    fsp = FiniteSetPotential(pot15, [-1, 2])
    for x in (-7, 3, 9):
        for w in (-1, 2):
            assert fsp.green(x, w) == pytest.approx(0.0, abs=1e-10)
    assert fsp.green(-1, -1) == pytest.approx(1.0, abs=1e-10)


def test_finite_set_vs_dp(sym15, pot15):
    """g_A against extrapolated DP partial sums; hit rows sum to one."""
    A = (-1, 2)
    fsp = FiniteSetPotential(pot15, A)
    W = 1024
    from stablewalk.killed_walk import _fft_stepper

    step, _, _ = _fft_stepper(sym15, W)
    states = np.zeros((1, 2 * W + 1))
    states[0, 4 + W] = 1.0
    green = states[0].copy()
    checks = {}
    for n in range(1, 4001):
        full = step(states)
        states = full[:, W : 3 * W + 1].copy()
        for z in A:
            states[0, z + W] = 0.0
        green += states[0]
        if n in (1000, 2000, 4000):
            checks[n] = green.copy()
    for y in (-4, 0, 6):
        seq = [checks[n][y + W] for n in (1000, 2000, 4000)]
        closed = fsp.green(4, y)
        assert seq[0] < seq[1] < seq[2] <= closed + 1e-9
        # Aitken-extrapolated limit of the N^{1/a-1} tail
        d1, d2 = seq[1] - seq[0], seq[2] - seq[1]
        accel = seq[2] - d2 * d2 / (d2 - d1)
        assert accel == pytest.approx(closed, rel=5e-3)
    h = fsp.hit_dist(4)
    assert sum(h.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(v >= -1e-12 for v in h.values())


def test_u_A_anchor_independence(pot15):
    fsp = FiniteSetPotential(pot15, [-1, 2])
    for x in (-9, 0, 5, 14):
        vals = [fsp.u_via_anchor(x, w0) for w0 in (-1, 2)]
        assert abs(vals[0] - vals[1]) < 1e-9
        assert fsp.u(x) == pytest.approx(vals[0], abs=1e-9)
        assert fsp.u(x) > 0


def test_u_A_harmonicity(sym15, pot15):
    """sum_z p(z - x) u_A(z) = u_A(x) off A, within window truncation."""
    A = (-1, 2)
    fsp = FiniteSetPotential(pot15, A)
    Z = 4000
    zs = np.arange(-Z, Z + 1)
    pot15.fill(np.concatenate([zs - (-1), zs - 2]))
    u_vals = np.array([fsp.u(int(z)) for z in zs])
    for x in (-6, 0, 4, 9):
        pz = sym15.pmf(zs - x)
        mask = ~np.isin(zs, A)
        lhs = float((pz[mask] * u_vals[mask]).sum())
        # truncation: |z| > Z contributes ~ tail * u growth
        tol = 30.0 * sym15.spec.B * Z ** (sym15.spec.alpha - 1) * Z ** -sym15.spec.alpha
        assert abs(lhs - fsp.u(x)) < tol


def test_u_A_tracks_a_at_infinity(sym15, pot15):
    fsp = FiniteSetPotential(pot15, [-1, 2])
    pot15.fill([-4096, 4096])
    for x in (-4096, 4096):
        assert fsp.u(x) / pot15.a(x) == pytest.approx(1.0, abs=0.02)


def test_c_plus_families(sym15, bp15, lc15):
    assert c_plus(sym15) == math.inf
    assert c_plus(lc15) == 0.0
    val = c_plus(bp15)
    assert 0.0 < val < math.inf
    # stability across depths (1%)
    val2 = c_plus(bp15, k_hi=11)
    assert val == pytest.approx(val2, rel=0.01)


def test_hit_before_basics(sym15, pot15):
    assert hit_before(pot15, 7, 7) == pytest.approx(1.0, abs=1e-12)
    expect = 1.0 / (pot15.a(4) + pot15.a(-4))
    assert hit_before(pot15, 0, 4) == pytest.approx(expect, rel=1e-12)
    with pytest.raises(ValueError):
        hit_before(pot15, 3, 0)


def test_hit_before_degenerate_guard(sym15):
    pot = PotentialTable(sym15)
    pot.values[9] = 0.0
    pot.values[-9] = 0.0
    with pytest.raises(DegenerateDenominator):
        hit_before(pot, 3, 9)


def test_hit_before_vs_dp(sym15, pot15):
    """Two-point escape formula against an absorbing DP.

    The undecided mass of the y-vs-0 race decays like N^{1/alpha - 1}, so a
    finite DP only brackets the answer: hit_y <= closed <= hit_y + undecided
    (undecided counts in-window survivors and escaped mass).  On top of the
    rigorous bracket, an Aitken extrapolation over doubling checkpoints must
    land within a few parts per thousand.
    """
    y = 3
    W = 2048
    from stablewalk.killed_walk import _fft_stepper

    step, _, _ = _fft_stepper(sym15, W)
    for x in (2, -3):
        states = np.zeros((1, 2 * W + 1))
        states[0, x + W] = 1.0
        hit_y = 0.0
        hit_0 = 0.0
        seq = []
        closed = hit_before(pot15, x, y)
        for n in range(1, 16_001):
            full = step(states)
            states = full[:, W : 3 * W + 1].copy()
            hit_y += states[0, y + W]
            hit_0 += states[0, 0 + W]
            states[0, y + W] = 0.0
            states[0, 0 + W] = 0.0
            if n in (4000, 8000, 16000):
                seq.append(hit_y)
                undecided = 1.0 - hit_y - hit_0
                assert hit_y - 1e-12 <= closed <= hit_y + undecided + 1e-12
        d1, d2 = seq[1] - seq[0], seq[2] - seq[1]
        accel = seq[2] - d2 * d2 / (d2 - d1)
        assert closed == pytest.approx(accel, abs=5e-3)
