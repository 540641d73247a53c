"""Verification harness: rhs identities, regime dispatch, quick trends."""
import math

import numpy as np
import pytest

from stablewalk.asymptotics import (
    LawContext,
    TrendCriterion,
    VerificationReport,
    f0_asymptote,
    rhs_finite_set,
    rhs_theorem1,
    rhs_theorem2_3,
    rhs_theorem4_5,
    rhs_theorem6,
    rhs_theorem6_hitting_form,
    tunneling_check,
    verify_comp,
    verify_cor2,
    verify_finite_set,
    verify_llt,
    verify_thm1,
    verify_thm2_bulk,
    verify_thm4_y_small,
)
from stablewalk.errors import InfiniteCPlus, RegimeViolation
from stablewalk.potential_theory import FiniteSetPotential, c_plus
from stablewalk.special import gamma_fn


def test_rhs_theorem1_power_law(sym15):
    ctx = LawContext.build(sym15)
    r1 = rhs_theorem1(100, ctx.params, ctx.consts)
    r2 = rhs_theorem1(200, ctx.params, ctx.consts)
    assert r2 / r1 == pytest.approx(2.0 ** (1 / 1.5 - 2.0), rel=1e-12)


def test_rhs_extremal_kappa(sp15):
    ctx = LawContext.build(sp15)
    alpha = ctx.params.alpha
    kappa = (alpha - 1.0) / gamma_fn(1.0 / alpha)
    expect = kappa * ctx.params.c_circ ** (1 / alpha) * 64.0 ** (1 / alpha - 2.0)
    assert rhs_theorem1(64, ctx.params, ctx.consts) == pytest.approx(expect, rel=1e-12)


def test_theorem_pair_consistency_extremal(sp15):
    """(eq_0): bulk rhs agrees with the two-term identity at gamma = 2 - alpha.

    c f^{x_n}(c)/n equals x_n p_c(-x_n)/n through the creeping identity, so
    the two theorem forms must match to near machine precision.
    """
    ctx = LawContext.build(sp15)
    from stablewalk.stable_numerics import density_grid_smart

    inv_a = 1.0 / ctx.params.alpha
    for n in (64, 256):
        x = int(1.3 * n ** inv_a)
        xn = x / n ** inv_a
        bulk = rhs_theorem2_3(ctx, x, n, "bulk")
        dens, _ = density_grid_smart(ctx.params.c_circ, np.array([-xn]), ctx.params)
        two_term = xn * float(dens[0]) / n
        assert abs(bulk - two_term) < 1e-10


def test_rhs_regime_dispatch_total(sym15):
    ctx = LawContext.build(sym15)
    with pytest.raises(RegimeViolation):
        rhs_theorem2_3(ctx, 4, 64, "nonsense")
    with pytest.raises(RegimeViolation):
        rhs_theorem4_5(ctx, 4, 3, 64, "sideways")


def test_rhs_finite_set_singleton_reduction(sym15):
    """A = {0} reproduces the single-point rhs to 1e-10."""
    ctx = LawContext.build(sym15)
    fsp = FiniteSetPotential(ctx.pot, [0])
    for n in (64, 256):
        for x in (3, -7, 12):
            a = rhs_finite_set(ctx, fsp, x, n, "x_small")
            b = rhs_theorem2_3(ctx, x, n, "x_small")
            assert abs(a - b) < 1e-10


def test_rhs_theorem6_forms_agree(bp15):
    """Regime (ii) product form equals the C+ c f^{x-y}(c n) form."""
    ctx = LawContext.build(bp15)
    cp = c_plus(bp15, ctx.pot)
    for n in (64, 256):
        x = max(1, int(0.5 * n ** (2 / 3)))
        a = rhs_theorem6(ctx, x, -x, n, "ii", cp)
        b = rhs_theorem6_hitting_form(ctx, x, -x, n, cp)
        assert a == pytest.approx(b, rel=1e-9)


def test_rhs_theorem6_infinite_cplus(sym15):
    ctx = LawContext.build(sym15)
    with pytest.raises(InfiniteCPlus):
        rhs_theorem6(ctx, 5, -5, 64, "ii", math.inf)


def test_trend_criterion_monotone_floor():
    crit = TrendCriterion(final_cap=0.15, mono_floor=0.02)
    mono, ok = crit.check([0.30, 0.10, 0.05])
    assert mono and ok
    mono, ok = crit.check([0.001, 0.015, 0.01])  # noise-level reordering
    assert mono and ok
    mono, ok = crit.check([0.30, 0.40, 0.05])
    assert not mono


def test_report_serialisation(sym15):
    rep = verify_thm1(sym15, n_values=(64, 256))
    csv = rep.to_csv()
    assert csv.splitlines()[0].startswith("schema_version")
    summ = rep.summary()
    assert set(summ) >= {"theorem_id", "passed", "final_dev", "deviations"}


def test_quick_trends_two_sided(sym15):
    assert verify_thm1(sym15, n_values=(64, 256, 1024)).passed
    assert verify_thm2_bulk(sym15, n_values=(64, 256, 1024)).passed
    assert verify_thm4_y_small(sym15, n_values=(64, 256, 1024)).passed
    assert verify_llt(sym15, n_values=(64, 256, 1024)).passed


def test_quick_trends_spectral(sp15):
    assert verify_comp(sp15, n_values=(64, 256, 1024)).passed
    assert verify_cor2(sp15, n_values=(64, 256, 1024)).passed
    assert verify_finite_set(sp15, n_values=(64, 256, 1024)).passed


def test_tunneling_families(bp15, sym15):
    """Bounded potential: decreasing in R; two-sided: increasing with x = -y."""
    rep = tunneling_check(bp15, (4, 16, 64), 128, 8, -8)
    probs = rep.notes["probs"]
    assert probs[0] > probs[1] > probs[2]
    vals = []
    for x in (8, 16, 64):
        rep = tunneling_check(sym15, (10,), 128, x, -x)
        vals.append(rep.notes["probs"][0])
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 0.8


def test_tunneling_validates_orientation(bp15):
    with pytest.raises(RegimeViolation):
        tunneling_check(bp15, (4,), 64, -8, 8)


def test_report_exact_column_reproducible(sym15):
    """With the artifact cache active the exact column reproduces bit-identically."""
    r1 = verify_thm1(sym15, n_values=(64, 256))
    r2 = verify_thm1(sym15, n_values=(64, 256))
    assert [row["exact"] for row in r1.rows] == [row["exact"] for row in r2.rows]
    assert r1.to_csv() == r2.to_csv()
