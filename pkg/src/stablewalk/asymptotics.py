"""Right-hand sides of the limit theorems and exact-vs-asymptotic reports.

Every verify_* driver produces a VerificationReport: rows of
(n, x, y, exact, rhs, ratio) plus a trend verdict.  Exact columns come from
the killed-walk DP only; rhs columns come from the stable numerics and the
potential kernel only, so the two sides are computationally independent.

The paper's statements are asymptotic with no rates, so the pass criterion
is a trend: |ratio - 1| must be non-increasing across the grid (deviations
already below a small floor may reorder freely - they are numerically
converged) and the final deviation must beat a per-theorem cap.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import cache
from .errors import (
    ConditioningMassZero,
    InfiniteCPlus,
    RegimeViolation,
)
from .killed_walk import (
    FirstPassageLaw,
    default_window,
    first_passage,
    halfline_entrance,
    k_estimate,
    ladder_renewals,
    run_kernel,
)
from .potential_theory import FiniteSetPotential, PotentialTable, c_plus, has_bounded_potential
from .special import gamma_fn
from .stable_numerics import (
    ConstantsTable,
    constants,
    density_at_zero,
    density_grid_smart,
    hitting_density,
)
from .walk_model import StableParams, WalkLaw, stable_params_of


# ---------------------------------------------------------------------------
# trend criterion and report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendCriterion:
    """Pass/fail rule for asymptotic ratio trends.

    final_cap bounds the last |ratio - 1|; deviations below mono_floor are
    treated as converged noise and exempt from the ordering requirement.
    """

    final_cap: float = 0.15
    mono_floor: float = 0.02

    def check(self, deviations) -> tuple[bool, bool]:
        devs = [float(d) for d in deviations]
        mono = all(
            devs[i + 1] <= max(devs[i], self.mono_floor) for i in range(len(devs) - 1)
        )
        final_ok = devs[-1] < self.final_cap
        return mono, final_ok


@dataclass
class VerificationReport:
    theorem_id: str
    rows: list = field(default_factory=list)
    deviations: list = field(default_factory=list)
    monotone: bool = False
    final_dev: float = math.nan
    passed: bool = False
    notes: dict = field(default_factory=dict)

    def finalize(self, crit: TrendCriterion) -> "VerificationReport":
        self.monotone, final_ok = crit.check(self.deviations)
        self.final_dev = float(self.deviations[-1])
        self.passed = self.monotone and final_ok
        return self

    def to_csv(self) -> str:
        cols = ["n", "x", "y", "exact", "rhs", "ratio", "regime"]
        lines = ["schema_version," + ",".join(cols)]
        for row in self.rows:
            vals = []
            for c in cols:
                v = row.get(c, "")
                vals.append(f"{v:.17g}" if isinstance(v, float) else str(v))
            lines.append("1," + ",".join(vals))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "passed": bool(self.passed),
            "monotone": bool(self.monotone),
            "final_dev": self.final_dev,
            "deviations": [float(d) for d in self.deviations],
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


@dataclass
class LawContext:
    """Bundles the per-law derived objects the evaluators need."""

    law: WalkLaw
    params: StableParams
    consts: ConstantsTable
    pot: PotentialTable

    @classmethod
    def build(cls, law: WalkLaw) -> "LawContext":
        params = stable_params_of(law)
        return cls(law=law, params=params, consts=constants(params), pot=PotentialTable(law))

    @property
    def spectrally_positive(self) -> bool:
        return abs(self.params.gamma - (2.0 - self.params.alpha)) < 1e-12


# ---------------------------------------------------------------------------
# rhs evaluators
# ---------------------------------------------------------------------------


def f0_asymptote(n: int, params: StableParams, consts: ConstantsTable) -> float:
    """Hitting-time asymptote kappa c^{1/alpha} / n^{2 - 1/alpha}."""
    return consts.kappa_hit * params.c_circ ** (1.0 / params.alpha) * float(n) ** (
        1.0 / params.alpha - 2.0
    )


def rhs_theorem1(n: int, params: StableParams, consts: ConstantsTable) -> float:
    return f0_asymptote(n, params, consts)


def _p_ccirc(ctx: LawContext, xi: float) -> float:
    vals, _ = density_grid_smart(ctx.params.c_circ, np.array([xi]), ctx.params)
    return float(vals[0])


def rhs_theorem2_3(ctx: LawContext, x: int, n: int, regime: str) -> float:
    """Hitting-time rhs: 'x_small' or 'bulk' regime of the first-passage law."""
    params, consts = ctx.params, ctx.consts
    xn = x / n ** (1.0 / params.alpha)
    if regime == "x_small":
        val = ctx.pot.a_dagger(x) * f0_asymptote(n, params, consts)
        if abs(abs(params.gamma) - (2.0 - params.alpha)) < 1e-12 and params.gamma * x > 0:
            val += abs(xn) * _p_ccirc(ctx, -xn) / n
        return val
    if regime == "bulk":
        if xn == 0:
            raise RegimeViolation("bulk regime needs x of order n^{1/alpha}")
        return params.c_circ * hitting_density(params.c_circ, xn, params) / n
    raise RegimeViolation(f"unknown regime {regime!r}")


def rhs_theorem4_5(
    ctx: LawContext,
    x: int,
    y: int,
    n: int,
    regime: str,
    f_x: float | None = None,
    f_minus_y: float | None = None,
    K_val: float | None = None,
) -> float:
    """Killed-kernel rhs per Theorem 4 (|gamma| < 2-alpha) / Theorem 5 (= 2-alpha).

    f_x / f_minus_y are exact first-passage values when supplied; otherwise
    the theorem-1 asymptote with the potential prefactor is substituted.
    """
    params, consts = ctx.params, ctx.consts
    inv_a = 1.0 / params.alpha
    xn, yn = x / n ** inv_a, y / n ** inv_a
    if regime == "y_small":
        fx = f_x if f_x is not None else rhs_theorem2_3(ctx, x, n, "x_small")
        return fx * ctx.pot.a(-y)
    if regime == "x_small":
        fy = f_minus_y if f_minus_y is not None else rhs_theorem2_3(ctx, -y, n, "x_small")
        val = ctx.pot.a_dagger(x) * fy
        if ctx.spectrally_positive and xn > 0:
            if K_val is None:
                raise RegimeViolation("gamma = 2 - alpha x_small regime needs a K value")
            val += max(xn, 0.0) * K_val / n ** inv_a
        return val
    if regime == "bulk":
        # the stable killed density has no closed form; the bulk regime is
        # checked by scaled-DP self-consistency in verify_bulk_scaling
        raise RegimeViolation("bulk regime is handled by verify_bulk_scaling")
    raise RegimeViolation(f"unknown regime {regime!r}")


def rhs_theorem6(
    ctx: LawContext, x: int, y: int, n: int, regime: str, c_plus_val: float
) -> float:
    """Tunneling rhs for laws with bounded one-sided potential, x > 0 > y."""
    if not (x > 0 > y):
        raise RegimeViolation("Theorem 6 needs x > 0 > y")
    if not math.isfinite(c_plus_val):
        raise InfiniteCPlus("law has C+ = inf")
    params, consts = ctx.params, ctx.consts
    inv_a = 1.0 / params.alpha
    xn, yn = x / n ** inv_a, y / n ** inv_a
    if regime == "i":
        ad = ctx.pot.a_dagger(x)
        am = ctx.pot.a(-y)
        return ad * am * f0_asymptote(n, params, consts) + (
            ad * abs(yn) * _p_ccirc(ctx, yn) + am * xn * _p_ccirc(ctx, -xn)
        ) / n
    if regime == "ii":
        return c_plus_val * (xn - yn) * _p_ccirc(ctx, yn - xn) / n
    raise RegimeViolation(f"unknown regime {regime!r}")


def rhs_theorem6_hitting_form(ctx: LawContext, x: int, y: int, n: int, c_plus_val: float) -> float:
    """Equivalent regime-(ii) form C+ c f^{x-y}(c n) through the hitting density."""
    params = ctx.params
    return c_plus_val * params.c_circ * hitting_density(
        params.c_circ * n, float(x - y), params
    )


def rhs_finite_set(
    ctx: LawContext,
    fsp: FiniteSetPotential,
    x: int,
    n: int,
    regime: str = "x_small",
) -> float:
    """f_A rhs: Theorem 2/3 forms with u_A replacing a_dagger."""
    params, consts = ctx.params, ctx.consts
    xn = x / n ** (1.0 / params.alpha)
    if regime == "x_small":
        val = fsp.u(x) * f0_asymptote(n, params, consts)
        if abs(abs(params.gamma) - (2.0 - params.alpha)) < 1e-12 and params.gamma * x > 0:
            val += abs(xn) * _p_ccirc(ctx, -xn) / n
        return val
    if regime == "bulk":
        return params.c_circ * hitting_density(params.c_circ, xn, params) / n
    raise RegimeViolation(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# cached DP helpers
# ---------------------------------------------------------------------------


def _fp_cached(law: WalkLaw, B, x: int, n: int, mult: float = 8.0) -> FirstPassageLaw:
    key = cache.content_key(law.law_hash(), "first_passage", B=str(B), x=x, n=n, mult=mult)
    hit = cache.load(key)
    if hit is not None:
        return FirstPassageLaw(
            x=x,
            killing=B,
            f=hit["f"],
            cumulative=np.cumsum(hit["f"]),
            truncation_tail=float(hit["tail"][0]),
            escaped=float(hit["tail"][1]),
        )
    W = default_window(law, n, mult)
    fp = first_passage(law, B, x, n, window=W)
    cache.store(key, f=fp.f, tail=np.array([fp.truncation_tail, fp.escaped]))
    return fp


def _kernel_slice_cached(law: WalkLaw, B, x: int, n: int, mult: float = 8.0):
    """(slice over [-W, W] at step n, W, per-step f array)."""
    key = cache.content_key(law.law_hash(), "kernel_slice", B=str(B), x=x, n=n, mult=mult)
    hit = cache.load(key)
    if hit is not None:
        sl = hit["slice"]
        return sl, (len(sl) - 1) // 2, hit["f"]
    W = default_window(law, n, mult)
    table = run_kernel(law, B, [x], n, window=W, keep=[n])
    sl = table.values[n][0]
    f = table.step_killed[0]
    cache.store(key, slice=sl, f=f)
    return sl, W, f


# ---------------------------------------------------------------------------
# verification drivers
# ---------------------------------------------------------------------------


def verify_thm1(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    crit: TrendCriterion = TrendCriterion(final_cap=0.15),
) -> VerificationReport:
    """n^{2-1/alpha} f^0(n) against kappa c^{1/alpha}."""
    ctx = LawContext.build(law)
    n_max = max(n_values)
    fp = _fp_cached(law, ("set", (0,)), 0, n_max)
    rep = VerificationReport(theorem_id="thm1")
    for n in n_values:
        rhs = rhs_theorem1(n, ctx.params, ctx.consts)
        exact = float(fp.f[n])
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": 0, "exact": exact, "rhs": rhs, "ratio": ratio})
        rep.deviations.append(abs(ratio - 1.0))
    rep.notes["escaped"] = fp.escaped
    return rep.finalize(crit)


def verify_thm2_bulk(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    xi: float = 1.0,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """f^x(n) ~ c f^{x_n}(c)/n uniformly for x_n of order one."""
    ctx = LawContext.build(law)
    rep = VerificationReport(theorem_id="thm2_bulk")
    for n in n_values:
        x = max(1, int(math.floor(xi * n ** (1.0 / ctx.params.alpha))))
        fp = _fp_cached(law, ("set", (0,)), x, n)
        rhs = rhs_theorem2_3(ctx, x, n, "bulk")
        ratio = float(fp.f[n]) / rhs
        rep.rows.append({"n": n, "x": x, "exact": float(fp.f[n]), "rhs": rhs, "ratio": ratio, "regime": "bulk"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_thm2_small(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    x_fixed: int = 4,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """f^x(n) ~ a_dagger(x) f^0(n) (+ spectral term when gamma x > 0)."""
    ctx = LawContext.build(law)
    rep = VerificationReport(theorem_id="thm2_small")
    n_max = max(n_values)
    fp = _fp_cached(law, ("set", (0,)), x_fixed, n_max)
    for n in n_values:
        rhs = rhs_theorem2_3(ctx, x_fixed, n, "x_small")
        ratio = float(fp.f[n]) / rhs
        rep.rows.append({"n": n, "x": x_fixed, "exact": float(fp.f[n]), "rhs": rhs, "ratio": ratio, "regime": "x_small"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_crossover(
    law: WalkLaw,
    x_values=(1, 2),
    n_grid=(16, 32, 64, 128, 256, 512, 1024, 2048, 4096),
    factor_cap: float = 4.0,
    two_term_cap: float = 0.35,
) -> VerificationReport:
    """Locate the Theorem-3 dominance switch empirically (gamma = 2 - alpha).

    For fixed x the potential term a_dag(x) f^0-asymptote overtakes the
    density term x_n p_c(-x_n)/n as n grows.  The exact f^x(n) is compared
    against both terms; the switch point n-hat is where the two relative
    errors cross, and a_dag(x)/x must be within factor_cap of
    n-hat^{1 - 2/alpha}.  The two-term sum must also track the exact values
    through the transition (Theorem 3's combined form).
    """
    ctx = LawContext.build(law)
    if not ctx.spectrally_positive:
        raise RegimeViolation("crossover scan needs gamma = 2 - alpha")
    params, consts = ctx.params, ctx.consts
    inv_a = 1.0 / params.alpha
    rep = VerificationReport(theorem_id="crossover")
    factors = []
    track_worst = 0.0
    n_max = max(n_grid)
    for x in x_values:
        fp = _fp_cached(law, ("set", (0,)), int(x), n_max)
        gaps = []
        two_term = {}
        for n in n_grid:
            xn = x * float(n) ** -inv_a
            t1 = ctx.pot.a_dagger(x) * f0_asymptote(n, params, consts)
            t2 = xn * _p_ccirc(ctx, -xn) / n
            exact = float(fp.f[n])
            d1 = abs(exact / t1 - 1.0)
            d2 = abs(exact / t2 - 1.0)
            gaps.append((n, d1 - d2))
            two_term[n] = abs(exact / (t1 + t2) - 1.0)
            rep.rows.append(
                {"n": n, "x": x, "exact": exact, "rhs": t1 + t2, "ratio": exact / (t1 + t2), "regime": "crossover"}
            )
        # d1 - d2 starts positive (density term rules) and turns negative;
        # interpolate the sign change in log n
        n_hat = None
        for (na, ga), (nb, gb) in zip(gaps[:-1], gaps[1:]):
            if ga > 0 >= gb:
                w = ga / (ga - gb)
                n_hat = math.exp((1 - w) * math.log(na) + w * math.log(nb))
                break
        if n_hat is None:
            raise RegimeViolation(f"no dominance switch inside the n grid for x={x}")
        # the combined two-term form must track the exact values through the
        # transition window around the switch (earlier n are pre-asymptotic)
        for n, dev in two_term.items():
            if n_hat / 8.0 <= n <= 8.0 * n_hat:
                track_worst = max(track_worst, dev)
        # predicted location constant: a(x)/x = p_c(0) n^{1-2/a} / (kappa c^{1/a});
        # the factor cap is applied to this units-free normalisation
        c_pred = density_at_zero(params.c_circ, params) / (
            consts.kappa_hit * params.c_circ ** inv_a
        )
        r = (ctx.pot.a_dagger(x) / x) / n_hat ** (1.0 - 2.0 * inv_a) / c_pred
        factors.append(r)
        rep.notes.setdefault("n_hat", []).append(n_hat)
    rep.monotone = True
    rep.deviations = [track_worst]
    rep.final_dev = track_worst
    rep.passed = (
        all(1.0 / factor_cap <= r <= factor_cap for r in factors)
        and track_worst < two_term_cap
    )
    rep.notes["factors"] = factors
    rep.notes["two_term_worst"] = track_worst
    return rep


def verify_thm4_y_small(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    y_fixed: int = 3,
    xi: float = 0.5,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """p^n_0(x, y) ~ f^x(n) a(-y) with y fixed and x in the bulk."""
    ctx = LawContext.build(law)
    rep = VerificationReport(theorem_id="thm4_y_small")
    inv_a = 1.0 / ctx.params.alpha
    for n in n_values:
        x = max(1, int(math.floor(xi * n ** inv_a)))
        sl, W, f = _kernel_slice_cached(law, ("set", (0,)), x, n)
        exact = float(sl[y_fixed + W])
        rhs = rhs_theorem4_5(ctx, x, y_fixed, n, "y_small", f_x=float(f[n]))
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": x, "y": y_fixed, "exact": exact, "rhs": rhs, "ratio": ratio, "regime": "y_small"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_thm5_x_small(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    x_fixed: int = 3,
    eta: float = 1.0,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2, mono_floor=0.03),
) -> VerificationReport:
    """gamma = 2-alpha: p^n_0(x, y) ~ a_dagger(x) f^{-y}(n) + x_n K(y_n)/n^{1/a}.

    The rhs embeds the kernel-estimated K value, whose own resolution is a
    few percent, so the monotonicity floor sits at 0.03 for this check.
    """
    ctx = LawContext.build(law)
    if not ctx.spectrally_positive:
        raise RegimeViolation("Theorem 5 x_small term needs gamma = 2 - alpha")
    rep = VerificationReport(theorem_id="thm5_x_small")
    inv_a = 1.0 / ctx.params.alpha
    for n in n_values:
        y = max(1, int(math.floor(eta * n ** inv_a)))
        yn = y * float(n) ** -inv_a
        sl, W, _ = _kernel_slice_cached(law, ("set", (0,)), x_fixed, n)
        exact = float(sl[y + W])
        fy = float(_fp_cached(law, ("set", (0,)), -y, n).f[n])
        K_val, spread = k_estimate(law, yn, n)
        rhs = rhs_theorem4_5(ctx, x_fixed, y, n, "x_small", f_minus_y=fy, K_val=K_val)
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": x_fixed, "y": y, "exact": exact, "rhs": rhs, "ratio": ratio, "regime": "x_small"})
        rep.deviations.append(abs(ratio - 1.0))
        rep.notes.setdefault("k_spread", []).append(spread)
    return rep.finalize(crit)


def verify_bulk_scaling(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    xi: float = 0.7,
    eta: float = 0.7,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
    killing=("set", (0,)),
) -> VerificationReport:
    """Scaled killed kernel n^{1/a} p^n_B(xi n^{1/a}, eta n^{1/a}) stabilises.

    The stable killed density has no closed form; successive resolutions act
    as each other's reference, which is exactly the scaling-limit claim.
    """
    ctx = LawContext.build(law)
    inv_a = 1.0 / ctx.params.alpha
    vals = []
    rep = VerificationReport(theorem_id="bulk_scaling")
    for n in n_values:
        x = max(1, int(round(xi * n ** inv_a)))
        y = max(1, int(round(eta * n ** inv_a)))
        sl, W, _ = _kernel_slice_cached(law, killing, x, n)
        scaled = float(n) ** inv_a * float(sl[y + W])
        vals.append(scaled)
        rep.rows.append({"n": n, "x": x, "y": y, "exact": scaled, "rhs": math.nan, "ratio": math.nan, "regime": "bulk"})
    for i in range(len(vals) - 1):
        rep.deviations.append(abs(vals[i] / vals[i + 1] - 1.0))
    rep.notes["scaled_values"] = vals
    return rep.finalize(crit)


def verify_thm6(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """Regime (ii): p^n_0(x, y) ~ C+ (x_n - y_n) p_c(y_n - x_n)/n at x = -y."""
    ctx = LawContext.build(law)
    if not has_bounded_potential(law):
        raise InfiniteCPlus("Theorem 6 needs the bounded-potential family")
    cp = c_plus(law, ctx.pot)
    rep = VerificationReport(theorem_id="thm6_ii")
    inv_a = 1.0 / ctx.params.alpha
    for n in n_values:
        x = max(1, int(math.floor(0.5 * n ** inv_a)))
        y = -x
        sl, W, _ = _kernel_slice_cached(law, ("set", (0,)), x, n, mult=10.0)
        exact = float(sl[y + W])
        rhs = rhs_theorem6(ctx, x, y, n, "ii", cp)
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": x, "y": y, "exact": exact, "rhs": rhs, "ratio": ratio, "regime": "ii"})
        rep.deviations.append(abs(ratio - 1.0))
    rep.notes["c_plus"] = cp
    return rep.finalize(crit)


def tunneling_check(law: WalkLaw, R_values, n: int, x: int, y: int) -> VerificationReport:
    """P[S at first entry of (-inf,0] < -R | sigma_0 > n, S_n = y], exactly.

    Decomposes along the first entry into (-inf, 0]: entrance law from x times
    the dual {0}-killed kernel from -y, normalised by p^n_0(x, y).
    """
    if not (x > 0 > y):
        raise RegimeViolation("need x > 0 > y")
    W = default_window(law, n)
    ent = halfline_entrance(law, x, n, window=W, depth=W)
    h = ent.entrance[0]  # h[k, d]: entry at step k at site -d (boundary 0)
    rev = law.reversed()
    dual = run_kernel(rev, ("set", (0,)), [-y], n, window=W)
    sl0, W0, _ = _kernel_slice_cached(law, ("set", (0,)), x, n)
    denom = float(sl0[y + W0])
    if denom <= 1e-300:
        raise ConditioningMassZero(f"p^{n}_0({x},{y}) = {denom}")
    rep = VerificationReport(theorem_id="tunneling")
    # p^{n-k}_0(z, y) = dual kernel from -y evaluated at -z = d
    dual_slices = dual.values
    probs = []
    for R in R_values:
        num = 0.0
        for k in range(1, n + 1):
            rowk = h[k]
            m = n - k
            dz = dual_slices[m][0]
            # z < -R  <->  d > R; dual kernel gives p^{n-k}_0(z, y) at index -z + W
            d_idx = np.arange(int(R) + 1, len(rowk))
            num += float((rowk[d_idx] * dz[d_idx + W]).sum())
        probs.append(num / denom)
        rep.rows.append({"n": n, "x": x, "y": y, "exact": num / denom, "rhs": float(R), "ratio": math.nan, "regime": "tunnel"})
    rep.notes["probs"] = probs
    rep.notes["entrance_lump"] = float(ent.entrance_lump[0].sum())
    rep.deviations = [0.0]
    rep.monotone = all(probs[i] >= probs[i + 1] for i in range(len(probs) - 1))
    rep.final_dev = 0.0
    rep.passed = rep.monotone
    return rep


def verify_comp(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    xi: float = 0.5,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """Comparison identity p^n_0 ~ p^n_{(-inf,0)} + a_dag(x) f^0(n) a(-y), x, y > 0."""
    ctx = LawContext.build(law)
    rep = VerificationReport(theorem_id="comp")
    inv_a = 1.0 / ctx.params.alpha
    f0 = _fp_cached(law, ("set", (0,)), 0, max(n_values))
    for n in n_values:
        x = y = max(1, int(math.floor(xi * n ** inv_a)))
        sl0, W, _ = _kernel_slice_cached(law, ("set", (0,)), x, n)
        slh, Wh, _ = _kernel_slice_cached(law, ("le", -1), x, n)
        exact = float(sl0[y + W])
        rhs = float(slh[y + Wh]) + ctx.pot.a_dagger(x) * float(f0.f[n]) * ctx.pot.a(-y)
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": x, "y": y, "exact": exact, "rhs": rhs, "ratio": ratio, "regime": "comp"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_k_small_eta(
    law: WalkLaw,
    n: int = 4096,
    etas=(1.0, 0.5, 0.25),
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """K_c(eta) c Gamma(alpha) / (p_c(0) eta^{alpha-1}) -> 1 as eta -> 0."""
    ctx = LawContext.build(law)
    if not ctx.spectrally_positive:
        raise RegimeViolation("K estimates need gamma = 2 - alpha")
    params = ctx.params
    p0 = density_at_zero(params.c_circ, params)
    rep = VerificationReport(theorem_id="k_small_eta")
    for eta in etas:
        K_val, spread = k_estimate(law, eta, n)
        scaled = K_val * params.c_circ * gamma_fn(params.alpha) / (p0 * eta ** (params.alpha - 1.0))
        rep.rows.append({"n": n, "x": 0, "y": eta, "exact": K_val, "rhs": math.nan, "ratio": scaled, "regime": "eta"})
        rep.deviations.append(abs(scaled - 1.0))
        rep.notes.setdefault("spread", []).append(spread)
    return rep.finalize(crit)


def verify_finite_set(
    law: WalkLaw,
    A=(-1, 0, 2),
    n_values=(256, 1024, 4096),
    crit: TrendCriterion = TrendCriterion(final_cap=0.1),
) -> VerificationReport:
    """sum_z in A f_A^z(n) / f^0(n) -> 1."""
    ctx = LawContext.build(law)
    A = sorted(int(z) for z in A)
    n_max = max(n_values)
    W = default_window(law, n_max)
    table = run_kernel(law, ("set", tuple(A)), A, n_max, window=W, keep=[])
    f0 = _fp_cached(law, ("set", (0,)), 0, n_max)
    rep = VerificationReport(theorem_id="finite_set_sum")
    for n in n_values:
        tot = float(table.step_killed[:, n].sum())
        ratio = tot / float(f0.f[n])
        rep.rows.append({"n": n, "x": 0, "exact": tot, "rhs": float(f0.f[n]), "ratio": ratio, "regime": "sum_fA"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_cor3(
    law: WalkLaw,
    A=(-1, 0, 2),
    n_values=(256, 1024, 4096),
    x_fixed: int = 5,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """Space-time hitting: P[sigma_A = n, S_n = y] ~ f_A^x(n) w_A(y), y in A.

    w_A(y) = u_{-A}(-y): the u-function of the reflected set -A (same law),
    which is the limiting entrance distribution; the weights sum to one.
    """
    ctx = LawContext.build(law)
    A = sorted(int(z) for z in A)
    n_max = max(n_values)
    W = default_window(law, n_max)
    keep = sorted({n - 1 for n in n_values})
    table = run_kernel(law, ("set", tuple(A)), [x_fixed], n_max, window=W, keep=keep)
    fsp_neg = FiniteSetPotential(ctx.pot, [-z for z in A])
    weights = {y: fsp_neg.u(-y) for y in A}
    wsum = sum(weights.values())
    pw = law.pmf_window(W)
    rep = VerificationReport(theorem_id="cor3")
    y_probe = max(A)
    for n in n_values:
        sl = table.values[n - 1][0]
        # P[sigma = n, S_n = y] = sum_z p^{n-1}_A(x, z) p(y - z)
        nfft = 1
        while nfft < 4 * W + 1:
            nfft *= 2
        conv = np.fft.irfft(np.fft.rfft(sl, nfft) * np.fft.rfft(pw, nfft), nfft)[: 4 * W + 1]
        exact = float(conv[y_probe + 2 * W])
        fA_n = float(table.step_killed[0, n])
        rhs = fA_n * weights[y_probe]
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": x_fixed, "y": y_probe, "exact": exact, "rhs": rhs, "ratio": ratio, "regime": "cor3"})
        rep.deviations.append(abs(ratio - 1.0))
    rep.notes["weight_sum"] = wsum
    return rep.finalize(crit)


def diagnostics_prop21(law: WalkLaw, n_values=(64, 256), refine: int = 2) -> VerificationReport:
    """sup of f^x(n) n / (|x_n|^{a-1} ^ |x_n|^{-a}), stable under x-grid refinement.

    The paper's constant is unspecified, so the assertion is boundedness:
    the supremum must not move materially when the x grid is refined/widened.
    """
    ctx = LawContext.build(law)
    inv_a = 1.0 / ctx.params.alpha
    rep = VerificationReport(theorem_id="prop21")
    sups = []
    for level in range(refine):
        step = 3 * (level + 1)  # finer grid at higher level
        sup = 0.0
        xs = sorted({max(1, int(round(2.0 ** (j / step)))) for j in range(14 * step)})
        for n in n_values:
            for x in xs:
                xn = x * float(n) ** -inv_a
                if xn > 8.0:
                    break
                fp = _fp_cached(law, ("set", (0,)), x, n, mult=10.0)
                bound = min(xn ** (ctx.params.alpha - 1.0), xn ** -ctx.params.alpha)
                sup = max(sup, float(fp.f[n]) * n / bound)
        sups.append(sup)
        rep.rows.append({"n": 0, "x": level, "exact": sup, "rhs": math.nan, "ratio": math.nan, "regime": "sup"})
    rep.deviations = [abs(sups[i + 1] / sups[i] - 1.0) for i in range(len(sups) - 1)]
    rep.notes["sups"] = sups
    rep.monotone = True
    rep.final_dev = rep.deviations[-1] if rep.deviations else 0.0
    rep.passed = all(math.isfinite(s) for s in sups) and rep.final_dev < 0.2
    return rep


def diagnostics_prop23(law: WalkLaw, n: int = 256) -> VerificationReport:
    """Prop 2.3(i) scaled ratio: sup stable under (x, y)-grid refinement.

    Boundedness diagnostic only - the paper's C_M is unspecified.
    """
    ctx = LawContext.build(law)
    inv_a = 1.0 / ctx.params.alpha
    rep = VerificationReport(theorem_id="prop23")
    sups = []
    # same extents, refined interior: stability means no blowup between nodes
    grids = (
        ((-40, -12, -3, 3, 12, 40), (1, 4, 16)),
        ((-40, -24, -12, -6, -3, -1, 1, 3, 6, 12, 24, 40), (1, 2, 4, 8, 16)),
    )
    for xs, ys in grids:
        sup = 0.0
        for x in xs:
            sl, W, _ = _kernel_slice_cached(law, ("set", (0,)), int(x), n)
            xn = x * float(n) ** -inv_a
            for y in ys:
                bound = min(
                    max(abs(xn), 1.0) ** (ctx.params.alpha - 1.0), abs(xn) ** -ctx.params.alpha
                )
                bound *= abs(y) ** (ctx.params.alpha - 1.0)
                val = float(sl[int(y) + W]) / bound
                sup = max(sup, val)
                rep.rows.append({"n": n, "x": x, "y": y, "exact": val, "rhs": math.nan, "ratio": math.nan, "regime": "p23"})
        sups.append(sup)
    rep.notes["sups"] = sups
    rep.notes["sup"] = sups[-1]
    rep.deviations = [abs(sups[1] / sups[0] - 1.0)]
    rep.monotone = True
    rep.final_dev = rep.deviations[-1]
    rep.passed = all(math.isfinite(s) for s in sups) and rep.final_dev < 0.2
    return rep


def lemma76_diagnostic(law: WalkLaw, n: int = 512) -> float:
    """sup_x p^n(x) n^{1/a} / (1 ^ |x_n|^{-a}) over the window (recorded, not asserted)."""
    ctx = LawContext.build(law)
    inv_a = 1.0 / ctx.params.alpha
    W = default_window(law, n)
    table = run_kernel(law, None, [0], n, window=W, keep=[n])
    sl = table.values[n][0]
    xs = np.arange(-W, W + 1, dtype=float)
    xn = np.abs(xs) * float(n) ** -inv_a
    with np.errstate(divide="ignore"):
        xnpow = np.where(xn > 0, xn ** -ctx.params.alpha, np.inf)
    bound = np.minimum(1.0, xnpow)
    return float((sl * float(n) ** inv_a / bound).max())


def verify_cor1(
    params: StableParams,
    t_values=(10.0, 100.0, 1000.0, 10000.0),
    crit: TrendCriterion = TrendCriterion(final_cap=0.15),
) -> VerificationReport:
    """t^{2-1/alpha} f^1(t) -> kappa_f for gamma < 2 - alpha (pure stable side)."""
    if abs(params.gamma - (2.0 - params.alpha)) < 1e-12:
        raise RegimeViolation("Corollary 1 power branch needs gamma < 2 - alpha")
    consts = constants(params)
    rep = VerificationReport(theorem_id="cor1")
    for t in t_values:
        val = hitting_density(t, 1.0, params, method="integral")
        scaled = t ** (2.0 - 1.0 / params.alpha) * val
        ratio = scaled / consts.kappa_f
        rep.rows.append({"n": int(t), "x": 1, "exact": scaled, "rhs": consts.kappa_f, "ratio": ratio, "regime": "t"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_cor2(
    law: WalkLaw,
    n_values=(256, 1024, 4096),
    x_fixed: int = -3,
    eta: float = 0.7,
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> VerificationReport:
    """gamma = 2-alpha, x <= 0, y < 0: p^n_0 ~ a_dag(x)[f^0(n)a(-y) + |y_n| p_c(y_n)/n]."""
    ctx = LawContext.build(law)
    if not ctx.spectrally_positive:
        raise RegimeViolation("Corollary 2 branch needs gamma = 2 - alpha")
    if x_fixed > 0:
        raise RegimeViolation("x must be <= 0 in this branch")
    rep = VerificationReport(theorem_id="cor2")
    inv_a = 1.0 / ctx.params.alpha
    for n in n_values:
        y = -max(1, int(math.floor(eta * n ** inv_a)))
        yn = y * float(n) ** -inv_a
        sl, W, _ = _kernel_slice_cached(law, ("set", (0,)), x_fixed, n)
        exact = float(sl[y + W])
        rhs = ctx.pot.a_dagger(x_fixed) * (
            f0_asymptote(n, ctx.params, ctx.consts) * ctx.pot.a(-y)
            + abs(yn) * _p_ccirc(ctx, yn) / n
        )
        ratio = exact / rhs
        rep.rows.append({"n": n, "x": x_fixed, "y": y, "exact": exact, "rhs": rhs, "ratio": ratio, "regime": "cor2"})
        rep.deviations.append(abs(ratio - 1.0))
    return rep.finalize(crit)


def verify_llt(
    law: WalkLaw,
    n_values=(64, 256, 1024),
    crit: TrendCriterion = TrendCriterion(final_cap=0.05, mono_floor=0.002),
) -> VerificationReport:
    """sup_x |n^{1/a} p^n(x) - p_c(x n^{-1/a})| decreasing along the n grid."""
    ctx = LawContext.build(law)
    inv_a = 1.0 / ctx.params.alpha
    rep = VerificationReport(theorem_id="llt")
    n_max = max(n_values)
    W = default_window(law, n_max)
    table = run_kernel(law, None, [0], n_max, window=W, keep=list(n_values))
    for n in n_values:
        sl = table.values[n][0]
        scale = float(n) ** inv_a
        xs = np.arange(-W, W + 1, dtype=float)
        dens, _ = density_grid_smart(ctx.params.c_circ, xs / scale, ctx.params)
        # window-edge bias is a DP artifact, not an LLT failure: restrict the
        # sup to the bulk |x| <= 6 n^{1/alpha}
        mask = np.abs(xs) <= 6.0 * scale
        sup = float(np.abs(scale * sl - dens)[mask].max())
        rep.rows.append({"n": n, "x": 0, "exact": sup, "rhs": 0.0, "ratio": sup, "regime": "llt"})
        rep.deviations.append(sup)
    return rep.finalize(crit)


def verify_ladder(
    law: WalkLaw,
    x_values=(16, 64, 256),
    crit: TrendCriterion = TrendCriterion(final_cap=0.2),
) -> tuple[VerificationReport, VerificationReport]:
    """U_ds(x) E|Z|/x -> 1 and V_as(x) c Gamma(a)/(x^{a-1} E|Z|) -> 1 trends.

    The V_as normalisation carries the 1/L = E|Z| factor of the renewal
    identity; both trends require gamma = 2 - alpha with E|Z| < inf.
    """
    ctx = LawContext.build(law)
    if not ctx.spectrally_positive:
        raise RegimeViolation("ladder trends need gamma = 2 - alpha")
    lt = ladder_renewals(law, x_max=max(x_values))
    ez = lt.mean_descending()
    a, c = ctx.params.alpha, ctx.params.c_circ
    rep_u = VerificationReport(theorem_id="ladder_U")
    rep_v = VerificationReport(theorem_id="ladder_V")
    for x in x_values:
        ru = lt.U_ds[x] * ez / x
        rv = lt.V_as[x] * c * gamma_fn(a) / (float(x) ** (a - 1.0) * ez)
        rep_u.rows.append({"n": x, "x": x, "exact": lt.U_ds[x], "rhs": x / ez, "ratio": ru, "regime": "U_ds"})
        rep_v.rows.append({"n": x, "x": x, "exact": lt.V_as[x], "rhs": float(x) ** (a - 1.0) * ez / (c * gamma_fn(a)), "ratio": rv, "regime": "V_as"})
        rep_u.deviations.append(abs(ru - 1.0))
        rep_v.deviations.append(abs(rv - 1.0))
    rep_u.notes["E_Z"] = ez
    rep_u.notes["pmf_tails"] = [lt.q_ds_tail, lt.q_as_tail]
    rep_v.notes["E_Z"] = ez
    return rep_u.finalize(crit), rep_v.finalize(crit)
