"""Limit-process objects: stable densities, hitting densities, constants.

All densities are computed by characteristic-function inversion
    p_t(x) = (1/pi) Re int_0^inf e^{-t psi(theta)} e^{-i x theta} dtheta,
with the integrand cut at theta* where t cos(pi gamma/2) theta^alpha = 44
(below e^{-44}), geometric panels against the theta^alpha cusp at the origin
and half-period panels against the cos(x theta) oscillation.  Far tails and
tail moments use the classical asymptotic series in x^{-alpha}, truncated at
three terms with the first omitted term as the error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureNonConvergence, WrongSkew
from .special import (
    GK_NODES,
    GK_WEIGHTS,
    G7_WEIGHTS,
    gamma_fn,
    integrate_panels,
)
from .walk_model import StableParams

_CUT = 44.0  # exp(-44) ~ 8e-20: below double noise for O(1) integrands


def psi(theta, params: StableParams):
    """Characteristic exponent e^{i sgn(theta) pi gamma / 2} |theta|^alpha."""
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(1j * np.sign(theta) * math.pi * params.gamma / 2.0)
    out = phase * np.abs(theta) ** params.alpha
    return out if out.shape else complex(out)


@dataclass(frozen=True)
class StableDensityEval:
    t: float
    x: float
    value: float
    abs_error_estimate: float


def _theta_breaks(t: float, params: StableParams, x_max: float) -> np.ndarray:
    """Panel breakpoints on [0, theta*] resolving both the cusp and cos(x theta)."""
    cr = math.cos(math.pi * params.gamma / 2.0)
    theta_star = (_CUT / (t * cr)) ** (1.0 / params.alpha)
    n_osc = int(abs(x_max) * theta_star / math.pi) + 1
    n_base = max(33, min(n_osc + 1, 250_000))
    uni = np.linspace(0.0, theta_star, n_base)
    geo = theta_star * 2.0 ** (-np.arange(1, 48, dtype=float))
    return np.unique(np.concatenate([[0.0], geo, uni]))


def density_grid(
    t: float,
    xs: np.ndarray,
    params: StableParams,
    deriv: int = 0,
    x_chunk: int = 128,
) -> tuple[np.ndarray, np.ndarray]:
    """p_t(x) (or its x-derivative) on a batch of points, with error estimates."""
    if t <= 0:
        raise ValueError("t must be positive")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    breaks = _theta_breaks(t, params, float(np.abs(xs).max()) if len(xs) else 1.0)
    a, b = breaks[:-1], breaks[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    wk = (half[:, None] * GK_WEIGHTS[None, :]).ravel()
    wg_panel = np.zeros((len(a), 15))
    wg_panel[:, 1::2] = half[:, None] * G7_WEIGHTS[None, :]
    wg = wg_panel.ravel()
    g = np.exp(-t * psi(nodes, params))
    if deriv:
        g = g * (-1j * nodes) ** deriv
    vals = np.empty(len(xs))
    errs = np.empty(len(xs))
    for lo in range(0, len(xs), x_chunk):
        chunk = xs[lo : lo + x_chunk]
        osc = np.exp(-1j * np.outer(chunk, nodes))
        integ = osc * g[None, :]
        vk = integ @ wk
        vg = integ @ wg
        vals[lo : lo + len(chunk)] = vk.real / math.pi
        errs[lo : lo + len(chunk)] = np.abs(vk - vg) / math.pi
    return vals, errs


def density_series_far(t: float, xs: np.ndarray, params: StableParams, deriv: int = 0, terms: int = 5):
    """p_t(x) (or d/dx p_t) by the far-tail series; |x| >> t^{1/alpha} only."""
    xs = np.asarray(xs, dtype=float)
    a = params.alpha
    out = np.zeros(xs.shape)
    err = np.zeros(xs.shape)
    z = np.abs(xs)
    side = np.where(xs >= 0, 1, -1)
    for k in range(1, terms + 1):
        coef = (-1.0) ** (k - 1) * gamma_fn(k * a + 1.0) / math.factorial(k) / math.pi
        sin_k = np.where(side > 0, _tail_sin(params, k, +1), _tail_sin(params, k, -1))
        if deriv == 0:
            out += coef * sin_k * t ** k * z ** (-k * a - 1.0)
        else:
            # d/dx p_t(x): for x<0 the chain rule flips the sign
            out += side * (-(k * a + 1.0)) * coef * sin_k * t ** k * z ** (-k * a - 2.0)
    k = terms + 1
    mag = gamma_fn(k * a + 1.0) / math.factorial(k) / math.pi * t ** k
    err = mag * z ** (-k * a - 1.0 - deriv)
    return out, err


_SERIES_SWITCH = 35.0  # |x| / t^{1/alpha} beyond which the far series is used


def density_grid_smart(t: float, xs: np.ndarray, params: StableParams, deriv: int = 0):
    """density_grid with automatic far-tail series switching."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    cut = _SERIES_SWITCH * t ** (1.0 / params.alpha)
    far = np.abs(xs) > cut
    vals = np.empty(xs.shape)
    errs = np.empty(xs.shape)
    if (~far).any():
        v, e = density_grid(t, xs[~far], params, deriv=deriv)
        vals[~far], errs[~far] = v, e
    if far.any():
        v, e = density_series_far(t, xs[far], params, deriv=deriv)
        vals[far], errs[far] = v, e
    return vals, errs


def stable_density(t: float, x: float, params: StableParams) -> StableDensityEval:
    """Density of Y_t at x."""
    vals, errs = density_grid_smart(t, np.array([x]), params)
    val, err = float(vals[0]), float(errs[0])
    if err > 1e-8:
        raise QuadratureNonConvergence(f"density quadrature error {err:.2e}")
    return StableDensityEval(t=t, x=float(x), value=max(val, 0.0), abs_error_estimate=err)


def density_at_zero(t: float, params: StableParams) -> float:
    """p_t(0) in closed form: Gamma(1/a) sin(pi (a-g)/(2a)) / (pi a t^{1/a})."""
    a, g = params.alpha, params.gamma
    return (
        gamma_fn(1.0 / a)
        * math.sin(math.pi * (a - g) / (2.0 * a))
        / (math.pi * a)
        * t ** (-1.0 / a)
    )


# ---------------------------------------------------------------------------
# far-tail series (classical expansion in x^{-alpha})
# ---------------------------------------------------------------------------


def _tail_sin(params: StableParams, k: int, side: int) -> float:
    """sin(k pi (alpha -+ gamma)/2): '+x' tail uses alpha-gamma, '-x' alpha+gamma."""
    a, g = params.alpha, params.gamma
    arg = a - g if side > 0 else a + g
    return math.sin(k * math.pi * arg / 2.0)


def tail_mass_series(X: float, t: float, params: StableParams, side: int, terms: int = 3):
    """(P[Y_t > X] or P[Y_t < -X], error bound) by the asymptotic series."""
    a = params.alpha
    total = 0.0
    for k in range(1, terms + 1):
        total += (
            (-1.0) ** (k - 1)
            * gamma_fn(k * a + 1.0)
            / (math.factorial(k) * k * a)
            * _tail_sin(params, k, side)
            * t ** k
            * X ** (-k * a)
        ) / math.pi
    k = terms + 1
    bound = (
        gamma_fn(k * a + 1.0) / (math.factorial(k) * k * a) * t ** k * X ** (-k * a) / math.pi
    )
    return total, bound


def tail_absmoment_series(X: float, t: float, params: StableParams, side: int, terms: int = 3):
    """(int_X^inf x p_t(+-x) dx, error bound) by the asymptotic series."""
    a = params.alpha
    total = 0.0
    for k in range(1, terms + 1):
        total += (
            (-1.0) ** (k - 1)
            * gamma_fn(k * a + 1.0)
            / (math.factorial(k) * (k * a - 1.0))
            * _tail_sin(params, k, side)
            * t ** k
            * X ** (1.0 - k * a)
        ) / math.pi
    k = terms + 1
    bound = (
        gamma_fn(k * a + 1.0)
        / (math.factorial(k) * (k * a - 1.0))
        * t ** k
        * X ** (1.0 - k * a)
        / math.pi
    )
    return total, bound


def _x_breaks(t: float, X: float) -> np.ndarray:
    """x-panels on [-X, X]: fine near 0 on the t^{1/alpha} scale, geometric out."""
    scale = max(t, 1e-6) ** 0.7  # mild widening with t; exactness comes from GK
    inner = np.linspace(0.0, min(4.0 * scale, X), 17)
    if X > inner[-1]:
        n_geo = max(int(math.ceil(math.log2(X / max(inner[-1], 1e-3)))) * 4, 4)
        outer = inner[-1] * (X / inner[-1]) ** (np.arange(1, n_geo + 1) / n_geo)
        grid = np.concatenate([inner, outer])
    else:
        grid = inner
    return np.unique(np.concatenate([-grid[::-1], grid]))


def normalization_check(t: float, params: StableParams) -> tuple[float, float]:
    """(integral of p_t over R, error bound): pointwise quadrature + tail series."""
    a = params.alpha
    X = max(32.0, (gamma_fn(4 * a + 1.0) / (24.0 * 4 * a) * t ** 4 / 1e-8) ** (1.0 / (4 * a)))
    brk = _x_breaks(t, X)
    ab, bb = brk[:-1], brk[1:]
    mid, half = 0.5 * (ab + bb), 0.5 * (bb - ab)
    nodes = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    wk = (half[:, None] * GK_WEIGHTS[None, :]).ravel()
    vals, errs = density_grid_smart(t, nodes, params)
    mass = float(vals @ wk)
    err = float(errs @ np.abs(wk))
    tp, ep = tail_mass_series(X, t, params, +1)
    tm, em = tail_mass_series(X, t, params, -1)
    return mass + tp + tm, err + ep + em


def abs_moment(t: float, params: StableParams, method: str = "closed") -> float:
    """E|Y_t| = (2 t^{1/a}/pi) Gamma(1-1/a) sin(pi (a-g)/(2a)), or by quadrature."""
    a, g = params.alpha, params.gamma
    if method == "closed":
        return (
            2.0
            * t ** (1.0 / a)
            / math.pi
            * gamma_fn(1.0 - 1.0 / a)
            * math.sin(math.pi * (a - g) / (2.0 * a))
        )
    if method != "quadrature":
        raise ValueError(method)
    X = max(100.0, 8.0 * t ** (1.0 / a))
    brk = _x_breaks(t, X)
    ab, bb = brk[:-1], brk[1:]
    mid, half = 0.5 * (ab + bb), 0.5 * (bb - ab)
    nodes = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    wk = (half[:, None] * GK_WEIGHTS[None, :]).ravel()
    vals, errs = density_grid_smart(t, nodes, params)
    mom = float((vals * np.abs(nodes)) @ wk)
    tp, _ = tail_absmoment_series(X, t, params, +1)
    tm, _ = tail_absmoment_series(X, t, params, -1)
    return mom + tp + tm


# ---------------------------------------------------------------------------
# hitting density of the origin
# ---------------------------------------------------------------------------


def _is_spectrally_positive(params: StableParams) -> bool:
    return abs(params.gamma - (2.0 - params.alpha)) < 1e-12


def _f1_integral(t: float, params: StableParams) -> float:
    """f^1(t) by the first-passage time-convolution representation.

    The (1-u)^{-1+1/alpha} endpoint singularity is removed exactly by the
    substitution u = 1 - v^alpha.
    """
    a = params.alpha
    p10 = density_at_zero(1.0, params)
    pref = math.sin(math.pi / a) / (math.pi * p10) / (a * t ** (1.0 + 1.0 / a)) * a

    v_breaks = np.linspace(0.0, 1.0, 65)
    av, bv = v_breaks[:-1], v_breaks[1:]
    mid, half = 0.5 * (av + bv), 0.5 * (bv - av)
    v_nodes = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    wk = (half[:, None] * GK_WEIGHTS[None, :]).ravel()
    u = 1.0 - v_nodes ** a
    u = np.clip(u, 1e-140, 1.0)
    args = -((t * u) ** (-1.0 / a))
    dvals, _ = density_grid_smart(1.0, args, params, deriv=1)
    integrand = u ** (-2.0 / a) * dvals
    # u -> 0 endpoint: the integrand decays like u; guard stray non-finite
    integrand = np.where(np.isfinite(integrand), integrand, 0.0)
    return pref * float(integrand @ wk)


def hitting_density(t: float, x: float, params: StableParams, method: str = "auto") -> float:
    """Density f^x(t) of the first hitting time of 0 from x != 0.

    For the spectrally positive case (gamma = 2 - alpha, x > 0) the creeping
    identity f^x(t) = x t^{-1} p_t(-x) applies; the general route integrates
    the density derivative through the first-passage representation and uses
    the scaling f^x(t) = f^1(t/x^alpha)/x^alpha.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if x == 0:
        raise ValueError("x must be nonzero")
    if x < 0:
        flipped = StableParams(
            alpha=params.alpha, gamma=-params.gamma, c_circ=params.c_circ, rho=1.0 - params.rho
        )
        return hitting_density(t, -x, flipped, method=method)
    if method == "auto":
        method = "identity" if _is_spectrally_positive(params) else "integral"
    if method == "identity":
        if not _is_spectrally_positive(params):
            raise WrongSkew("identity path needs gamma = 2 - alpha")
        val, err = density_grid(t, np.array([-x]), params)
        if err[0] > 1e-8:
            raise QuadratureNonConvergence(f"p_t(-x) error {err[0]:.2e}")
        return x / t * float(val[0])
    if method == "integral":
        return _f1_integral(t / x ** params.alpha, params) / x ** params.alpha
    raise ValueError(method)


# ---------------------------------------------------------------------------
# named constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsTable:
    alpha: float
    gamma: float
    c_circ: float
    kappa_hit: float          # hitting-time constant
    kappa_hit_alt: float      # same constant via the p_1(0) form
    kappa_f: float            # f^1(t) tail constant, zero iff gamma = 2-alpha
    kappa_a_plus: float       # a(x) growth constants
    kappa_a_minus: float
    b_plus: float             # boundary constants of the killed density
    b_minus: float
    p1_zero: float
    b_ladder: float           # half-line survival constant (gamma = 2-alpha)
    kappa_V: float            # ascending-ladder renewal constant (gamma = 2-alpha)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def constants(params: StableParams) -> ConstantsTable:
    a, g, c = params.alpha, params.gamma, params.c_circ
    p1_zero = density_at_zero(1.0, params)
    kappa_hit = (
        (a - 1.0)
        * math.sin(math.pi / a)
        / (gamma_fn(1.0 / a) * math.sin(math.pi * (a - g) / (2.0 * a)))
    )
    kappa_hit_alt = (1.0 - 1.0 / a) * math.sin(math.pi / a) / (p1_zero * math.pi)
    kappa_f = (
        gamma_fn(2.0 - a)
        * math.sin(math.pi / a)
        * math.sin(math.pi * (a + g) / 2.0)
        / (a * math.pi ** 2 * p1_zero)
    )
    kappa_a_plus = -gamma_fn(1.0 - a) / math.pi * math.sin(math.pi * (a + g) / 2.0)
    kappa_a_minus = -gamma_fn(1.0 - a) / math.pi * math.sin(math.pi * (a - g) / 2.0)
    b_plus = -gamma_fn(1.0 - a) / math.pi * math.sin(math.pi * (a - g) / 2.0)
    b_minus = -gamma_fn(1.0 - a) / math.pi * math.sin(math.pi * (a + g) / 2.0)
    if _is_spectrally_positive(params):
        b_ladder = 1.0 / (c ** (1.0 / a) * gamma_fn(1.0 - 1.0 / a))
        kappa_v = 1.0 / (c * gamma_fn(a))
    else:
        b_ladder = math.nan
        kappa_v = math.nan
    return ConstantsTable(
        alpha=a,
        gamma=g,
        c_circ=c,
        kappa_hit=kappa_hit,
        kappa_hit_alt=kappa_hit_alt,
        kappa_f=kappa_f,
        kappa_a_plus=kappa_a_plus,
        kappa_a_minus=kappa_a_minus,
        b_plus=b_plus,
        b_minus=b_minus,
        p1_zero=p1_zero,
        b_ladder=b_ladder,
        kappa_V=kappa_v,
    )


# ---------------------------------------------------------------------------
# stable meander (spectrally positive case)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeanderEval:
    t: float
    eta: float
    q_prime: float       # Q_t'(eta), needs an externally supplied K_t(eta)
    q_hat_prime: float   # dual meander density, closed form


def meander_density(t: float, eta: float, params: StableParams, K: float | None = None) -> MeanderEval:
    """Meander density pair at eta > 0 for the spectrally positive case.

    Q_t'(eta) = K_t(eta) / (alpha p_t(0)); K values come from the half-line
    kernel estimator.  The dual density has the closed form
    Q_hat_t'(eta) = t^{-1/alpha} Gamma(1/alpha) p_t(-eta) eta.
    """
    if not _is_spectrally_positive(params):
        raise WrongSkew("meander densities implemented for gamma = 2 - alpha only")
    if eta <= 0 or t <= 0:
        raise ValueError("t, eta must be positive")
    a = params.alpha
    val, err = density_grid(t, np.array([-eta]), params)
    if err[0] > 1e-8:
        raise QuadratureNonConvergence(f"p_t(-eta) error {err[0]:.2e}")
    q_hat = t ** (-1.0 / a) * gamma_fn(1.0 / a) * float(val[0]) * eta
    q_prime = math.nan if K is None else K / (a * density_at_zero(t, params))
    return MeanderEval(t=t, eta=eta, q_prime=q_prime, q_hat_prime=q_hat)


def meander_small_eta_slope(t: float, params: StableParams, eta: float) -> float:
    """Leading form eta^{alpha-1}/(t alpha Gamma(alpha)) of Q_t'(eta) as eta -> 0."""
    a = params.alpha
    return eta ** (a - 1.0) / (t * a * gamma_fn(a))
