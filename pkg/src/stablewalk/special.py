"""Scalar special functions and quadrature primitives.

Everything numeric in the library funnels through this module so that the
gamma / zeta / polylog values used in closed-form constants and the ones used
inside quadratures come from a single source.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import QuadratureNonConvergence

__all__ = [
    "gamma_fn",
    "zeta_fn",
    "zeta_tail",
    "harmonic",
    "polylog_exp",
    "polylog_analytic",
    "omexp",
    "x_minus_sin",
    "gk_panels",
    "integrate_panels",
    "integrate_adaptive",
    "geometric_breaks",
]

# Lanczos approximation, g = 7, 9 terms.  Relative error below 1e-13 on the
# real line away from the poles.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function on the real line (poles at 0, -1, -2, ... raise)."""
    if x == math.floor(x) and x <= 0:
        raise ValueError(f"gamma pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


# Bernoulli numbers B_2 .. B_16 for the Euler-Maclaurin tail.
_B2K = (
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
)


def _zeta_em(s: float, n_direct: int = 24) -> float:
    """Riemann zeta by direct sum + Euler-Maclaurin tail (valid for s > -0.5, s != 1)."""
    total = 0.0
    for n in range(1, n_direct):
        total += n ** (-s)
    big_n = float(n_direct)
    total += big_n ** (1.0 - s) / (s - 1.0) + 0.5 * big_n ** (-s)
    rising = s
    npow = big_n ** (-s - 1.0)
    for k, b in enumerate(_B2K, start=1):
        total += b / math.factorial(2 * k) * rising * npow
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        npow /= big_n * big_n
    return total


def zeta_fn(s: float) -> float:
    """Riemann zeta on the real line, s != 1 (reflection below s = 0.5)."""
    if abs(s - 1.0) < 1e-9:
        raise ValueError("zeta pole at s=1")
    if s == 0.0:
        return -0.5
    if s >= 0.5:
        return _zeta_em(s)
    if s < 0 and s == math.floor(s) and int(s) % 2 == 0:
        return 0.0
    return (
        2.0 ** s
        * math.pi ** (s - 1.0)
        * math.sin(math.pi * s / 2.0)
        * gamma_fn(1.0 - s)
        * _zeta_em(1.0 - s)
    )


def zeta_tail(s: float, m: int) -> float:
    """sum_{y >= m} y^{-s} for s > 1, by Euler-Maclaurin (no large partial sums)."""
    if m < 30:
        head = sum(y ** (-s) for y in range(1, m))
        return zeta_fn(s) - head
    big_m = float(m)
    total = big_m ** (1.0 - s) / (s - 1.0) + 0.5 * big_m ** (-s)
    rising = s
    mpow = big_m ** (-s - 1.0)
    for k, b in enumerate(_B2K, start=1):
        total += b / math.factorial(2 * k) * rising * mpow
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        mpow /= big_m * big_m
    return total


def harmonic(n: int) -> float:
    return sum(1.0 / j for j in range(1, n + 1))


def polylog_analytic(s: float, theta: np.ndarray, terms: int = 96) -> np.ndarray:
    """Analytic (Taylor) part of Li_s(e^{i theta}) on 0 < theta <= pi.

    For non-integer s this is sum_k zeta(s-k) (i theta)^k / k!; the
    Gamma(1-s)(-i theta)^{s-1} singular term is *excluded*.  For integer
    s >= 2 the k = s-1 term with the log replaces the singular term and is
    *included* here, so for integer s this is the full Li_s(e^{i theta}).
    """
    theta = np.asarray(theta, dtype=float)
    if abs(s - round(s)) < 1e-12:
        n = int(round(s))
        if n < 2:
            raise ValueError("polylog order must be > 1")
        res = (1j * theta) ** (n - 1) / math.factorial(n - 1) * (
            harmonic(n - 1) - (np.log(theta) - 1j * math.pi / 2.0)
        )
        term = np.ones(theta.shape, dtype=complex)
        for k in range(terms + 1):
            if k != n - 1:
                res = res + zeta_fn(n - k) * term
            term = term * (1j * theta) / (k + 1)
        return res
    res = np.zeros(theta.shape, dtype=complex)
    term = np.ones(theta.shape, dtype=complex)
    for k in range(terms + 1):
        res = res + zeta_fn(s - k) * term
        term = term * (1j * theta) / (k + 1)
    return res


def polylog_sing(s: float, theta: np.ndarray) -> np.ndarray:
    """Singular term Gamma(1-s)(-i theta)^{s-1} of Li_s(e^{i theta}), theta > 0.

    Zero for integer s (the log branch lives in polylog_analytic instead).
    """
    theta = np.asarray(theta, dtype=float)
    if abs(s - round(s)) < 1e-12:
        return np.zeros(theta.shape, dtype=complex)
    return gamma_fn(1.0 - s) * np.exp((s - 1.0) * (np.log(theta) - 1j * math.pi / 2.0))


def polylog_exp(s: float, theta: np.ndarray, terms: int = 96) -> np.ndarray:
    """Li_s(e^{i theta}) for 0 < theta <= pi (series converges for theta < 2 pi)."""
    return polylog_analytic(s, theta, terms=terms) + polylog_sing(s, theta)


def omexp(x: np.ndarray) -> np.ndarray:
    """1 - e^{ix} without cancellation: 2 sin^2(x/2) - i sin(x)."""
    x = np.asarray(x, dtype=float)
    return 2.0 * np.sin(x / 2.0) ** 2 - 1j * np.sin(x)


def x_minus_sin(x: np.ndarray) -> np.ndarray:
    """x - sin(x), series-evaluated for small |x|."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    x2 = x * x
    ser = x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    with np.errstate(invalid="ignore"):
        direct = x - np.sin(x)
    return np.where(small, ser, direct)


# Gauss-Kronrod 15 point rule on [-1, 1] with the embedded 7 point Gauss rule.
GK_NODES = np.array(
    [
        -0.991455371120813,
        -0.949107912342759,
        -0.864864423359769,
        -0.741531185599394,
        -0.586087235467691,
        -0.405845151377397,
        -0.207784955007898,
        0.0,
        0.207784955007898,
        0.405845151377397,
        0.586087235467691,
        0.741531185599394,
        0.864864423359769,
        0.949107912342759,
        0.991455371120813,
    ]
)
GK_WEIGHTS = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
        0.204432940075298,
        0.190350578064785,
        0.169004726639267,
        0.140653259715525,
        0.104790010322250,
        0.063092092629979,
        0.022935322010529,
    ]
)
G7_WEIGHTS = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
        0.381830050505119,
        0.279705391489277,
        0.129484966168870,
    ]
)


def gk_panels(breaks: np.ndarray):
    """All GK15 nodes and scaled weights for the given panel breakpoints.

    Returns (nodes, kronrod_w, gauss_w, panel_index); flat arrays of length
    15 * n_panels.  gauss_w is zero on non-Gauss nodes so that the embedded
    estimate is a plain dot product.
    """
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    wk = (half[:, None] * GK_WEIGHTS[None, :]).ravel()
    wg = np.zeros((len(a), 15))
    wg[:, 1::2] = half[:, None] * G7_WEIGHTS[None, :]
    return nodes, wk, wg.ravel(), np.repeat(np.arange(len(a)), 15)


def integrate_panels(f, breaks):
    """Integrate callable f (vectorised, complex ok) over fixed panels.

    Returns (value, error_estimate); the estimate is the summed |GK15 - G7|
    panel difference.
    """
    nodes, wk, wg, idx = gk_panels(np.asarray(breaks, dtype=float))
    vals = f(nodes)
    per_k = np.bincount(idx, weights=(vals * wk).real) + 1j * np.bincount(
        idx, weights=(vals * wk).imag
    )
    per_g = np.bincount(idx, weights=(vals * wg).real) + 1j * np.bincount(
        idx, weights=(vals * wg).imag
    )
    return per_k.sum(), float(np.abs(per_k - per_g).sum())


def integrate_adaptive(f, a, b, abs_tol=1e-12, max_splits=14, initial=33):
    """Adaptive panel-splitting GK15 on [a, b] for vectorised complex f."""
    breaks = np.linspace(a, b, initial)
    for _ in range(max_splits):
        nodes, wk, wg, idx = gk_panels(breaks)
        vals = f(nodes)
        per_k = np.bincount(idx, weights=(vals * wk).real) + 1j * np.bincount(
            idx, weights=(vals * wk).imag
        )
        per_g = np.bincount(idx, weights=(vals * wg).real) + 1j * np.bincount(
            idx, weights=(vals * wg).imag
        )
        err = np.abs(per_k - per_g)
        if err.sum() <= abs_tol:
            return per_k.sum(), float(err.sum())
        worst = err > max(abs_tol / max(len(breaks), 1), err.max() / 8.0)
        mids = 0.5 * (breaks[:-1][worst] + breaks[1:][worst])
        breaks = np.sort(np.concatenate([breaks, mids]))
    raise QuadratureNonConvergence(
        f"adaptive GK15 on [{a}, {b}]: error {err.sum():.3e} > {abs_tol:.1e}"
    )


def geometric_breaks(lo: float, hi: float, per_octave: int = 1) -> np.ndarray:
    """Breakpoints geometric from hi down to ~lo (plus the origin)."""
    n = max(int(math.ceil(math.log2(hi / lo))) * per_octave, 4)
    pts = hi * 2.0 ** (-np.arange(1, n + 1, dtype=float) / per_octave)
    return np.unique(np.concatenate([[0.0, hi], pts[pts > lo / 2]]))
