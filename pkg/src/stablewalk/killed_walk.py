"""Exact finite-n kernels for free, point-killed and half-line-killed walks.

The state lives on the window [-W, W]; one step is a linear convolution with
the windowed increment pmf (FFT, zero-padded against wrap-around).  Mass that
leaves the window, or jumps past it, goes to an explicit escaped/killed
ledger, so

    in-window + killed + escaped = 1

holds to float accumulation error at every step.  For half-line killing the
below-window overflow is provably inside the killing set and is charged to
the killed ledger, which keeps first-passage mass exact up to the escape on
the open side only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResolutionTooCoarse, TruncationTooCoarse, WindowTooSmall
from .special import GK_NODES, GK_WEIGHTS
from .walk_model import WalkLaw

# ---------------------------------------------------------------------------
# killing-set descriptors
# ---------------------------------------------------------------------------

HALF_LE_0 = ("le", 0)     # (-inf, 0]
HALF_LT_0 = ("le", -1)    # (-inf, 0)
HALF_GE_0 = ("ge", 0)     # [0, +inf)


def _normalize_killing(B):
    if B is None:
        return None
    if isinstance(B, tuple) and len(B) == 2 and B[0] in ("le", "ge"):
        return (B[0], int(B[1]))
    if isinstance(B, tuple) and len(B) == 2 and B[0] == "set":
        return B
    return ("set", tuple(sorted(int(z) for z in B)))


def killing_mask(B, W: int) -> np.ndarray | None:
    """Boolean mask over [-W, W] of the in-window killing region."""
    B = _normalize_killing(B)
    if B is None:
        return None
    xs = np.arange(-W, W + 1)
    if B[0] == "le":
        return xs <= B[1]
    if B[0] == "ge":
        return xs >= B[1]
    mask = np.zeros(2 * W + 1, dtype=bool)
    for z in B[1]:
        if abs(z) <= W:
            mask[z + W] = True
    return mask


def default_window(law: WalkLaw, n_max: int, mult: float = 8.0) -> int:
    """W = max(mult * n_max^{1/alpha}, 512)."""
    return int(max(mult * n_max ** (1.0 / law.spec.alpha), 512))


# ---------------------------------------------------------------------------
# kernel tables
# ---------------------------------------------------------------------------


@dataclass
class KernelTable:
    """Killed/free n-step kernel slices with a conservation ledger.

    values[n] is an array (n_starts, 2W+1); killed/escaped are cumulative
    per-start ledgers indexed by step; step_killed is the per-step kill mass
    (the first-passage mass into B at that step).
    """

    law_hash: str
    killing: object
    window: int
    n_max: int
    starts: list
    values: dict = field(default_factory=dict)
    step_killed: np.ndarray | None = None
    killed: np.ndarray | None = None
    escaped: np.ndarray | None = None
    entrance: np.ndarray | None = None
    entrance_depth: int = 0
    entrance_lump: np.ndarray | None = None

    def slice(self, n: int, x: int) -> np.ndarray:
        return self.values[n][self.starts.index(x)]

    def value(self, n: int, x: int, y: int) -> float:
        W = self.window
        if abs(y) > W:
            raise WindowTooSmall(f"y={y} outside window {W}")
        return float(self.values[n][self.starts.index(x)][y + W])

    def conservation_defect(self, n: int) -> np.ndarray:
        total = self.values[n].sum(axis=1) + self.killed[:, n] + self.escaped[:, n]
        return np.abs(total - 1.0)

    def to_csv(self, n: int) -> str:
        W = self.window
        lines = ["schema_version,n,x,y,value"]
        arr = self.values[n]
        for i, x in enumerate(self.starts):
            nz = np.nonzero(arr[i])[0]
            for j in nz:
                lines.append(f"1,{n},{x},{j - W},{arr[i][j]:.17g}")
        return "\n".join(lines) + "\n"


def _fft_stepper(law: WalkLaw, W: int):
    p = law.pmf_window(W)
    esc_p, esc_m = law.escaped_split(W)
    nfft = 1
    while nfft < 4 * W + 1:
        nfft *= 2
    pf = np.fft.rfft(p, nfft)

    def step(states: np.ndarray) -> np.ndarray:
        """Full linear convolution on [-2W, 2W] for a (n_starts, 2W+1) batch."""
        sf = np.fft.rfft(states, nfft, axis=1)
        full = np.fft.irfft(sf * pf[None, :], nfft, axis=1)[:, : 4 * W + 1]
        return full

    return step, esc_p, esc_m


def run_kernel(
    law: WalkLaw,
    B,
    starts,
    n_max: int,
    window: int | None = None,
    keep: list | None = None,
    entrance_depth: int = 0,
    escape_budget: float | None = None,
) -> KernelTable:
    """Dynamic programming for p^n_B(x, .) from each start, with ledgers.

    keep: list of n to store (default: all n <= n_max).
    entrance_depth: for half-line 'le' killing, store the entrance law
    h(n, y) for landing points within depth of the boundary.
    """
    starts = [int(x) for x in starts]
    W = window or default_window(law, n_max)
    for x in starts:
        if abs(x) > W:
            raise WindowTooSmall(f"start {x} outside window {W}")
    B = _normalize_killing(B)
    mask = killing_mask(B, W)
    keep_set = set(keep) if keep is not None else set(range(n_max + 1))
    step, esc_p, esc_m = _fft_stepper(law, W)

    ns = len(starts)
    states = np.zeros((ns, 2 * W + 1))
    for i, x in enumerate(starts):
        states[i, x + W] = 1.0

    table = KernelTable(
        law_hash=law.law_hash(),
        killing=B,
        window=W,
        n_max=n_max,
        starts=starts,
    )
    table.step_killed = np.zeros((ns, n_max + 1))
    table.killed = np.zeros((ns, n_max + 1))
    table.escaped = np.zeros((ns, n_max + 1))
    half_le = B is not None and B[0] == "le"
    half_ge = B is not None and B[0] == "ge"
    if entrance_depth:
        if not (half_le or half_ge):
            raise ValueError("entrance collection needs half-line killing")
        table.entrance_depth = entrance_depth
        table.entrance = np.zeros((ns, n_max + 1, entrance_depth + 1))
        table.entrance_lump = np.zeros((ns, n_max + 1))
    if 0 in keep_set:
        table.values[0] = states.copy()

    killed_cum = np.zeros(ns)
    escaped_cum = np.zeros(ns)
    for n in range(1, n_max + 1):
        alive = states.sum(axis=1)
        full = step(states)
        below = full[:, :W].sum(axis=1)
        above = full[:, 3 * W + 1 :].sum(axis=1)
        jump_up = alive * esc_p
        jump_dn = alive * esc_m
        states = full[:, W : 3 * W + 1].copy()
        if B is None:
            kill_now = np.zeros(ns)
            escaped_cum += below + above + jump_up + jump_dn
        elif half_le:
            # below-window overflow and below-window jumps land in B
            b = B[1]
            cut = b + W + 1  # indices [0, cut) are killed states
            kill_now = states[:, :cut].sum(axis=1) + below + jump_dn
            if entrance_depth:
                lo = max(cut - (entrance_depth + 1), 0)
                strip = states[:, lo:cut][:, ::-1]  # d = 0 <-> landing at b
                table.entrance[:, n, : strip.shape[1]] = strip
                table.entrance_lump[:, n] = kill_now - strip.sum(axis=1)
            states[:, :cut] = 0.0
            escaped_cum += above + jump_up
        elif half_ge:
            b = B[1]
            cut = b + W  # indices [cut, end] are killed states
            kill_now = states[:, cut:].sum(axis=1) + above + jump_up
            if entrance_depth:
                hi = min(cut + entrance_depth + 1, 2 * W + 1)
                strip = states[:, cut:hi]  # d = 0 <-> landing at b
                table.entrance[:, n, : strip.shape[1]] = strip
                table.entrance_lump[:, n] = kill_now - strip.sum(axis=1)
            states[:, cut:] = 0.0
            escaped_cum += below + jump_dn
        else:
            kill_now = states[:, mask].sum(axis=1)
            states[:, mask] = 0.0
            escaped_cum += below + above + jump_up + jump_dn
        killed_cum += kill_now
        table.step_killed[:, n] = kill_now
        table.killed[:, n] = killed_cum
        table.escaped[:, n] = escaped_cum
        if n in keep_set:
            table.values[n] = states.copy()
    if escape_budget is not None and escaped_cum.max() > escape_budget:
        raise WindowTooSmall(
            f"escaped mass {escaped_cum.max():.3e} above budget {escape_budget:.1e} at W={W}"
        )
    return table


def marginal_kernel(
    law: WalkLaw, n_max: int, window: int | None = None, keep=None
) -> KernelTable:
    """Free kernel p^n(x) from the origin."""
    return run_kernel(law, None, [0], n_max, window=window, keep=keep)


def killed_kernel(
    law: WalkLaw, B, n_max: int, starts, window: int | None = None, keep=None
) -> KernelTable:
    """Killed kernel p^n_B(x, .) for the given starts."""
    return run_kernel(law, B, starts, n_max, window=window, keep=keep)


# ---------------------------------------------------------------------------
# first passage
# ---------------------------------------------------------------------------


@dataclass
class FirstPassageLaw:
    x: int
    killing: object
    f: np.ndarray            # f[n] = P[sigma = n]
    cumulative: np.ndarray
    truncation_tail: float   # surviving + escaped mass at n_max
    escaped: float

    def total(self) -> float:
        return float(self.f.sum())


def first_passage(
    law: WalkLaw, B, x: int, n_max: int, window: int | None = None
) -> FirstPassageLaw:
    """First-passage law f^x_B(n) from the killed-kernel ledger."""
    table = run_kernel(law, B, [x], n_max, window=window, keep=[n_max])
    f = table.step_killed[0].copy()
    cum = np.cumsum(f)
    surv = float(table.values[n_max][0].sum())
    esc = float(table.escaped[0, n_max])
    return FirstPassageLaw(
        x=int(x),
        killing=table.killing,
        f=f,
        cumulative=cum,
        truncation_tail=surv + esc,
        escaped=esc,
    )


# ---------------------------------------------------------------------------
# Fourier-inversion oracle for f^x(n), killing at the origin
# ---------------------------------------------------------------------------


def _theta_nodes_for_pi(law: WalkLaw, tau_min: float):
    """Geometric panels on (0, pi] resolving the 1/(|tau| + theta^alpha) peak."""
    t0 = max(min(tau_min ** (1.0 / law.spec.alpha) / 8.0, 0.05), 1e-7)
    n_up = int(math.ceil(math.log2(math.pi / t0))) + 1
    brk = np.unique(np.concatenate([[0.0], t0 * 2.0 ** np.arange(0, n_up), [math.pi]]))
    brk = brk[brk <= math.pi]
    a, b = brk[:-1], brk[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    w = (half[:, None] * GK_WEIGHTS[None, :]).ravel()
    return nodes, w


def fourier_first_passage(law: WalkLaw, x: int, n: int, xs_extra=()) -> float:
    """f^x(n) by double Fourier inversion (independent of the DP path)."""
    vals = fourier_first_passage_batch(law, [x] + list(xs_extra), n)
    return vals[0]


def fourier_first_passage_batch(law: WalkLaw, xs, n: int) -> np.ndarray:
    """f^x(n) for several x at one n.

    The outer tau integral uses half-period panels of cos(n tau); the inner
    theta integral shares phi(theta) across the whole tau grid.
    """
    xs = [int(x) for x in xs]
    if n < 1:
        raise ValueError("n >= 1")
    # outer tau panels: pi/n length, with geometric refinement against the
    # |tau|^{1-1/alpha} cusp of 1/pi_0 at the origin
    cusp = math.pi / max(n, 1) * 2.0 ** -np.arange(1, 34, dtype=float)
    brk = np.unique(np.concatenate([np.linspace(0.0, math.pi, max(2, n + 1)), cusp]))
    a, b = brk[:-1], brk[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    tau = (mid[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
    wtau = (half[:, None] * GK_WEIGHTS[None, :]).ravel()

    th, wth = _theta_nodes_for_pi(law, tau.min())
    omc = law.one_minus_char(th)           # 1 - phi(theta), theta > 0
    phi_p = 1.0 - omc
    phi_m = np.conj(phi_p)                 # phi(-theta)

    # D(tau, theta) = (1 - e^{i tau}) + e^{i tau} (1 - phi(theta))
    eit = np.exp(1j * tau)
    om_t = 2.0 * np.sin(tau / 2.0) ** 2 - 1j * np.sin(tau)  # 1 - e^{i tau}
    Dp = om_t[:, None] + eit[:, None] * omc[None, :]
    Dm = om_t[:, None] + eit[:, None] * np.conj(omc)[None, :]
    inv_p = 1.0 / Dp
    inv_m = 1.0 / Dm

    out = np.empty(len(xs))
    # pi_y(tau) = (1/2pi) int e^{-iy theta}/D dtheta  (split +-theta)
    def pi_y(y: int) -> np.ndarray:
        ph = np.exp(-1j * y * th)
        return ((inv_p * ph[None, :]) @ wth + (inv_m * np.conj(ph)[None, :]) @ wth) / (2.0 * math.pi)

    pi0 = pi_y(0)
    cos_n = np.cos(n * tau)
    for j, x in enumerate(xs):
        f_hat = pi_y(-x) / pi0
        if x == 0:
            f_hat = f_hat - 1.0 / pi0
        out[j] = float((f_hat.real * cos_n) @ wtau) * 2.0 / math.pi
    return out


# ---------------------------------------------------------------------------
# half-line entrance law
# ---------------------------------------------------------------------------


def halfline_entrance(
    law: WalkLaw,
    x: int,
    n_max: int,
    window: int | None = None,
    depth: int = 256,
) -> KernelTable:
    """Entrance law h^x(n, y) of (-inf, 0], resolved for -depth <= y <= 0."""
    if x < 1:
        raise ValueError("x must be >= 1")
    return run_kernel(
        law, HALF_LE_0, [x], n_max, window=window, keep=[n_max], entrance_depth=depth
    )


def entrance_rows(table: KernelTable, start_idx: int = 0) -> np.ndarray:
    """h(n, y) array indexed [n, d] with y = b - d (b the half-line boundary)."""
    return table.entrance[start_idx]


# ---------------------------------------------------------------------------
# ladder structure
# ---------------------------------------------------------------------------


@dataclass
class LadderTables:
    """Ladder-height pmfs and renewal functions.

    The renewal mass functions come from the Green-measure identities
        nu_as(y) = g_{(-inf,0]}(1, 1+y),
        u_ds(y)  = sum_m [mu Phat^m_{(-inf,0]}](y),  mu(z) = p(-z),
    accumulated by half-line DP with a power-tail extrapolation of the step
    truncation; the pmf-convolution renewal recursion is kept alongside as a
    cross-check route (its truncation defect compounds with x).
    """

    x_max: int
    n_truncate: int
    q_ds: np.ndarray          # strictly descending ladder height pmf, |Z| = 1..len
    q_ds_tail: float
    q_as: np.ndarray          # weakly ascending ladder height pmf, Z = 0..len-1
    q_as_tail: float
    nu_as: np.ndarray         # renewal measure of weak ascending heights, y = 0..x_max
    u_ds: np.ndarray          # renewal measure of strict descending heights, y = 1..x_max
    V_as: np.ndarray          # cumulative: V_as[x] = sum_{y<=x} nu_as(y)
    U_ds: np.ndarray          # cumulative: U_ds[x] = 1 + sum_{y<=x} u_ds(y)
    V_as_recursion: np.ndarray
    U_ds_recursion: np.ndarray
    green_tail_rel: float     # relative size of the extrapolated Green tail

    def mean_descending(self) -> float:
        ys = np.arange(1, len(self.q_ds) + 1, dtype=float)
        return float((ys * self.q_ds).sum() / max(self.q_ds.sum(), 1e-300))


def _greens_from_dp(law, init_vec, W, n_steps, alpha):
    """Green measure sum_m [init P^m_{(-inf,0]}] with power-tail extrapolation.

    Step contributions at a fixed site fall off like m^{-1-1/alpha} once
    m >> site^alpha, so the remainder beyond n_steps is estimated from the
    last half-window: tail = late / (2^{1/alpha} - 1).
    """
    step, esc_p, esc_m = _fft_stepper(law, W)
    states = init_vec.copy()[None, :]
    green = states[0].copy()
    late = np.zeros(2 * W + 1)
    half = n_steps // 2
    for m in range(1, n_steps + 1):
        full = step(states)
        states = full[:, W : 3 * W + 1].copy()
        states[0, : W + 1] = 0.0  # kill on (-inf, 0]
        green += states[0]
        if m > half:
            late += states[0]
    tail = late / (2.0 ** (1.0 / alpha) - 1.0)
    return green + tail, tail


def ladder_renewals(
    law: WalkLaw,
    x_max: int = 256,
    n_truncate: int | None = None,
    tail_budget: float = 0.2,
) -> LadderTables:
    """Ladder-height pmfs (truncated DP) and renewal functions (Green route).

    The Green accumulation at level y needs of order y^alpha steps before its
    tail enters the m^{-1-1/alpha} regime, so n_truncate defaults to
    4 * x_max^alpha (at least 8192).
    """
    alpha = law.spec.alpha
    if n_truncate is None:
        n_truncate = max(8192, int(4.0 * x_max ** alpha))
    W = default_window(law, n_truncate)

    # strictly descending: kill on entering (-inf, 0) = {..., -1}; from 0
    t_ds = run_kernel(
        law, ("le", -1), [0], n_truncate, window=W, keep=[n_truncate], entrance_depth=x_max
    )
    q_ds = t_ds.entrance[0].sum(axis=0)  # index i <-> landing at -1 - i, |Z| = i + 1
    q_ds_tail = float(t_ds.values[n_truncate][0].sum() + t_ds.escaped[0, -1] + t_ds.entrance_lump[0].sum())

    # weakly ascending: kill on entering [0, inf); from 0
    t_as = run_kernel(
        law, HALF_GE_0, [0], n_truncate, window=W, keep=[n_truncate], entrance_depth=x_max
    )
    q_as = t_as.entrance[0].sum(axis=0)  # landing at 0, 1, 2, ...
    q_as_tail = float(t_as.values[n_truncate][0].sum() + t_as.escaped[0, -1] + t_as.entrance_lump[0].sum())
    if max(q_ds_tail, q_as_tail) > tail_budget:
        raise TruncationTooCoarse(
            f"ladder pmf truncation tails ({q_ds_tail:.3f}, {q_as_tail:.3f}) above {tail_budget}"
        )

    # Green-measure renewal functions
    # nu_as(y) = g_{(-inf,0]}(1, 1+y): DP from 1 for the original law
    init = np.zeros(2 * W + 1)
    init[1 + W] = 1.0
    g1, tail1 = _greens_from_dp(law, init, W, n_truncate, alpha)
    nu_as = g1[W + 1 : W + x_max + 2]
    rel1 = float(tail1[W + 1 : W + x_max + 2].sum() / max(nu_as.sum(), 1e-300))
    # u_ds(y) = [mu Phat^m] green at y, mu(z) = p(-z), z >= 1
    rev = law.reversed()
    mu = np.zeros(2 * W + 1)
    zpos = np.arange(1, W + 1)
    mu[W + 1 :] = law.pmf(-zpos)
    g2, tail2 = _greens_from_dp(rev, mu, W, n_truncate, alpha)
    u_ds = g2[W + 1 : W + x_max + 1]
    rel2 = float(tail2[W + 1 : W + x_max + 1].sum() / max(u_ds.sum(), 1e-300))

    V_as = np.cumsum(nu_as)
    U_ds = 1.0 + np.concatenate([[0.0], np.cumsum(u_ds)])

    # recursion route (defective pmf; cross-check for small x)
    V_rec = _weak_renewal_recursion(q_as, x_max)
    U_rec = _strict_renewal_recursion(q_ds, x_max)

    return LadderTables(
        x_max=x_max,
        n_truncate=n_truncate,
        q_ds=q_ds,
        q_ds_tail=q_ds_tail,
        q_as=q_as,
        q_as_tail=q_as_tail,
        nu_as=nu_as,
        u_ds=u_ds,
        V_as=V_as,
        U_ds=U_ds,
        V_as_recursion=V_rec,
        U_ds_recursion=U_rec,
        green_tail_rel=max(rel1, rel2),
    )


def _weak_renewal_recursion(q_as: np.ndarray, x_max: int) -> np.ndarray:
    """V(x) = 1 + sum_{j <= x} q(j) V(x - j) with mass allowed at j = 0."""
    q0 = q_as[0] if len(q_as) else 0.0
    V = np.zeros(x_max + 1)
    for x in range(x_max + 1):
        acc = 1.0
        jmax = min(x, len(q_as) - 1)
        for j in range(1, jmax + 1):
            acc += q_as[j] * V[x - j]
        V[x] = acc / (1.0 - q0)
    return V


def _strict_renewal_recursion(q_ds: np.ndarray, x_max: int) -> np.ndarray:
    """U(x) = 1 + sum_{j <= x} q(|Z|=j) U(x - j)."""
    U = np.zeros(x_max + 1)
    for x in range(x_max + 1):
        acc = 1.0
        jmax = min(x, len(q_ds))
        for j in range(1, jmax + 1):
            acc += q_ds[j - 1] * U[x - j]
        U[x] = acc
    return U


# ---------------------------------------------------------------------------
# scaled half-line kernel estimate of K_t(eta)
# ---------------------------------------------------------------------------


def k_estimate(
    law: WalkLaw,
    eta: float,
    n: int,
    window: int | None = None,
) -> tuple[float, float]:
    """K_{c_circ}(eta) ~ n^{1/alpha} p^n_{(-inf,0]}(x, floor(eta n^{1/alpha})) / x_n.

    Averaged over two small starts; returns (estimate, spread between them).
    """
    alpha = law.spec.alpha
    scale = n ** (1.0 / alpha)
    y = int(math.floor(eta * scale))
    if y < 1:
        raise ResolutionTooCoarse(f"eta n^(1/alpha) = {eta * scale:.2f} < 1")
    x1 = max(1, int(round(scale / 32.0)))
    x2 = 2 * x1
    table = run_kernel(law, HALF_LE_0, [x1, x2], n, window=window, keep=[n])
    W = table.window
    vals = []
    for i, x in enumerate((x1, x2)):
        xn = x / scale
        vals.append(scale * table.values[n][i][y + W] / xn)
    est = 0.5 * (vals[0] + vals[1])
    spread = abs(vals[0] - vals[1]) / max(abs(est), 1e-300)
    return est, spread
