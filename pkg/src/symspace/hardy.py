"""The Hardy-type operator ``T`` on (0, 1) and the extremizer construction.

``(Tx)(t) = t^{-1/2} int_0^t x + int_t^1 x(s) s^{-1/2} ds`` has the kernel
``max(t, s)^{-1/2}``.  Inputs are :class:`Profile` objects: piecewise
``c * s^p * psi(s)^q``, which covers step functions (p = q = 0), the
extremizer ``y`` (q in {0, 1}) and ``x = t^{-1/2} y`` (p = -1/2).  All the
integrals needed below are of the form ``int s^r psi(s)^k ds`` with k <= 2 and
have closed forms in terms of exponential integrals.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq
from scipy.special import exp1, expi

from .spaces import PSI, SQRT, lorentz_norm
from .stepfn import StepFunction, decreasing_rearrangement

__all__ = [
    "Profile",
    "kernel",
    "apply_T",
    "integral_T",
    "hs_norm_T",
    "l2_norm_T",
    "weak_l2_quasinorm",
    "extremizer_y",
    "extremizer_x",
    "l2tol2_pointwise_check",
    "sup_cesaro_claim",
    "cesaro_indicator_lhs",
    "cesaro_indicator_paper_form",
    "T_mapping_bounds",
    "log_grid",
]

EIGHT_E = 8.0 * math.e


def log_grid(n: int = 1000, lo: float = 1e-8, hi: float = 1.0) -> np.ndarray:
    """``n`` log-spaced points strictly inside ``(lo, hi)``."""
    return np.logspace(math.log10(lo), math.log10(hi), n + 2)[1:-1]


def _psi(s):
    return 1.0 / (1.0 - np.log(s))


def _antiderivative(r, k, s):
    """An antiderivative of ``s^r psi(s)^k`` at ``s`` in (0, 1], k in {0, 1, 2}.

    Values at ``s = 0`` are the limits, ``-inf`` where the integral diverges.
    """
    r, k, s = np.broadcast_arrays(np.asarray(r, float), np.asarray(k, int), np.asarray(s, float))
    a = r + 1.0
    out = np.empty(s.shape)
    pos = s > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ls = np.log(np.where(pos, s, 1.0))
        w = 1.0 - ls
        sa = np.exp(a * ls)
        # k = 1: substitute w = 1 - log s
        f1 = np.where(
            a > 0,
            np.exp(a) * exp1(np.abs(a) * w),
            np.where(a < 0, -np.exp(a) * expi(-a * w), -np.log(w)),
        )
        f0 = np.where(a == 0, ls, sa / np.where(a == 0, 1.0, a))
        f2 = np.where(a == 0, 1.0 / w, sa / w - a * f1)
        val = np.where(k == 0, f0, np.where(k == 1, f1, f2))
    converges = (a > 0) | ((a == 0) & (k == 2))
    out[pos] = val[pos]
    out[~pos] = np.where(converges[~pos], 0.0, -np.inf)
    return out


class Profile:
    """Piecewise ``coef * s^power * psi(s)^logpower`` on ``(0, L)``, ``L <= 1``.

    Beyond ``L`` the profile vanishes.
    """

    __slots__ = ("breakpoints", "coef", "power", "logpower")

    def __init__(self, breakpoints, coef, power=None, logpower=None):
        b = np.asarray(breakpoints, dtype=float)
        c = np.asarray(coef, dtype=float)
        m = c.size
        p = np.zeros(m) if power is None else np.broadcast_to(np.asarray(power, float), (m,)).copy()
        q = np.zeros(m, int) if logpower is None else np.broadcast_to(np.asarray(logpower, int), (m,)).copy()
        if b.size != m + 1 or b[0] != 0.0 or np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must increase from 0 with one more entry than coef")
        if b[-1] > 1.0 + 1e-15:
            raise ValueError("profiles live on (0, 1)")
        if np.any(~np.isin(q, (0, 1))):
            raise ValueError("logpower must be 0 or 1")
        self.breakpoints, self.coef, self.power, self.logpower = b, c, p, q

    @classmethod
    def from_step(cls, f: StepFunction) -> "Profile":
        """The step function restricted to (0, 1)."""
        g = f.restricted(1.0) if f.L > 1.0 else f
        return cls(g.breakpoints, g.values)

    @classmethod
    def psi(cls, scale: float = 1.0) -> "Profile":
        return cls([0.0, 1.0], [scale], [0.0], [1])

    @classmethod
    def power_law(cls, p: float, scale: float = 1.0) -> "Profile":
        return cls([0.0, 1.0], [scale], [p], [0])

    @property
    def L(self) -> float:
        return float(self.breakpoints[-1])

    def __repr__(self):
        return f"Profile(pieces={self.coef.size}, L={self.L:g})"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0, self.coef.size - 1)
        inside = (t > 0) & (t < self.L)
        ts = np.where(inside, t, 0.5 * self.L)
        with np.errstate(divide="ignore"):
            val = self.coef[idx] * ts ** self.power[idx] * _psi(ts) ** self.logpower[idx]
        out = np.where(inside, val, 0.0)
        return out if out.ndim else float(out)

    def left_limits(self) -> np.ndarray:
        """Values approached from the left at ``breakpoints[1:]``."""
        b = self.breakpoints[1:]
        return self.coef * b**self.power * _psi(b) ** self.logpower

    def times_power(self, p: float) -> "Profile":
        """Multiply by ``s^p``."""
        return Profile(self.breakpoints, self.coef, self.power + p, self.logpower)

    def piece_moments(self, extra_power: float = 0.0, square: bool = False) -> np.ndarray:
        """``int`` over each piece of the profile (or its square) times ``s^extra_power``."""
        c = self.coef**2 if square else self.coef
        r = (2 * self.power if square else self.power) + extra_power
        k = 2 * self.logpower if square else self.logpower
        lo = _antiderivative(r, k, self.breakpoints[:-1])
        hi = _antiderivative(r, k, self.breakpoints[1:])
        with np.errstate(invalid="ignore"):
            m = c * (hi - lo)
        return np.where(c == 0, 0.0, m)

    def integral(self) -> float:
        return float(np.sum(self.piece_moments()))

    def l2_norm(self) -> float:
        return math.sqrt(float(np.sum(self.piece_moments(square=True))))

    def weighted_l2_norm(self) -> float:
        """Norm in ``L_2((0, 1), dt/t)``."""
        return math.sqrt(float(np.sum(self.piece_moments(-1.0, square=True))))

    def is_nondecreasing(self, rtol: float = 1e-12) -> bool:
        """Each piece must be nondecreasing in s and jumps must go up."""
        c, p, q = self.coef, self.power, self.logpower
        flat = (c == 0) | ((p == 0) & (q == 0))
        rising = (c > 0) & (p == 0) & (q == 1)
        if not np.all(flat | rising):
            return False
        starts = self.coef * self.breakpoints[:-1] ** p * _psi(np.maximum(self.breakpoints[:-1], 1e-300)) ** q
        ends = self.left_limits()
        return bool(np.all(starts[1:] >= ends[:-1] - rtol * np.abs(ends[:-1])))


def _as_profile(x) -> Profile:
    if isinstance(x, Profile):
        return x
    if isinstance(x, StepFunction):
        return Profile.from_step(x)
    raise TypeError(f"expected Profile or StepFunction, got {type(x).__name__}")


def kernel(t, s):
    """``max(t, s)^{-1/2}``."""
    return np.maximum(t, s) ** -0.5


def apply_T(x, t_grid) -> np.ndarray:
    """Evaluate ``Tx`` at each ``t`` in (0, 1) by exact piece integration."""
    x = _as_profile(x)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0) or np.any(t >= 1):
        raise ValueError("T is evaluated on (0, 1) only")
    b = x.breakpoints
    m0 = x.piece_moments()
    mh = x.piece_moments(-0.5)
    prefix = np.concatenate(([0.0], np.cumsum(m0)))
    # suffix[i] = sum_{j > i} mh[j]; mh[0] may be infinite but is never summed
    tail = np.concatenate((np.cumsum(mh[:0:-1])[::-1], [0.0]))
    idx = np.searchsorted(b, t, side="right") - 1
    beyond = idx >= x.coef.size
    i = np.clip(idx, 0, x.coef.size - 1)
    c, p, q = x.coef[i], x.power[i], x.logpower[i]
    lo = np.where(beyond, b[-1], b[i])
    tt = np.where(beyond, b[-1], t)
    part0 = c * (_antiderivative(p, q, tt) - _antiderivative(p, q, lo))
    parth = c * (_antiderivative(p - 0.5, q, b[i + 1]) - _antiderivative(p - 0.5, q, tt))
    part0 = np.where(c == 0, 0.0, part0)
    parth = np.where(c == 0, 0.0, parth)
    head = np.where(beyond, prefix[-1], prefix[i] + part0)
    rest = np.where(beyond, 0.0, parth + tail[i])
    out = t**-0.5 * head + rest
    return out


def integral_T(x, t):
    """``int_0^t Tx`` for a step function ``x`` on (0, 1), vectorised over ``t``.

    Uses ``int_0^t Tx = 2 t^{1/2} X(t) - int_0^t s^{1/2} x + t int_t^1 x s^{-1/2}``
    with ``X(t) = int_0^t x``.
    """
    x = _as_profile(x)
    if not (np.all(x.power == 0) and np.all(x.logpower == 0)):
        raise ValueError("integral_T is implemented for step profiles")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t > 1):
        raise ValueError("t must lie in (0, 1]")
    b, c = x.breakpoints, x.coef

    def moment(fn):
        # int_0^t x * f' for an antiderivative fn of the weight
        pref = np.concatenate(([0.0], np.cumsum(c * (fn(b[1:]) - fn(b[:-1])))))
        tc = np.minimum(t, b[-1])
        i = np.clip(np.searchsorted(b, tc, side="right") - 1, 0, c.size - 1)
        return pref[i] + c[i] * (fn(tc) - fn(b[i])), pref[-1]

    X, _ = moment(lambda s: s)
    R, _ = moment(lambda s: s**1.5 / 1.5)
    H, H_total = moment(lambda s: 2.0 * np.sqrt(s))
    out = 2.0 * np.sqrt(t) * X - R + t * (H_total - H)
    return out if out.ndim else float(out)


def l2_norm_T(x: StepFunction) -> float:
    """``||Tx||_{L_2(0,1)}`` in closed form for a step function ``x``.

    On a piece ``(a, b)`` with value ``c``, ``Tx = alpha t^{-1/2} + beta + gamma t^{1/2}``
    with ``alpha = X(a) - c a``, ``beta = int_b^1 x s^{-1/2} + 2 c b^{1/2}`` and
    ``gamma = -c``; the square integrates term by term.  ``alpha`` vanishes
    on the first piece, so no logarithm at 0 is needed.
    """
    x = x.restricted(1.0) if x.L > 1.0 else x
    if x.L < 1.0:
        x = x.extended(1.0)
    a, b, c = x.breakpoints[:-1], x.breakpoints[1:], x.values
    ra, rb = np.sqrt(a), np.sqrt(b)
    X = np.concatenate(([0.0], np.cumsum(c * (b - a))))[:-1]
    mh = 2.0 * c * (rb - ra)
    Q = np.concatenate((np.cumsum(mh[::-1])[::-1][1:], [0.0]))
    alpha, beta, gamma = X - c * a, Q + 2.0 * c * rb, -c
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(alpha != 0, alpha**2 * np.log(b / np.where(a > 0, a, 1.0)), 0.0)
    sq = (logs + beta**2 * (b - a) + gamma**2 * (b**2 - a**2) / 2.0
          + 4.0 * alpha * beta * (rb - ra) + 2.0 * alpha * gamma * (b - a)
          + 4.0 / 3.0 * beta * gamma * (b * rb - a * ra))
    return math.sqrt(max(float(np.sum(sq)), 0.0))


def hs_norm_T() -> float:
    """``(int int max(t, s)^{-1} ds dt)^{1/2}``.

    The inner integral is ``t * t^{-1} + int_t^1 ds/s = 1 + log(1/t)``, whose
    integral over (0, 1) is 2.
    """
    # antiderivative of 1 - log t is 2t - t log t, which vanishes at 0+
    anti = lambda t: 2.0 * t - (t * math.log(t) if t > 0 else 0.0)
    return math.sqrt(anti(1.0) - anti(0.0))


def weak_l2_quasinorm(f: StepFunction) -> float:
    """``sup_t t^{1/2} mu(t, f)``; on a step profile the sup sits at right ends."""
    mu = decreasing_rearrangement(f)
    return float(np.max(np.sqrt(mu.breakpoints[1:]) * mu.values))


# ---------------------------------------------------------------------------
# extremizer


def _check_decreasing(z: StepFunction) -> StepFunction:
    if np.any(z.values < 0) or not z.is_nonincreasing():
        raise ValueError("z must be nonnegative and nonincreasing (z = mu(z))")
    return z.restricted(1.0) if z.L != 1.0 else z


def extremizer_y(z: StepFunction) -> Profile:
    """``y(t) = sup_{0<s<t} psi(s) z(s)`` for decreasing ``z`` on (0, 1).

    On a piece with value ``z_i`` the candidate ``z_i psi(t)`` competes with the
    running maximum ``K`` of earlier pieces; they cross at ``psi^{-1}(K/z_i)``.
    """
    z = _check_decreasing(z)
    b, v = z.breakpoints, z.values
    pts, coef, logp = [0.0], [], []
    K = 0.0
    for i in range(v.size):
        lo, hi, zi = b[i], b[i + 1], v[i]
        if zi <= 0 or K >= zi:
            cross = hi
        elif K == 0:
            cross = lo
        else:
            cross = min(max(math.exp(1.0 - zi / K), lo), hi)
        if cross > lo:
            pts.append(cross)
            coef.append(K)
            logp.append(0)
        if cross < hi:
            pts.append(hi)
            coef.append(zi)
            logp.append(1)
        K = max(K, zi * float(_psi(hi)))
    return Profile(pts, coef, 0.0, logp)


class Extremizer(NamedTuple):
    x: Profile
    y: Profile
    l2_norm: float
    bound: float
    pointwise_ok: bool
    pointwise_margin: float


def lambda2_psi_norm(z: StepFunction) -> float:
    """``||z||_{Lambda_psi^(2)} = || |z|^2 ||_{Lambda_psi}^{1/2}``."""
    return math.sqrt(lorentz_norm(z.map(np.square), PSI))


def extremizer_x(z: StepFunction, t_grid=None, tol: float = 1e-9) -> Extremizer:
    """``x = t^{-1/2} y`` together with the two certified inequalities.

    ``pointwise_ok`` tests ``Tx >= mu(z) / (8e)`` on ``t_grid``; since the
    kernel of T decreases in s, ``T mu(x) >= Tx`` for ``x >= 0``, so this
    certifies the bound for ``T mu(x)`` as well.
    """
    y = extremizer_y(z)
    x = y.times_power(-0.5)
    t = log_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if y.coef.size and np.all(y.coef == 0):
        margin = 0.0
    else:
        margin = float(np.min(apply_T(x, t) - z(t) / EIGHT_E))
    return Extremizer(
        x=x,
        y=y,
        l2_norm=y.weighted_l2_norm(),
        bound=math.sqrt(3.0) * lambda2_psi_norm(z),
        pointwise_ok=margin >= -tol,
        pointwise_margin=margin,
    )


def l2tol2_pointwise_check(y, t_grid=None) -> float:
    """``min_t psi(t) (Tx)(t) - y(t/2) / (4e)`` with ``x = t^{-1/2} y``."""
    y = _as_profile(y)
    if not y.is_nondecreasing() or np.any(y.coef < 0):
        raise ValueError("y must be nonnegative and nondecreasing")
    t = log_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    x = y.times_power(-0.5)
    return float(np.min(_psi(t) * apply_T(x, t) - y(t / 2.0) / (4.0 * math.e)))


# ---------------------------------------------------------------------------
# the Cesaro claim


class ClaimValues(NamedTuple):
    lhs: float
    rhs: float


def _int_psi2_over_t2(a, b):
    return float(_antiderivative(-2.0, 2, b) - _antiderivative(-2.0, 2, a))


def sup_cesaro_claim(w: StepFunction) -> ClaimValues:
    """``lhs = int_0^1 sup_{s<t} psi^2(s) (C mu(w))(s) dt/t`` and ``rhs = 3 ||w||_{Lambda_psi}``.

    On a piece of ``mu(w)`` with value ``c`` and ``int_0^s mu(w) = A + c s``
    the inner function is ``h(s) = psi^2(s) (A/s + c)`` whose derivative has
    the sign of ``A (2 psi - 1) + 2 c s psi``, an increasing function; so ``h``
    falls then rises, and the running supremum is ``max(K, h)``.
    """
    if np.any(w.values < 0):
        raise ValueError("w must be nonnegative")
    w1 = w.restricted(1.0) if w.L != 1.0 else w
    rhs = 3.0 * lorentz_norm(w1, PSI)
    mu = decreasing_rearrangement(w1)
    b, v = mu.breakpoints, mu.values
    cum = mu.cumulative(b)
    lhs = 0.0
    K = 0.0
    for j in range(v.size):
        lo, hi, c = float(b[j]), float(b[j + 1]), float(v[j])
        A = float(cum[j]) - c * lo
        if j == 0:
            # A = 0: h = c psi^2 increases from 0
            lhs += c * float(_psi(hi))
            K = c * float(_psi(hi)) ** 2
            continue
        h = lambda s, A=A, c=c: float(_psi(s)) ** 2 * (A / s + c)
        slope = lambda s, A=A, c=c: A * (2 * float(_psi(s)) - 1) + 2 * c * s * float(_psi(s))
        if slope(lo) >= 0:
            smin = lo
        elif slope(hi) <= 0:
            smin = hi
        else:
            smin = brentq(slope, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
        h_hi = h(hi)
        if h_hi <= K:
            lhs += K * math.log(hi / lo)
            continue
        root = lo if h(smin) >= K else brentq(lambda s: h(s) - K, smin, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
        lhs += K * math.log(root / lo)
        lhs += A * _int_psi2_over_t2(root, hi) + c * (float(_psi(hi)) - float(_psi(root)))
        K = h_hi
    return ClaimValues(lhs, rhs)


def cesaro_indicator_lhs(u: float) -> float:
    """Closed form of the claim's left side for ``w = chi_(0,u)``.

    The running supremum is ``psi^2(t)`` on (0, u) and
    ``max(psi^2(u), sup_{u<s<t} u psi^2(s)/s)`` beyond.
    """
    if not 0 < u < 1:
        raise ValueError("u must lie in (0, 1)")
    psi_u = float(_psi(u))
    if u >= 1.0 / math.e:
        return psi_u + u * _int_psi2_over_t2(u, 1.0)
    # s^{-1} psi^2(s) decreases to e/4 at 1/e, then rises; it regains the value
    # at u at a point r in (1/e, 1) if that happens before 1
    g = lambda s: float(_psi(s)) ** 2 / s
    total = psi_u
    if g(1.0) <= g(u):
        return total + psi_u**2 * math.log(1.0 / u)
    r = brentq(lambda s: g(s) - g(u), 1.0 / math.e, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return total + psi_u**2 * math.log(r / u) + u * _int_psi2_over_t2(r, 1.0)


def cesaro_indicator_paper_form(u: float) -> float:
    """The closed forms as printed for indicators ``chi_(0,u)``."""
    psi_u = float(_psi(u))
    if u > 1.0 / math.e:
        return psi_u + psi_u**2 * math.log(1.0 / u)
    return psi_u + psi_u**2 * math.log(1.0 / (math.e * u)) + max(psi_u**2, math.e * u / 4.0)


# ---------------------------------------------------------------------------
# mapping bounds


class MappingBounds(NamedTuple):
    norm_L21_to_Linf: float
    exp_bound_ok: bool
    empirical_L2_to_Lambda2: float
    equality_gap: float


def _sup_T(x: StepFunction) -> float:
    """``sup |Tx|``; for ``x >= 0`` Tx decreases and the sup is ``int x s^{-1/2}``."""
    xs = x.restricted(1.0) if x.L > 1.0 else x
    if np.all(xs.values >= 0):
        b = xs.breakpoints
        return float(np.dot(xs.values, 2.0 * (np.sqrt(b[1:]) - np.sqrt(b[:-1]))))
    return float(np.max(np.abs(apply_T(xs, log_grid(4000, 1e-14)))))


def _lambda2_of_T(x: StepFunction, n: int = 4000, lo: float = 1e-14) -> float:
    """``||Tx||_{Lambda_psi^(2)}`` for ``x >= 0`` by quadrature in log t.

    ``Tx`` is nonincreasing, so it is its own rearrangement and the norm
    squared is ``int (Tx)^2 psi^2 dt/t``; below ``lo`` the integrand is
    bounded by ``sup (Tx)^2 psi^2 / t``, whose integral is ``sup(Tx)^2 psi(lo)``.
    """
    t = np.logspace(math.log10(lo), 0.0, n)[:-1]
    f = apply_T(x, t) ** 2 * _psi(t) ** 2
    body = float(trapezoid(f, np.log(t)))
    return math.sqrt(body + _sup_T(x) ** 2 * float(_psi(lo)))


def T_mapping_bounds(probes, t_grid=None, power_probe: StepFunction | None = None) -> MappingBounds:
    """Empirical mapping constants of T over nonnegative step ``probes``.

    The pointwise exponential bound uses ``sup_t t^{1/2} mu(t, x)`` as the
    ``L_{2,inf}`` quasi-norm.  ``equality_gap`` measures, for the step
    approximant ``power_probe`` of ``s^{-1/2}``, how far ``Tx`` sits below
    ``log(e^2/t)`` relative to the bound.
    """
    t = log_grid(1000, 1e-6) if t_grid is None else np.asarray(t_grid, dtype=float)
    envelope = np.log(math.e**2 / t)
    ratio_inf, ratio_l2, ok = 0.0, 0.0, True
    for x in probes:
        l21 = lorentz_norm(x, SQRT)
        if l21 == 0:
            continue
        ratio_inf = max(ratio_inf, _sup_T(x) / l21)
        tx = apply_T(x, t)
        ok &= bool(np.all(np.abs(tx) <= weak_l2_quasinorm(x) * envelope * (1 + 1e-12)))
        ratio_l2 = max(ratio_l2, _lambda2_of_T(x) / x.restricted(1.0).lp_norm(2))
    gap = math.nan
    if power_probe is not None:
        tx = apply_T(power_probe, t)
        bound = weak_l2_quasinorm(power_probe) * envelope
        ok &= bool(np.all(tx <= bound * (1 + 1e-12)))
        gap = float(np.max(1.0 - tx / bound))
    return MappingBounds(ratio_inf, bool(ok), ratio_l2, gap)
