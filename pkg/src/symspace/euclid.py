"""Macdonald kernel ``g = c_d r^{-d/4} K_{d/4}(r)`` and Sobolev-type checks on R^d.

R^d is replaced by a periodic box ``[-L, L]^d`` (see :mod:`symspace.grid`);
``(1 - Delta)^{-alpha}`` acts there as the Fourier multiplier
``(1 + |xi|^2)^{-alpha}``.  Inputs of the checks are supported well inside the
box and ``g`` decays like ``e^{-r}``, so wrap-around is negligible for the
default ``L = 16``.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import BoxField, BoxGrid
from .hardy import apply_T, integral_T
from .spaces import SQRT, marcinkiewicz_norm
from .stepfn import RadialMap, StepFunction, empirical_rearrangement, radial_lift

__all__ = [
    "bessel_K",
    "MacdonaldKernel",
    "kernel_normalize",
    "kernel_lower_constant",
    "kernel_mixed_norm",
    "kernel_rearrangement",
    "bessel_potential_apply",
    "oneil_check",
    "distributional_sobolev_check",
    "estimate_from_below_check",
    "write_kernel_profile",
    "CheckResult",
    "gaussian_mixture",
    "below_constant",
    "block_average",
]

_LOG_CUT = math.log(1e18)


def bessel_K(nu: float, r, rtol: float = 1e-13, max_level: int = 18):
    """Modified Bessel function of the second kind ``K_nu(r)`` for ``r > 0``.

    Uses ``K_nu(r) = int_0^inf exp(-r cosh u) cosh(nu u) du``.  The scaled
    integrand ``exp(-r (cosh u - 1)) cosh(nu u)`` is cut where it drops below
    1e-18; on ``[0, U]`` the even, rapidly decaying integrand makes the
    trapezoid rule converge geometrically, so the step is halved until two
    levels agree to ``rtol``.
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(~(r_arr > 0)):
        raise ValueError("K_nu(r) needs r > 0")
    if nu < 0:
        nu = -nu
    # fixed point for r (cosh U - 1) - nu U = log 1e18
    U = np.arccosh(1.0 + _LOG_CUT / r_arr)
    for _ in range(6):
        U = np.arccosh(1.0 + (_LOG_CUT + nu * U) / r_arr)
    U = U[:, None]
    rr = r_arr[:, None]

    def f(v):
        u = U * v
        return np.exp(-rr * (np.cosh(u) - 1.0) + nu * u) * 0.5 * (1.0 + np.exp(-2.0 * nu * u))

    n = 16
    v = np.linspace(0.0, 1.0, n + 1)
    vals = f(v)
    total = vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1])
    est = total / n
    for _ in range(max_level):
        mid = (np.arange(n) + 0.5) / n
        total = total + f(mid).sum(axis=1)
        n *= 2
        new = total / n
        done = np.all(np.abs(new - est) <= rtol * np.abs(new))
        est = new
        if done:
            break
    out = est * U[:, 0] * np.exp(-r_arr)
    return out if np.ndim(r) else float(out[0])


def _small_r_coefficient(nu: float) -> float:
    """``K_nu(r) ~ C r^{-nu}`` as ``r -> 0`` for ``nu > 0``: ``C = Gamma(nu) 2^{nu-1}``."""
    return math.gamma(nu) * 2.0 ** (nu - 1.0)


@functools.lru_cache(maxsize=None)
def _radial_table(d: int, r_min: float = 1e-12, r_max: float = 60.0, panels: int = 1200, order: int = 8):
    """Radii and cumulative mass ``surface * int_0^R r^{d-1} r^{-nu} K_nu(r) dr``.

    Composite Gauss-Legendre in ``log r``; the mass below ``r_min`` uses the
    small-argument law.
    """
    nu = d / 4.0
    surf = RadialMap(d).surface
    edges = np.geomspace(r_min, r_max, panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    le = np.log(edges)
    half = 0.5 * np.diff(le)
    nodes = (0.5 * (le[:-1] + le[1:]))[:, None] + half[:, None] * x[None, :]
    rn = np.exp(nodes)
    vals = rn ** (d - nu) * bessel_K(nu, rn.ravel()).reshape(rn.shape)
    panel_mass = surf * half * (vals @ w)
    tail = surf * _small_r_coefficient(nu) * r_min ** (d - 2 * nu) / (d - 2 * nu)
    cum = tail + np.concatenate(([0.0], np.cumsum(panel_mass)))
    return edges, cum


def kernel_normalize(d: int) -> float:
    """``c_d`` making ``int_{R^d} g = 1``."""
    if d not in (1, 2, 3, 4):
        raise ValueError("kernel profiles are supported for d in {1, 2, 3, 4}")
    _, cum = _radial_table(d)
    return 1.0 / float(cum[-1])


@dataclass(frozen=True)
class MacdonaldKernel:
    """``g(r) = c_d r^{-d/4} K_{d/4}(r)``."""

    d: int

    @property
    def nu(self) -> float:
        return self.d / 4.0

    @property
    def c(self) -> float:
        return kernel_normalize(self.d)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.c * r ** (-self.nu) * bessel_K(self.nu, r)

    def mass_within(self, R):
        """``int_{|t| < R} g`` by the radial table (linear in log r between edges)."""
        edges, cum = _radial_table(self.d)
        return self.c * np.interp(np.log(R), np.log(edges), cum, left=0.0)

    def cell_averages_1d(self, grid: BoxGrid) -> np.ndarray:
        """Exact cell averages of ``g`` on a one-dimensional periodic grid, in FFT order."""
        if grid.d != 1:
            raise ValueError("cell averages are implemented for d = 1")
        k = np.fft.fftfreq(grid.n, 1.0 / grid.n)
        lo = np.maximum(np.abs(k) - 0.5, 0.0) * grid.h
        hi = (np.abs(k) + 0.5) * grid.h
        full = self.mass_within(hi)
        inner = np.where(lo > 0, self.mass_within(np.maximum(lo, 1e-300)), 0.0)
        # mass_within counts both sides of 0
        part = np.where(k == 0, full, 0.5 * (full - inner))
        return part / grid.h


def kernel_lower_constant(d: int, points: int = 2000) -> float:
    """``inf_{0<r<=2} g(r) r^{d/2}`` on a log grid."""
    g = MacdonaldKernel(d)
    r = np.geomspace(1e-6, 2.0, points)
    return float(np.min(g(r) * r ** (d / 2.0)))


def kernel_rearrangement(d: int) -> StepFunction:
    """``mu(g)`` as a step function with exact cell averages.

    ``g`` is radial and decreasing, so ``mu(g)(s) = g((s / omega_d)^{1/d})`` and
    ``int_0^s mu(g)`` is the mass of the ball of volume ``s``; cells follow the
    radial table.
    """
    edges, cum = _radial_table(d)
    c = kernel_normalize(d)
    omega = RadialMap(d).omega
    s = omega * edges**d
    b = np.concatenate(([0.0], s))
    mass = c * cum
    vals = np.diff(np.concatenate(([0.0], mass))) / np.diff(b)
    return StepFunction(b, vals)


def kernel_mixed_norm(d: int) -> float:
    """``max(||g||_{2,inf}, ||g||_1)`` from the rearrangement of ``g``."""
    mu = kernel_rearrangement(d)
    return max(marcinkiewicz_norm(mu, SQRT), mu.integral())


def write_kernel_profile(path, d: int, r=None) -> None:
    g = MacdonaldKernel(d)
    r = np.geomspace(1e-4, 40.0, 400) if r is None else np.asarray(r, dtype=float)
    vals = g(r)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "g(r)"])
        for a, b in zip(r, vals):
            w.writerow([f"{a:.17g}", f"{b:.17g}"])


# ---------------------------------------------------------------------------
# fields


def bessel_potential_apply(x: BoxField, alpha: float) -> BoxField:
    """``(1 - Delta)^{-alpha} x`` as the box Fourier multiplier."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    mult = (1.0 + x.grid.frequencies()) ** (-alpha)
    out = np.fft.ifftn(np.fft.fftn(x.values) * mult)
    if np.isrealobj(x.values):
        out = out.real
    return BoxField(x.grid, out)


def block_average(x: BoxField) -> BoxField:
    """The field on the grid with half as many cells per axis."""
    g = x.grid.coarsened()
    v = x.values
    for ax in range(x.grid.d):
        shape = list(v.shape)
        shape[ax : ax + 1] = [g.n, 2]
        v = v.reshape(shape).mean(axis=ax + 1)
    return BoxField(g, v)


class CheckResult(NamedTuple):
    status: str  # pass | fail | inconclusive
    margin: float
    margin_coarse: float
    worst_deficit: float
    worst_t: float
    constant: float


def _unit_rearrangement(values: np.ndarray, cell: float) -> StepFunction:
    """``mu(x) chi_(0,1)`` from cell samples."""
    mu = empirical_rearrangement(values, cell)
    if mu.L < 1.0:
        return mu.extended(1.0)
    return mu.restricted(1.0)


def _submajorization_margin(x: BoxField, d: int, constant: float, intermediate: bool):
    """Relative slack of ``int_0^t mu(x*g) <= constant * RHS(t)`` at ``t = k h^d <= 1``."""
    y = bessel_potential_apply(x, d / 4.0)
    cell = x.grid.cell_measure
    a = np.sort(np.abs(y.values).ravel())[::-1]
    k = int(math.floor(1.0 / cell + 1e-9))
    t = cell * np.arange(1, k + 1)
    lhs = np.cumsum(a[:k]) * cell
    mux = _unit_rearrangement(x.values, cell)
    if intermediate:
        # F(t) = t^{1/2} int_0^t mu + t int_t^1 mu s^{-1/2} + t mu(1)
        mu_full = empirical_rearrangement(x.values, cell)
        b = mux.breakpoints
        head = mux.cumulative(t)
        w = 2.0 * (np.sqrt(b[1:]) - np.sqrt(b[:-1]))
        weighted = np.concatenate(([0.0], np.cumsum(mux.values * w)))
        idx = np.clip(np.searchsorted(b, t, side="right") - 1, 0, mux.npieces - 1)
        upto = weighted[idx] + mux.values[idx] * 2.0 * (np.sqrt(t) - np.sqrt(b[idx]))
        tail = weighted[-1] - upto
        rhs = np.sqrt(t) * head + t * tail + t * float(mu_full(1.0))
    else:
        rhs = integral_T(mux, t)
    rhs = constant * rhs
    with np.errstate(divide="ignore", invalid="ignore"):
        slack = np.where(rhs > 0, (rhs - lhs) / rhs, np.where(lhs > 0, -np.inf, 0.0))
    i = int(np.argmin(slack))
    return float(slack[i]), float(lhs[i] - rhs[i]), float(t[i])


def _status(margin: float, coarse: float, stable_rel: float, tol: float) -> str:
    if margin < -tol:
        return "fail"
    if abs(margin - coarse) > stable_rel * max(abs(margin), 1e-12):
        return "inconclusive"
    return "pass"


def oneil_check(x: BoxField, d: int | None = None, stable_rel: float = 0.05, tol: float = 1e-12,
                intermediate: bool = True) -> CheckResult:
    """Submajorization ``mu(x*g) chi_(0,1) << 4 ||g|| T(mu(x) chi_(0,1))``.

    With ``intermediate`` the bound ``int_0^t mu(x*g) <= 2 ||g|| F(t)`` is
    checked too and the reported margin is the smaller of the two.  Both are
    recomputed on the grid with half the resolution; a relative change of
    the margin above ``stable_rel`` makes the result inconclusive.
    """
    d = x.grid.d if d is None else d
    if d != x.grid.d:
        raise ValueError("dimension mismatch")
    if not np.any(x.values):
        return CheckResult("pass", 0.0, 0.0, 0.0, 0.0, 4.0 * kernel_mixed_norm(d))
    norm = kernel_mixed_norm(d)

    def run(field):
        m, dfc, tw = _submajorization_margin(field, d, 4.0 * norm, False)
        if intermediate:
            m2, dfc2, tw2 = _submajorization_margin(field, d, 2.0 * norm, True)
            if m2 < m:
                m, dfc, tw = m2, dfc2, tw2
        return m, dfc, tw

    m, dfc, tw = run(x)
    mc, _, _ = run(block_average(x))
    return CheckResult(_status(m, mc, stable_rel, tol), m, mc, dfc, tw, 4.0 * norm)


def distributional_sobolev_check(x: BoxField, d: int | None = None, stable_rel: float = 0.05,
                                 tol: float = 1e-12) -> CheckResult:
    """``mu((1-Delta)^{-d/4} x) chi_(0,1) << c_d T(mu(x) chi_(0,1))`` with ``c_d = 4 ||g||``."""
    return oneil_check(x, d, stable_rel, tol, intermediate=False)


def below_constant(d: int) -> float:
    """``(1/d) 2^{-d/2} c'_d |S^{d-1}|``."""
    return 2.0 ** (-d / 2.0) * kernel_lower_constant(d) * RadialMap(d).surface / d


def _below_margin(x: StepFunction, grid: BoxGrid, C: float) -> float:
    rmap = RadialMap(grid.d)
    reach = (grid.L * math.sqrt(grid.d)) ** grid.d
    xe = x.extended(reach) if x.L < reach else x
    field = BoxField(grid, radial_lift(xe, rmap, grid))
    u = bessel_potential_apply(field, grid.d / 4.0).values
    r = rmap(grid.centers())
    inside = (r < 1.0) & (r > 0)
    tx = apply_T(x.restricted(1.0), r[inside])
    ratio = u[inside] / (C * tx)
    return float(np.min(ratio)) - 1.0


def estimate_from_below_check(x: StepFunction, d: int, n: int | None = None, L: float = 16.0,
                              allowance: float = 0.02, stable_rel: float = 0.05) -> CheckResult:
    """Pointwise ``(1-Delta)^{-d/4}(x o r_d)(t) >= C (Tx)(|t|^d)`` for ``|t| < 1``.

    ``x`` is decreasing on (0, 1).  The margin is ``min u / (C Tx) - 1``;
    the check passes when it is at least ``-allowance``, and is inconclusive
    when ``1 + margin`` moves by more than ``stable_rel`` at half resolution.
    """
    if np.any(x.values < 0) or not x.is_nonincreasing():
        raise ValueError("x must be nonnegative and nonincreasing")
    C = below_constant(d)
    if not np.any(x.restricted(1.0).values):
        return CheckResult("pass", math.inf, math.inf, 0.0, 0.0, C)
    n = (2**14 if d == 1 else 1024) if n is None else n
    grid = BoxGrid(d, L, n)
    m = _below_margin(x, grid, C)
    mc = _below_margin(x, grid.coarsened(), C)
    if m < -allowance:
        status = "fail"
    elif abs((1 + m) - (1 + mc)) > stable_rel * (1 + m):
        status = "inconclusive"
    else:
        status = "pass"
    return CheckResult(status, m, mc, 0.0, 0.0, C)


def gaussian_mixture(rng: np.random.Generator, grid: BoxGrid, bumps: int = 4) -> BoxField:
    """Random smooth field: signed Gaussian bumps centred in the unit ball."""
    pts = grid.centers()
    out = np.zeros(grid.shape)
    for _ in range(bumps):
        c = rng.uniform(-0.7, 0.7, grid.d)
        width = rng.uniform(0.05, 0.3)
        amp = rng.standard_normal()
        out += amp * np.exp(-np.sum((pts - c) ** 2, axis=-1) / (2 * width**2))
    return BoxField(grid, out)
