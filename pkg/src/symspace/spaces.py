"""Norms of symmetric function spaces evaluated exactly on step functions.

Lorentz and Marcinkiewicz norms are driven by a :class:`ConcaveWeight`,
Orlicz (Luxemburg) norms by an :class:`OrliczFunction`.  Every norm only looks
at the decreasing rearrangement, which for a step function is again a step
function, so the Lorentz norm is a finite Stieltjes sum and the Marcinkiewicz
supremum reduces to a maximisation over finitely many pieces.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import lambertw

from .stepfn import StepFunction, decreasing_rearrangement

__all__ = [
    "ConcaveWeight",
    "OrliczFunction",
    "Norm",
    "PSI",
    "PHI",
    "SQRT",
    "ORLICZ_M",
    "ORLICZ_G",
    "ORLICZ_L1",
    "lorentz_norm",
    "marcinkiewicz_norm",
    "orlicz_norm",
    "modular",
    "lpq_norms",
    "convexify2_norm",
    "fundamental_function",
    "get_norm",
    "kfunctional_mphi_linfty",
    "orlicz_containment_gate",
    "equivalence_ratio",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class ConcaveWeight:
    """Concave nondecreasing weight ``w`` on ``[0, inf)`` with ``w(0) = 0``.

    ``ratio_peaks(A, c, lo, hi)`` may be supplied to return the interior local
    maxima of ``(A + c t) / w(t)`` on ``(lo, hi)``; without it the maximum on a
    piece is located by golden-section search.
    """

    label: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray] | None = None
    ratio_peaks: Callable | None = field(default=None, repr=False)
    kinks: tuple[float, ...] = ()

    def __call__(self, t):
        return self.evaluate(t)

    def stieltjes_mass(self, a, b):
        """``int_a^b dw``; the weights are continuous so this is a difference."""
        return self.evaluate(np.asarray(b, dtype=float)) - self.evaluate(np.asarray(a, dtype=float))


def _psi(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        small = 1.0 / (1.0 - np.log(np.where(t > 0, np.minimum(t, 1.0), 1.0)))
    out = np.where(t >= 1.0, t, np.where(t > 0, small, 0.0))
    return out if out.ndim else float(out)


def _psi_inverse(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        small = np.exp(1.0 - 1.0 / np.where(y > 0, np.minimum(y, 1.0), 1.0))
    out = np.where(y >= 1.0, y, np.where(y > 0, small, 0.0))
    return out if out.ndim else float(out)


def _psi_peaks(A, c, lo, hi):
    # d/dt[(A + c t)(1 - log t)] = -c log t - A / t vanishes where t log t = -A/c;
    # the root above 1/e is the local maximum.
    if c <= 0 or hi <= lo:
        return []
    kappa = A / c
    if kappa > 1.0 / math.e:
        return []
    t = math.exp(float(np.real(lambertw(-kappa, 0))))
    return [t] if lo < t < min(hi, 1.0) else []


def _phi(t):
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, np.minimum(t, 1.0), 1.0)
    out = np.where(t >= 1.0, 1.0, np.where(t > 0, safe * (1.0 - np.log(safe)), 0.0))
    return out if out.ndim else float(out)


def _sqrt(t):
    return np.sqrt(np.maximum(t, 0.0))


PSI = ConcaveWeight("psi", _psi, _psi_inverse, _psi_peaks, kinks=(1.0,))
# phi'(1) = 0, so the constant continuation past 1 keeps it concave
PHI = ConcaveWeight("phi", _phi, None, lambda A, c, lo, hi: [], kinks=(1.0,))
SQRT = ConcaveWeight("sqrt", _sqrt, np.square, lambda A, c, lo, hi: [])


def phi_derivative(t):
    """``phi'(t) = log(1/t)`` on ``(0, 1)``."""
    return -np.log(t)


# ---------------------------------------------------------------------------
# Orlicz functions


class OrliczFunction:
    """Convex ``N`` on ``[0, inf)`` with ``N(0) = 0``."""

    def __init__(self, label: str, evaluate: Callable[[np.ndarray], np.ndarray]):
        self.label = label
        self._evaluate = evaluate

    def __repr__(self):
        return f"OrliczFunction({self.label!r})"

    def __call__(self, t):
        with np.errstate(over="ignore"):
            return self._evaluate(np.asarray(t, dtype=float))

    def inverse(self, y, iterations: int = 200):
        """``N^{-1}(y) = sup{t : N(t) <= y}`` by vectorised bisection."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        lo = np.zeros_like(y)
        hi = np.ones_like(y)
        grow = self(hi) <= y
        while np.any(grow):
            hi = np.where(grow, 2.0 * hi, hi)
            grow = self(hi) <= y
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if np.all((mid <= lo) | (mid >= hi)):
                break
            below = self(mid) <= y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = np.where(y > 0, 0.5 * (lo + hi), 0.0)
        return out if out.size > 1 else float(out[0])

    def check_convex(self, upto: float = 1e4, points: int = 4001, rtol: float = 1e-9) -> None:
        """Raise ``ValueError`` unless N(0) = 0 and N is convex on a dense grid."""
        if abs(float(self(0.0))) > 0:
            raise ValueError(f"{self.label}: N(0) must vanish")
        for hi in (1.0, upto):
            t = np.linspace(0.0, hi, points)
            v = self(t)
            v = v[np.isfinite(v)]
            if np.any(np.diff(v) < -rtol * np.abs(v[1:])):
                raise ValueError(f"{self.label}: not nondecreasing")
            second = v[2:] - 2 * v[1:-1] + v[:-2]
            if np.any(second < -rtol * np.maximum(np.abs(v[1:-1]), 1e-300)):
                raise ValueError(f"{self.label}: not convex")

    @classmethod
    def from_csv(cls, path) -> "OrliczFunction":
        """Piecewise-linear Orlicz function from a ``t,N(t)`` table.

        The last slope is continued linearly; the table must start at (0, 0)
        and have nondecreasing slopes.
        """
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if [c.strip() for c in rows[0]] != ["t", "N(t)"]:
            raise ValueError(f"{path}: expected header 't,N(t)'")
        tab = np.array([[float(a), float(b)] for a, b in rows[1:]])
        t, n = tab[:, 0], tab[:, 1]
        if t[0] != 0 or n[0] != 0:
            raise ValueError(f"{path}: table must start at (0, 0)")
        if np.any(np.diff(t) <= 0):
            raise ValueError(f"{path}: t column must be strictly increasing")
        slopes = np.diff(n) / np.diff(t)
        if np.any(slopes < 0) or np.any(np.diff(slopes) < -1e-12 * np.abs(slopes[1:])):
            raise ValueError(f"{path}: table is not monotone convex")

        def evaluate(x):
            inside = np.interp(x, t, n)
            return np.where(x > t[-1], n[-1] + slopes[-1] * (x - t[-1]), inside)

        return cls(f"file={path}", evaluate)


ORLICZ_M = OrliczFunction("M", lambda t: t * np.log(np.e + t))
ORLICZ_G = OrliczFunction("G", np.expm1)
ORLICZ_L1 = OrliczFunction("L1", lambda t: t)


# ---------------------------------------------------------------------------
# norms


def lorentz_norm(f: StepFunction, w: ConcaveWeight) -> float:
    mu = decreasing_rearrangement(f)
    b = mu.breakpoints
    return float(np.dot(mu.values, w.stieltjes_mass(b[:-1], b[1:])))


def _golden_max(fn, lo, hi, iterations=120):
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iterations):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
        if b - a <= 1e-15 * max(abs(b), 1e-300):
            break
    return max(f1, f2)


def marcinkiewicz_norm(f: StepFunction, w: ConcaveWeight) -> float:
    """``sup_t (1/w(t)) int_0^t mu(f)``.

    On a piece of ``mu(f)`` with value ``c`` the numerator is ``A + c t``;
    the supremum is taken over the piece endpoints and the interior peaks
    of the ratio.
    """
    mu = decreasing_rearrangement(f)
    kinks = [k for k in w.kinks if 0 < k < mu.L]
    if kinks:
        mu = mu.refined(kinks)
    b = mu.breakpoints
    c = mu.values
    cum = mu.cumulative(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        ends = np.where(w(b[1:]) > 0, cum[1:] / w(b[1:]), 0.0)
    best = float(np.max(ends)) if ends.size else 0.0
    A = cum[:-1] - c * b[:-1]
    for i in range(c.size):
        lo, hi = b[i], b[i + 1]
        if w.ratio_peaks is not None:
            cands = w.ratio_peaks(A[i], c[i], lo, hi)
            for t in cands:
                best = max(best, (A[i] + c[i] * t) / float(w(t)))
        else:
            lo_eff = lo if lo > 0 else hi * 1e-12
            ratio = lambda t, i=i: (A[i] + c[i] * t) / float(w(t))
            best = max(best, _golden_max(ratio, lo_eff, hi))
    return float(best)


def modular(f: StepFunction, N: OrliczFunction, lam: float) -> float:
    """``int N(|f| / lam)``."""
    a = np.abs(f.values)
    with np.errstate(over="ignore"):
        return float(np.dot(N(a / lam), f.widths))


def orlicz_norm(f: StepFunction, N: OrliczFunction, iterations: int = 200) -> float:
    """Luxemburg norm ``inf{lam > 0 : int N(|f|/lam) <= 1}`` by bisection."""
    a = np.abs(f.values)
    sup = float(np.max(a))
    if sup == 0.0:
        return 0.0
    support = float(np.sum(f.widths[a > 0]))
    # ||f|| <= ||(sup|f|) chi_supp|| = sup / N^{-1}(1/|supp|): a feasible upper end
    hi = sup / float(N.inverse(1.0 / support))
    while modular(f, N, hi) > 1.0:
        hi *= 2.0
    lo = hi * 1e-3
    while modular(f, N, lo) <= 1.0:
        hi, lo = lo, lo / 2.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if modular(f, N, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


class LpqNorms(NamedTuple):
    l21: float
    l2inf: float
    l2inf_cap_l1: float


def lpq_norms(f: StepFunction) -> LpqNorms:
    l21 = lorentz_norm(f, SQRT)
    l2inf = marcinkiewicz_norm(f, SQRT)
    return LpqNorms(l21, l2inf, max(l2inf, f.lp_norm(1)))


@dataclass(frozen=True)
class Norm:
    """A named norm on step functions, addressable by string id."""

    name: str
    fn: Callable[[StepFunction], float] = field(repr=False)

    def __call__(self, f: StepFunction) -> float:
        return self.fn(f)


_WEIGHTS = {"psi": PSI, "phi": PHI, "sqrt": SQRT}
_ORLICZ = {"M": ORLICZ_M, "G": ORLICZ_G, "L1": ORLICZ_L1}


def get_norm(spec: "str | Norm") -> Norm:
    """Resolve ids like ``"lambda:psi"``, ``"marc:phi"``, ``"orlicz:G"``,
    ``"orlicz:file=<path>"``, ``"l21"``, ``"l2inf"``, ``"l1"``, ``"l2"``, ``"linf"``."""
    if isinstance(spec, Norm):
        return spec
    kind, _, arg = spec.partition(":")
    if kind == "lambda" and arg in _WEIGHTS:
        w = _WEIGHTS[arg]
        return Norm(spec, lambda f: lorentz_norm(f, w))
    if kind == "marc" and arg in _WEIGHTS:
        w = _WEIGHTS[arg]
        return Norm(spec, lambda f: marcinkiewicz_norm(f, w))
    if kind == "orlicz":
        if arg.startswith("file="):
            N = OrliczFunction.from_csv(arg[len("file="):])
        elif arg in _ORLICZ:
            N = _ORLICZ[arg]
        else:
            raise ValueError(f"unknown Orlicz function {arg!r}")
        return Norm(spec, lambda f: orlicz_norm(f, N))
    simple = {
        "l21": lambda f: lorentz_norm(f, SQRT),
        "l2inf": lambda f: marcinkiewicz_norm(f, SQRT),
        "l1": lambda f: f.lp_norm(1),
        "l2": lambda f: f.lp_norm(2),
        "linf": lambda f: f.lp_norm(math.inf),
    }
    if spec in simple:
        return Norm(spec, simple[spec])
    raise ValueError(f"unknown norm id {spec!r}")


def convexify2_norm(f: StepFunction, base) -> float:
    """Norm of the 2-convexification: ``|| |f|^2 ||_E^{1/2}``."""
    return math.sqrt(get_norm(base)(f.map(np.square)))


def fundamental_function(space, t: float, L: float = 1.0) -> float:
    if not 0 < t <= L:
        raise ValueError(f"t must lie in (0, {L}], got {t}")
    return get_norm(space)(StepFunction.indicator(0.0, t, L))


# ---------------------------------------------------------------------------
# interpolation and embedding gates


class KBounds(NamedTuple):
    upper: float | np.ndarray
    paper_lower: float | np.ndarray


def kfunctional_mphi_linfty(t, x: StepFunction) -> KBounds:
    """Bracket ``K(t, x; M_phi, L_inf)`` for ``t`` in (0, 1).

    ``upper`` minimises ``||(|x| - c)_+||_{M_phi} + t c`` over the cut levels
    ``c`` taken from the values of ``mu(x)`` (and 0).  ``paper_lower`` is
    ``t mu(s, x) / 4`` with ``s = psi^{-1}(t)``.  An array ``t`` gives arrays,
    sharing the level norms.
    """
    tt = np.asarray(t, dtype=float)
    if np.any((tt <= 0) | (tt >= 1)):
        raise ValueError(f"t must lie in (0, 1), got {t}")
    mu = decreasing_rearrangement(x)
    levels = np.unique(np.append(mu.values, 0.0))
    heads = np.array([marcinkiewicz_norm(mu.map(lambda v, c=c: np.maximum(v - c, 0.0)), PHI) for c in levels])
    upper = np.min(heads[:, None] + levels[:, None] * tt.reshape(1, -1), axis=0).reshape(tt.shape)
    lower = 0.25 * tt * mu(_psi_inverse(tt))
    if tt.ndim == 0:
        return KBounds(float(upper), float(lower))
    return KBounds(upper, lower)


@dataclass
class GateResult:
    contained_in_Mpsi: bool
    c_N: float
    dominates_M: bool
    c_prime: float
    v_threshold: float
    c_N_refined: float = math.nan
    c_prime_refined: float = math.nan


def _stable(base: float, refined: float, rel: float) -> bool:
    if not (math.isfinite(base) and math.isfinite(refined)):
        return False
    return abs(refined - base) <= rel * abs(base)


def orlicz_containment_gate(
    N: OrliczFunction,
    t_decades: float = 8.0,
    v_decades: float = 8.0,
    points: int = 400,
    rel: float = 0.01,
) -> GateResult:
    """Decide numerically whether ``L_N(0,1)`` sits in ``M_psi`` and whether
    ``N`` then dominates ``M(t) = t log(e + t)`` at infinity.

    Both questions are asymptotic, so each sup/inf is recomputed on a grid of
    twice the logarithmic extent at the same density; a change above ``rel``
    counts as divergence.
    """
    N.check_convex()

    def sup_ratio(decades, npts):
        t = np.logspace(-decades, 0.0, npts)
        return float(np.max(_phi(t) * N.inverse(1.0 / t)))

    c_N = sup_ratio(t_decades, points)
    c_N_ref = sup_ratio(2 * t_decades, 2 * points)
    contained = _stable(c_N, c_N_ref, rel)

    v0 = float(N.inverse(1.0))

    def inf_ratio(decades, npts):
        v = np.logspace(math.log10(v0), decades, npts + 1)[1:]
        with np.errstate(over="ignore", invalid="ignore"):
            r = N(v) / ORLICZ_M(v)
        return float(np.min(r))

    c_prime = inf_ratio(v_decades, points)
    c_prime_ref = inf_ratio(2 * v_decades, 2 * points)
    dominates = c_prime > 0 and _stable(c_prime, c_prime_ref, rel)
    return GateResult(contained, c_N, bool(dominates), c_prime, v0, c_N_ref, c_prime_ref)


class RatioBand(NamedTuple):
    min_ratio: float
    max_ratio: float


def equivalence_ratio(normA, normB, family) -> RatioBand:
    A, B = get_norm(normA), get_norm(normB)
    ratios = []
    for f in family:
        b = B(f)
        if b == 0:
            continue
        ratios.append(A(f) / b)
    if not ratios:
        raise ValueError("family has no nonzero member")
    return RatioBand(min(ratios), max(ratios))
