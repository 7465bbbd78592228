"""Exact calculus of step functions on an interval (0, L).

A :class:`StepFunction` is a finite list of right-open pieces ``[b_i, b_{i+1})``
carrying constant values.  Everything here (integrals, rearrangements,
submajorization, dilation) is computed in closed form on the pieces, so the
only rounding is floating point.

Functions are understood to vanish beyond their domain length ``L``; this is
how the half-line (0, inf) is represented.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "StepFunction",
    "RadialMap",
    "Submajorization",
    "decreasing_rearrangement",
    "empirical_rearrangement",
    "submajorizes",
    "dilate",
    "cesaro",
    "radial_lift",
    "inner",
    "l1_distance",
    "read_csv",
    "write_csv",
]


class StepFunction:
    """Piecewise constant function on ``(0, L)``.

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing, starting at 0 and ending at ``L``.
    values : array_like
        One real value per piece, so ``len(values) == len(breakpoints) - 1``.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        b = np.asarray(breakpoints, dtype=float).copy()
        v = np.asarray(values, dtype=float).copy()
        if b.ndim != 1 or v.ndim != 1:
            raise ValueError("breakpoints and values must be one-dimensional")
        if b.size < 2:
            raise ValueError("need at least one piece")
        if v.size != b.size - 1:
            raise ValueError(
                f"piece count mismatch: {b.size} breakpoints but {v.size} values"
            )
        if b[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if not np.all(np.diff(b) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(v)) or not np.isfinite(b[-1]):
            raise ValueError("values and domain length must be finite")
        b.flags.writeable = False
        v.flags.writeable = False
        self.breakpoints = b
        self.values = v

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: float, L: float = 1.0) -> "StepFunction":
        return cls([0.0, L], [c])

    @classmethod
    def indicator(cls, a: float, b: float, L: float | None = None, height: float = 1.0):
        """``height * chi_(a, b)`` on ``(0, L)``; ``L`` defaults to ``max(b, 1)``."""
        if L is None:
            L = max(b, 1.0)
        if not 0 <= a < b <= L:
            raise ValueError(f"need 0 <= a < b <= L, got a={a}, b={b}, L={L}")
        pts = sorted({0.0, float(a), float(b), float(L)})
        vals = [height if a <= lo < b else 0.0 for lo in pts[:-1]]
        return cls(pts, vals)

    @classmethod
    def zero(cls, L: float = 1.0) -> "StepFunction":
        return cls([0.0, L], [0.0])

    # -- basic attributes ---------------------------------------------------

    @property
    def L(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def npieces(self) -> int:
        return self.values.size

    def __repr__(self):
        return f"StepFunction(pieces={self.npieces}, L={self.L:g})"

    def __call__(self, t):
        """Evaluate (right-continuous); zero outside ``[0, L)``."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (t >= 0) & (t < self.L)
        out = np.where(inside, self.values[np.clip(idx, 0, self.npieces - 1)], 0.0)
        return out if out.ndim else float(out)

    # -- arithmetic ---------------------------------------------------------

    def refined(self, points) -> "StepFunction":
        """Same function on the partition refined by ``points`` (inside (0, L))."""
        pts = np.asarray(points, dtype=float)
        pts = pts[(pts > 0) & (pts < self.L)]
        b = np.union1d(self.breakpoints, pts)
        return StepFunction(b, self(b[:-1]))

    def extended(self, L: float) -> "StepFunction":
        """Zero extension to ``(0, L)``."""
        if L < self.L:
            raise ValueError("extension must not shrink the domain")
        if L == self.L:
            return self
        return StepFunction(np.append(self.breakpoints, L), np.append(self.values, 0.0))

    def restricted(self, L: float) -> "StepFunction":
        """The function times chi_(0, L), on the domain (0, L)."""
        if L >= self.L:
            return self.extended(L)
        b = self.breakpoints[self.breakpoints < L]
        return StepFunction(np.append(b, L), self.values[: b.size])

    def _binary(self, other, op) -> "StepFunction":
        if isinstance(other, StepFunction):
            L = max(self.L, other.L)
            a, c = self.extended(L), other.extended(L)
            b = np.union1d(a.breakpoints, c.breakpoints)
            mids = b[:-1]
            return StepFunction(b, op(a(mids), c(mids)))
        return StepFunction(self.breakpoints, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return StepFunction(self.breakpoints, -self.values)

    def __abs__(self):
        return StepFunction(self.breakpoints, np.abs(self.values))

    def map(self, fn) -> "StepFunction":
        """Apply ``fn`` to the values piecewise."""
        return StepFunction(self.breakpoints, fn(self.values))

    def compressed(self) -> "StepFunction":
        """Merge neighbouring pieces with identical values."""
        keep = np.ones(self.npieces, dtype=bool)
        keep[1:] = self.values[1:] != self.values[:-1]
        b = np.append(self.breakpoints[:-1][keep], self.L)
        return StepFunction(b, self.values[keep])

    # -- integrals ----------------------------------------------------------

    def integral(self) -> float:
        return float(np.dot(self.values, self.widths))

    def lp_norm(self, p: float) -> float:
        if math.isinf(p):
            return float(np.max(np.abs(self.values)))
        return float(np.dot(np.abs(self.values) ** p, self.widths) ** (1.0 / p))

    def cumulative(self, t):
        """``int_0^t f`` for each ``t`` (with the zero tail beyond ``L``)."""
        t = np.asarray(t, dtype=float)
        csum = np.concatenate(([0.0], np.cumsum(self.values * self.widths)))
        tc = np.clip(t, 0.0, self.L)
        idx = np.clip(np.searchsorted(self.breakpoints, tc, side="right") - 1, 0, self.npieces - 1)
        out = csum[idx] + self.values[idx] * (tc - self.breakpoints[idx])
        return out if out.ndim else float(out)

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def equals(self, other: "StepFunction", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        """Pointwise equality on a common refinement."""
        L = max(self.L, other.L)
        b = np.union1d(self.extended(L).breakpoints, other.extended(L).breakpoints)
        return bool(np.allclose(self(b[:-1]), other(b[:-1]), rtol=rtol, atol=atol))


class Submajorization(NamedTuple):
    holds: bool
    worst_deficit: float
    worst_t: float


@dataclass(frozen=True)
class RadialMap:
    """``t -> |t|^d`` on R^d together with the unit-ball volume."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def omega(self) -> float:
        return math.pi ** (self.d / 2) / math.gamma(self.d / 2 + 1)

    @property
    def surface(self) -> float:
        """Area of the unit sphere S^{d-1}."""
        return self.d * self.omega

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        return np.linalg.norm(pts, axis=-1) ** self.d


def decreasing_rearrangement(f: StepFunction) -> StepFunction:
    """Nonincreasing rearrangement of ``|f|`` on the same domain."""
    a = np.abs(f.values)
    order = np.argsort(-a, kind="stable")
    w = f.widths[order]
    b = np.concatenate(([0.0], np.cumsum(w)))
    b[-1] = f.L
    # cumsum rounding may collapse a tiny piece; drop any non-increasing step
    ok = np.diff(b) > 0
    if not np.all(ok):
        b = np.append(b[:-1][ok], f.L)
        return StepFunction(b, a[order][ok]).compressed()
    return StepFunction(b, a[order]).compressed()


def empirical_rearrangement(samples, cell_measure: float) -> StepFunction:
    """Rearrangement of a sampled field, each sample carrying ``cell_measure``."""
    a = np.sort(np.abs(np.ravel(samples)))[::-1]
    b = cell_measure * np.arange(a.size + 1, dtype=float)
    return StepFunction(b, a).compressed()


def submajorizes(upper: StepFunction, lower: StepFunction, tol: float = 1e-12) -> Submajorization:
    """Check ``lower << upper`` (Hardy-Littlewood submajorization).

    Both cumulative integrals of the rearrangements are piecewise linear with
    kinks at the merged breakpoints, so checking those points is exhaustive.
    """
    if not math.isclose(upper.L, lower.L, rel_tol=1e-12):
        raise ValueError(f"domain mismatch: {upper.L} vs {lower.L}")
    mu_u = decreasing_rearrangement(upper)
    mu_l = decreasing_rearrangement(lower)
    t = np.union1d(mu_u.breakpoints[1:], mu_l.breakpoints[1:])
    iu = mu_u.cumulative(t)
    il = mu_l.cumulative(t)
    deficit = il - iu
    k = int(np.argmax(deficit))
    holds = bool(np.all(il <= (1.0 + tol) * iu))
    return Submajorization(holds, float(deficit[k]), float(t[k]))


def dilate(f: StepFunction, u: float) -> StepFunction:
    """``(sigma_u f)(t) = f(t / u)``."""
    if not u > 0:
        raise ValueError(f"dilation factor must be positive, got {u}")
    return StepFunction(f.breakpoints * u, f.values)


def cesaro(f: StepFunction, t_grid):
    """Cesaro mean of the rearrangement, ``(1/s) int_0^s mu(f)``."""
    s = np.asarray(t_grid, dtype=float)
    if np.any(s <= 0):
        raise ValueError("Cesaro mean needs s > 0")
    return decreasing_rearrangement(f).cumulative(s) / s


def radial_lift(x: StepFunction, rmap: RadialMap, box) -> np.ndarray:
    """Sample ``t -> x(|t|^d)`` at the cell centres of ``box``.

    ``box`` is any object with ``d``, ``L`` (half width) and ``n`` attributes and
    a ``centers()`` method, e.g. :class:`symspace.grid.BoxGrid`.
    """
    if box.d != rmap.d:
        raise ValueError("box and radial map disagree on dimension")
    reach = (box.L * math.sqrt(box.d)) ** box.d
    if x.L < reach * (1.0 - 1e-12):
        raise ValueError(
            f"x is defined on (0, {x.L:g}) but the box needs (0, {reach:g}); "
            "use x.extended() to pad with zeros"
        )
    return x(rmap(box.centers()))


def inner(f: StepFunction, g: StepFunction) -> float:
    """``int f g`` on the common domain (zero tails)."""
    return (f * g).integral()


def l1_distance(f: StepFunction, g: StepFunction) -> float:
    return abs(f - g).integral()


def write_csv(f: StepFunction, path) -> None:
    """Write ``breakpoint,value`` rows; the last row carries ``L`` and a dummy 0."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["breakpoint", "value"])
        for b, v in zip(f.breakpoints[:-1], f.values):
            w.writerow([f"{b:.17g}", f"{v:.17g}"])
        w.writerow([f"{f.L:.17g}", "0"])


def read_csv(path) -> StepFunction:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["breakpoint", "value"]:
        raise ValueError(f"{path}: expected header 'breakpoint,value'")
    body = [r for r in rows[1:] if r]
    b = [float(r[0]) for r in body]
    v = [float(r[1]) for r in body[:-1]]
    return StepFunction(b, v)
