"""Symmetrized Cwikel operators ``G_a M_f G_a`` on the torus.

The torus is the unit cube ``[-1/2, 1/2)^d`` with Haar measure of total mass
1, sampled at ``n`` cell centres per axis.  ``G_a = (1 - Delta)^{-a}`` is the
lattice multiplier ``(1 + |k|^2)^{-a}`` over the DFT frequencies ``k``, so the
discrete operator is exactly the truncation of the continuous one to
``|k_i| <= n/2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .spaces import PSI, marcinkiewicz_norm
from .stepfn import RadialMap, StepFunction, empirical_rearrangement

__all__ = [
    "TorusField",
    "ConvergenceError",
    "ResourceError",
    "SingularValueSequence",
    "multiplier",
    "cwikel_apply",
    "cwikel_norm",
    "dense_cwikel_matrix",
    "lattice_sum",
    "lattice_sum_d1_infinite",
    "postcritical_check",
    "singular_values",
    "ideal_quasinorms",
    "radial_torus_field",
    "rearrangement_norm",
    "RatioRow",
    "ratio_table",
    "upper_ratio_suite",
    "lower_ratio_suite",
    "write_ratio_csv",
]


@dataclass
class TorusField:
    d: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.d not in (1, 2):
            raise ValueError("torus fields are supported for d in {1, 2}")
        n = self.values.shape[0]
        if self.values.shape != (n,) * self.d or n < 2 or n & (n - 1):
            raise ValueError(f"expected {self.d}-dimensional samples with a power-of-two side")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def cell_measure(self) -> float:
        return float(self.n) ** -self.d

    @classmethod
    def constant(cls, d: int, n: int, c: float = 1.0) -> "TorusField":
        return cls(d, np.full((n,) * d, float(c)))

    @staticmethod
    def axis(n: int) -> np.ndarray:
        return -0.5 + (np.arange(n) + 0.5) / n

    @classmethod
    def sample(cls, d: int, n: int, fn) -> "TorusField":
        """Evaluate ``fn`` on points of shape ``(..., d)`` in ``[-1/2, 1/2)^d``."""
        ax = cls.axis(n)
        pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)
        return cls(d, np.asarray(fn(pts), dtype=float))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell_measure)

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.cell_measure)


class ConvergenceError(RuntimeError):
    """Power iteration did not settle; ``interval`` brackets the last estimate."""

    def __init__(self, message: str, interval: tuple[float, float], iterations: int):
        super().__init__(message)
        self.interval = interval
        self.iterations = iterations


class ResourceError(RuntimeError):
    pass


def _lattice_sq(d: int, n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, 1.0 / n)
    mesh = np.meshgrid(*([k] * d), indexing="ij")
    return sum(m**2 for m in mesh)


def multiplier(d: int, n: int, alpha: float) -> np.ndarray:
    """``(1 + |k|^2)^{-alpha}`` on the DFT lattice (FFT order)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return (1.0 + _lattice_sq(d, n)) ** (-alpha)


def _G(x: np.ndarray, a: np.ndarray, axes) -> np.ndarray:
    return np.fft.ifftn(np.fft.fftn(x, axes=axes) * a, axes=axes)


def cwikel_apply(f: TorusField, alpha: float, x) -> np.ndarray:
    """``G_alpha M_f G_alpha x``."""
    a = multiplier(f.d, f.n, alpha)
    axes = tuple(range(f.d))
    x = np.asarray(x)
    out = _G(f.values * _G(x, a, axes), a, axes)
    if np.isrealobj(x) and np.isrealobj(f.values):
        out = out.real
    return out


def _settled(deltas: list[float], atol: float) -> bool:
    """Geometric extrapolation of the remaining change, trusted once the
    contraction factor has stabilised over two steps."""
    if len(deltas) >= 2 and deltas[-1] <= 1e-3 * atol and deltas[-2] <= 1e-3 * atol:
        return True
    if len(deltas) < 3 or deltas[-2] == 0 or deltas[-3] == 0:
        return False
    q1 = deltas[-1] / deltas[-2]
    q0 = deltas[-2] / deltas[-3]
    if not q1 < 1 or abs(q1 - q0) > 0.1 * q1:
        return False
    return deltas[-1] * q1 / (1.0 - q1) <= atol


class NormResult(NamedTuple):
    norm: float
    iterations: int


def cwikel_norm(f: TorusField, alpha: float, tol: float = 1e-9, max_iter: int = 100_000,
                seed: int = 0) -> NormResult:
    """Operator norm of ``A = G_alpha M_f G_alpha`` by power iteration.

    For ``f >= 0`` the operator is positive and the Rayleigh quotient of A
    converges to the top eigenvalue; for signed ``f`` the iteration runs on
    ``A^2`` and the square root is returned.  Iteration stops when the
    geometric extrapolation of the remaining change is below
    ``tol * estimate``.
    """
    if not np.any(f.values):
        return NormResult(0.0, 0)
    real = np.real(f.values)
    a = multiplier(f.d, f.n, alpha)
    axes = tuple(range(f.d))
    signed = bool(np.any(real < 0))

    def A(v):
        return _G(real * _G(v, a, axes), a, axes).real

    op = (lambda v: A(A(v))) if signed else A
    rng = np.random.default_rng(seed)
    v = np.ones(f.values.shape) + 1e-3 * rng.standard_normal(f.values.shape)
    v /= np.linalg.norm(v)
    rho_prev = None
    deltas: list[float] = []
    for it in range(1, max_iter + 1):
        w = op(v)
        rho = float(np.vdot(v, w))
        nw = np.linalg.norm(w)
        if nw == 0:
            return NormResult(0.0, it)
        v_next = w / nw
        if rho_prev is not None:
            deltas.append(abs(rho - rho_prev))
            if _settled(deltas, tol * abs(rho)):
                v = v_next
                break
        rho_prev = rho
        v = v_next
    else:
        resid = float(np.linalg.norm(w - rho * v))
        lam = (rho, rho + resid)
        if signed:
            lam = (math.sqrt(max(lam[0], 0.0)), math.sqrt(lam[1]))
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", lam, max_iter)
    rho = float(np.vdot(v, op(v)))
    return NormResult(math.sqrt(rho) if signed else rho, it)


def dense_cwikel_matrix(f: TorusField, alpha: float, budget: int = 1024) -> np.ndarray:
    """``A`` as a dense real symmetric matrix on the sample space."""
    N = f.n**f.d
    if N > budget:
        raise ResourceError(f"dense matrix of size {N} exceeds the budget {budget}")
    a = multiplier(f.d, f.n, alpha)
    axes = tuple(range(1, f.d + 1))
    eye = np.eye(N).reshape((N,) + f.values.shape)
    G = _G(eye, a, axes).real.reshape(N, N)
    return G @ (np.real(f.values).ravel()[:, None] * G)


def lattice_sum(d: int, n: int, exponent: float) -> float:
    """``sum_k (1 + |k|^2)^{-exponent}`` over the DFT lattice."""
    return float(np.sum((1.0 + _lattice_sq(d, n)) ** (-exponent)))


def lattice_sum_d1_infinite(N: int = 10**6) -> float:
    """``sum_{k in Z} 1/(1 + k^2)`` by direct summation up to ``|k| = N`` plus
    the tail ``int_{N+1/2}^inf 2 dx/(1 + x^2)``."""
    k = np.arange(1, N + 1, dtype=float)
    head = 1.0 + 2.0 * math.fsum(1.0 / (1.0 + k[::-1] ** 2))
    return head + 2.0 * (math.pi / 2 - math.atan(N + 0.5))


class PostcriticalResult(NamedTuple):
    norm: float
    bound: float
    passed: bool
    iterations: int


def postcritical_check(h: TorusField, rtol: float = 1e-9) -> PostcriticalResult:
    """``||G_{(d+1)/4} M_h G_{(d+1)/4}|| <= c_d ||h||_1`` with the truncated lattice sum."""
    if np.any(np.real(h.values) < 0):
        raise ValueError("h must be nonnegative")
    res = cwikel_norm(h, (h.d + 1) / 4.0)
    bound = lattice_sum(h.d, h.n, (h.d + 1) / 2.0) * h.l1_norm()
    return PostcriticalResult(res.norm, bound, res.norm <= bound * (1 + rtol), res.iterations)


# ---------------------------------------------------------------------------
# singular values


@dataclass(frozen=True)
class SingularValueSequence:
    mu: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mu, dtype=float)
        if np.any(m < 0) or np.any(np.diff(m) > 0):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        object.__setattr__(self, "mu", m)

    def __len__(self):
        return self.mu.size

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "mu_k"])
            for k, m in enumerate(self.mu):
                w.writerow([k, f"{m:.17g}"])


def singular_values(f: TorusField, alpha: float, k_max: int | None = None) -> SingularValueSequence:
    """Eigenvalue magnitudes of the dense self-adjoint operator, descending."""
    if (f.d == 1 and f.n > 256) or (f.d == 2 and f.n > 32):
        raise ResourceError("dense spectra need n <= 256 (d=1) or n <= 32 (d=2)")
    A = dense_cwikel_matrix(f, alpha, budget=1024)
    mu = np.sort(np.abs(np.linalg.eigvalsh(A)))[::-1]
    return SingularValueSequence(mu if k_max is None else mu[:k_max])


def ideal_quasinorms(s, p: float, q: float = math.inf) -> float:
    """``||s||_{p,q}``; ``q = inf`` gives ``sup (k+1)^{1/p} mu(k)``."""
    mu = s.mu if isinstance(s, SingularValueSequence) else np.asarray(s, dtype=float)
    if not 0 < p < math.inf or not q >= 1:
        raise ValueError("need p in (0, inf) and q in [1, inf]")
    if mu.size == 0:
        return 0.0
    k1 = np.arange(1, mu.size + 1, dtype=float)
    if math.isinf(q):
        return float(np.max(k1 ** (1.0 / p) * mu))
    return float(np.sum((k1 ** (1.0 / p - 1.0 / q) * mu) ** q) ** (1.0 / q))


# ---------------------------------------------------------------------------
# ratio suites


def radial_torus_field(h: StepFunction, d: int, n: int) -> TorusField:
    """``theta -> h(omega_d |theta|^d)`` on ``[-1/2, 1/2)^d``, zero where the
    argument leaves the domain of ``h``.

    In d = 1 each cell carries the exact average of ``h`` over its image
    ``[2a, 2b)``, so the rearrangement of the field is the cell-averaged
    ``h``.  In d = 2 the profile is sampled at cell centres.
    """
    if d == 1:
        edges = np.abs(np.linspace(-0.5, 0.5, n + 1))
        lo = 2.0 * np.minimum(edges[:-1], edges[1:])
        hi = 2.0 * np.maximum(edges[:-1], edges[1:])
        vals = (h.cumulative(hi) - h.cumulative(lo)) / (hi - lo)
        return TorusField(1, vals)
    omega = RadialMap(d).omega
    return TorusField.sample(d, n, lambda p: h(omega * np.sum(p**2, axis=-1) ** (d / 2.0)))


def rearrangement_norm(f: TorusField) -> float:
    """``||f||_{M_psi}`` from the empirical rearrangement on (0, 1)."""
    mu = empirical_rearrangement(np.real(f.values), f.cell_measure)
    return marcinkiewicz_norm(mu, PSI)


class RatioRow(NamedTuple):
    case: str
    norm: float
    f_norm: float
    ratio: float
    n: int
    d: int
    converged_iters: int
    l1: float
    stable: bool


def ratio_table(family: Iterable[tuple[str, StepFunction]], d: int, n: int, stable_rel: float = 0.02,
                tol: float = 1e-9) -> list[RatioRow]:
    """``||A_f||`` against ``||f||_{M_psi}`` for radial lifts of decreasing profiles.

    ``stable`` records whether ``||f||_{M_psi}`` moves by less than
    ``stable_rel`` when the field is resampled at ``2n``.
    """
    rows = []
    for name, h in family:
        f = radial_torus_field(h, d, n)
        res = cwikel_norm(f, d / 4.0, tol=tol)
        fn = rearrangement_norm(f)
        fn2 = rearrangement_norm(radial_torus_field(h, d, 2 * n))
        stable = abs(fn2 - fn) <= stable_rel * fn
        rows.append(RatioRow(name, res.norm, fn, res.norm / fn, n, d, res.iterations, f.l1_norm(), bool(stable)))
    return rows


class SuiteBand(NamedTuple):
    rows: list
    rows_refined: list
    value: float
    value_refined: float
    drift: float
    trivial_bound_ok: bool


def _band(family, d, n, pick) -> SuiteBand:
    family = list(family)
    rows = ratio_table(family, d, n)
    rows2 = ratio_table(family, d, 2 * n)
    v = pick(r.ratio for r in rows)
    v2 = pick(r.ratio for r in rows2)
    trivial = all(r.norm >= r.l1 * (1 - 1e-8) for r in rows + rows2)
    return SuiteBand(rows, rows2, v, v2, abs(v2 - v) / abs(v), trivial)


def upper_ratio_suite(family, d: int = 1, n: int = 4096) -> SuiteBand:
    """Largest ``||A_f|| / ||f||_{M_psi}`` at ``n`` and ``2n`` and its relative drift."""
    return _band(family, d, n, max)


def lower_ratio_suite(family, d: int = 1, n: int = 4096) -> SuiteBand:
    """Smallest ratio at ``n`` and ``2n``; also checks ``||A_f|| >= ||f||_1``."""
    return _band(family, d, n, min)


def write_ratio_csv(path, rows: Iterable[RatioRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["case", "norm", "f_norm", "ratio", "n", "d", "converged_iters"])
        for r in rows:
            w.writerow([r.case, f"{r.norm:.17g}", f"{r.f_norm:.17g}", f"{r.ratio:.17g}", r.n, r.d, r.converged_iters])
