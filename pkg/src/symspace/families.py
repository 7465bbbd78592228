"""Deterministic step-function families used by the test suites and the CLI."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .stepfn import StepFunction

__all__ = [
    "random_decreasing",
    "random_step",
    "random_indicator",
    "power_approximant",
    "invphi_approximant",
    "invphi_level",
]


def _log_breaks(rng: np.random.Generator, pieces: int, lo: float, L: float) -> np.ndarray:
    while True:
        inner = np.sort(L * 10.0 ** rng.uniform(math.log10(lo), 0.0, pieces - 1))
        b = np.concatenate(([0.0], inner, [L]))
        if np.all(np.diff(b) > 0):
            return b


def random_decreasing(rng: np.random.Generator, pieces: int = 20, L: float = 1.0, lo: float = 1e-6) -> StepFunction:
    """Decreasing step function with log-uniform breakpoints in ``(lo L, L)``.

    Values are ``exp(4 U)`` sorted descending and scaled to a maximum of 1,
    which gives heavy spikes near 0.
    """
    b = _log_breaks(rng, pieces, lo, L)
    v = np.sort(np.exp(4.0 * rng.uniform(size=pieces)))[::-1]
    return StepFunction(b, v / v[0])


def random_step(rng: np.random.Generator, pieces: int = 20, L: float = 1.0, signed: bool = True) -> StepFunction:
    """Unsorted step function with uniform breakpoints and Gaussian values."""
    while True:
        b = np.concatenate(([0.0], np.sort(rng.uniform(0.0, L, pieces - 1)), [L]))
        if np.all(np.diff(b) > 0):
            break
    v = rng.standard_normal(pieces)
    return StepFunction(b, v if signed else np.abs(v))


def random_indicator(rng: np.random.Generator, L: float = 1.0) -> StepFunction:
    """Indicator of a random interval inside (0, L)."""
    a, b = np.sort(rng.uniform(0.0, L, 2))
    return StepFunction.indicator(float(a), float(b), L)


def power_approximant(p: float, m: int = 200, eps: float = 1e-12) -> StepFunction:
    """Minorant of ``s^p`` (p <= 0) on (0, 1).

    ``(eps, 1)`` is cut geometrically into ``m`` pieces carrying the value at
    their right end, and ``(0, eps)`` carries ``eps^p``.  The relative error on
    a piece is ``1 - (b/a)^p``, so it halves when ``m`` doubles.
    """
    if p > 0:
        raise ValueError("power approximants are built for p <= 0")
    b = np.concatenate(([0.0], np.geomspace(eps, 1.0, m + 1)))
    return StepFunction(b, b[1:] ** p)


def _phi(s):
    return s * (1.0 - math.log(s))


def invphi_level(k: float) -> float:
    """``s_k`` in (0, 1] with ``phi(s_k) = 1/k`` (``k >= 1``)."""
    if k < 1:
        raise ValueError("invphi family needs k >= 1")
    if k == 1:
        return 1.0
    return brentq(lambda s: _phi(s) - 1.0 / k, 1e-300, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def invphi_approximant(k: float, m: int = 200) -> StepFunction:
    """Step version of ``min(k, 1/phi)`` on (0, 1).

    The cap ``k`` holds exactly on ``(0, s_k)``; on ``(s_k, 1)`` the pieces are
    geometric and carry exact cell averages of ``1/phi``, using
    ``int ds / phi(s) = -log(1 - log s)``.  The result is decreasing and has
    the exact integral.
    """
    sk = invphi_level(k)
    if sk >= 1.0:
        return StepFunction.constant(float(k))
    edges = np.geomspace(sk, 1.0, m + 1)
    anti = -np.log(1.0 - np.log(edges))
    avg = np.diff(anti) / np.diff(edges)
    return StepFunction(np.concatenate(([0.0], edges)), np.concatenate(([float(k)], avg)))
