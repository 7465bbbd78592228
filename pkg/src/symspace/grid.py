"""Uniform periodic grids on boxes [-L, L]^d used as a stand-in for R^d."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoxGrid:
    d: int
    L: float
    n: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("fields are only supported for d in {1, 2}")
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"samples per axis must be a power of two, got {self.n}")
        if not self.L > 0:
            raise ValueError("half width must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_measure(self) -> float:
        return self.h ** self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    def axis(self) -> np.ndarray:
        return -self.L + (np.arange(self.n) + 0.5) * self.h

    def centers(self) -> np.ndarray:
        """Cell centres, shape ``(n, ..., n, d)``."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1)

    def frequencies(self) -> np.ndarray:
        """Squared angular frequencies ``|xi|^2`` on the DFT lattice."""
        xi = 2 * np.pi * np.fft.fftfreq(self.n, d=self.h)
        mesh = np.meshgrid(*([xi] * self.d), indexing="ij")
        return sum(m**2 for m in mesh)

    def refined(self) -> "BoxGrid":
        return BoxGrid(self.d, self.L, 2 * self.n)

    def coarsened(self) -> "BoxGrid":
        return BoxGrid(self.d, self.L, self.n // 2)


@dataclass
class BoxField:
    grid: BoxGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"expected samples of shape {self.grid.shape}, got {self.values.shape}")

    @classmethod
    def sample(cls, grid: BoxGrid, fn) -> "BoxField":
        """Evaluate ``fn`` on points of shape ``(..., d)``."""
        return cls(grid, np.asarray(fn(grid.centers()), dtype=float))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_measure))

    def inner(self, other: "BoxField") -> float:
        return float(np.real(np.sum(self.values * np.conj(other.values))) * self.grid.cell_measure)


def save_field(path, field: BoxField) -> None:
    """Flat little-endian f64 samples at ``path`` plus a JSON sidecar ``path + '.json'``."""
    np.ascontiguousarray(field.values, dtype="<f8").tofile(path)
    meta = {"d": field.grid.d, "L": field.grid.L, "n": field.grid.n, "dtype": "f64", "order": "row-major"}
    with open(f"{path}.json", "w") as fh:
        json.dump(meta, fh)


def load_field(path) -> BoxField:
    with open(f"{path}.json") as fh:
        meta = json.load(fh)
    if meta.get("dtype") != "f64" or meta.get("order") != "row-major":
        raise ValueError(f"unsupported field layout: {meta}")
    grid = BoxGrid(int(meta["d"]), float(meta["L"]), int(meta["n"]))
    values = np.fromfile(path, dtype="<f8").reshape(grid.shape)
    return BoxField(grid, values)
