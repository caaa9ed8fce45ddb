"""Square planar sampling grid and microphone subset selection.

Grid points are enumerated row-major with x varying fastest, so index
``i`` sits at column ``i % n`` and row ``i // n``. Every other module
(operator stencil, field files, masks) relies on this ordering.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid2D",
    "MeasurementMask",
    "index_to_position",
    "position_to_index",
    "draw_mask",
    "make_rng",
]


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator used throughout the package (PCG64 bit generator)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class Grid2D:
    """N x N grid with uniform spacing ``spacing_m`` and lower-left corner ``origin_m``."""

    n: int
    spacing_m: float
    origin_m: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"grid needs n >= 3 points per side, got {self.n}")
        if not np.isfinite(self.spacing_m) or self.spacing_m <= 0:
            raise ValueError(f"spacing must be positive, got {self.spacing_m}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "spacing_m", float(self.spacing_m))
        ox, oy = self.origin_m
        object.__setattr__(self, "origin_m", (float(ox), float(oy)))

    @property
    def size(self) -> int:
        return self.n * self.n

    def positions(self) -> np.ndarray:
        """All point coordinates as an (n², 2) array in index order."""
        idx = np.arange(self.size)
        x = self.origin_m[0] + (idx % self.n) * self.spacing_m
        y = self.origin_m[1] + (idx // self.n) * self.spacing_m
        return np.column_stack([x, y])

    def centered(self) -> "Grid2D":
        """Same grid shifted so that its center lies at (0, 0)."""
        half = 0.5 * (self.n - 1) * self.spacing_m
        return Grid2D(self.n, self.spacing_m, (-half, -half))


def index_to_position(grid: Grid2D, idx: int) -> tuple[float, float]:
    if not 0 <= idx < grid.size:
        raise IndexError(f"index {idx} outside grid of {grid.size} points")
    col, row = idx % grid.n, idx // grid.n
    return (grid.origin_m[0] + col * grid.spacing_m,
            grid.origin_m[1] + row * grid.spacing_m)


def position_to_index(grid: Grid2D, x: float, y: float) -> int:
    """Inverse of :func:`index_to_position` for coordinates on grid points."""
    col = int(round((x - grid.origin_m[0]) / grid.spacing_m))
    row = int(round((y - grid.origin_m[1]) / grid.spacing_m))
    if not (0 <= col < grid.n and 0 <= row < grid.n):
        raise IndexError(f"position ({x}, {y}) lies off the grid")
    return row * grid.n + col


@dataclass(frozen=True)
class MeasurementMask:
    """Sorted, duplicate-free subset of grid indices where microphones sit."""

    indices: tuple[int, ...]
    seed: int = 0
    grid_size: int | None = field(default=None, compare=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("mask needs at least one index")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("mask indices must be strictly increasing")
        if idx[0] < 0:
            raise ValueError("mask indices must be non-negative")
        if self.grid_size is not None:
            if idx[-1] >= self.grid_size:
                raise ValueError(f"mask index {idx[-1]} outside grid of {self.grid_size} points")
            if idx.size >= self.grid_size:
                raise ValueError("mask must leave at least one grid point unmeasured")
        object.__setattr__(self, "indices", tuple(int(i) for i in idx))

    @classmethod
    def from_indices(cls, grid: Grid2D, indices) -> "MeasurementMask":
        """Explicit mask; indices are sorted and checked against ``grid``."""
        idx = sorted(int(i) for i in indices)
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate mask indices")
        return cls(tuple(idx), 0, grid.size)

    @property
    def m(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def digest(self) -> str:
        """Short stable hash of the index set, used to pair report rows."""
        raw = np.asarray(self.indices, dtype="<i8").tobytes()
        return hashlib.sha256(raw).hexdigest()[:16]


def draw_mask(grid: Grid2D, m: int, seed: int) -> MeasurementMask:
    """Draw ``m`` distinct grid indices uniformly without replacement.

    The draw is a PCG64-seeded ``Generator.choice`` and is therefore
    reproducible for a given (grid, m, seed) triple.
    """
    if not 1 <= m < grid.size:
        raise ValueError(f"need 1 <= m < {grid.size}, got m={m}")
    if seed < 0:
        raise ValueError("seed must be unsigned")
    idx = make_rng(seed).choice(grid.size, size=m, replace=False)
    return MeasurementMask(tuple(np.sort(idx).tolist()), int(seed), grid.size)
