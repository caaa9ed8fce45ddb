"""Finite-difference Helmholtz operator on a row-major square grid.

The operator is the 5-point stencil ``(Laplacian + k^2) h^2``::

    H(k) = T + (k h)^2 I,   T = -4 on the diagonal, 1 on offsets +-1 and +-n

Two boundary treatments are available. ``PAPER_TOEPLITZ`` keeps the matrix
purely banded/Toeplitz, which also couples the last point of one grid row
with the first point of the next. ``GRID_AWARE`` drops those wrap-around
entries so every coupling is between physical neighbours.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import Grid2D

__all__ = [
    "SPEED_OF_SOUND",
    "Variant",
    "HelmholtzOperator",
    "wavenumber",
    "build_operator",
    "residual",
    "residual_norm_sq",
    "stencil_symbol",
    "interior_indices",
]

SPEED_OF_SOUND = 343.0


class Variant(str, enum.Enum):
    PAPER_TOEPLITZ = "paper"
    GRID_AWARE = "grid"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "paper": cls.PAPER_TOEPLITZ, "paper_toeplitz": cls.PAPER_TOEPLITZ,
            "papertoeplitz": cls.PAPER_TOEPLITZ, "toeplitz": cls.PAPER_TOEPLITZ,
            "grid": cls.GRID_AWARE, "grid_aware": cls.GRID_AWARE, "gridaware": cls.GRID_AWARE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown operator variant {value!r}") from None


def wavenumber(freq_hz: float, c: float = SPEED_OF_SOUND) -> float:
    return 2.0 * np.pi * freq_hz / c


@dataclass(frozen=True, eq=False)
class HelmholtzOperator:
    n: int
    spacing_m: float
    wavenumber: float
    variant: Variant
    matrix: sp.csr_matrix

    @property
    def diagonal_value(self) -> float:
        return -4.0 + (self.wavenumber * self.spacing_m) ** 2

    def normal_matrix(self) -> sp.csr_matrix:
        """``H^T H`` (H is real symmetric, so this is also ``H H``)."""
        return (self.matrix.T @ self.matrix).tocsr()


def _stencil(n: int, variant: Variant) -> sp.csr_matrix:
    size = n * n
    side = np.ones(size - 1)
    if variant is Variant.GRID_AWARE:
        # entry (i, i+1) with i % n == n-1 wraps to the next grid row
        side[n - 1::n] = 0.0
    far = np.ones(size - n)
    mat = sp.diags(
        [far, side, np.full(size, -4.0), side, far],
        [-n, -1, 0, 1, n],
        shape=(size, size),
        format="csr",
    )
    mat.eliminate_zeros()
    return mat


def build_operator(grid: Grid2D, freq_hz: float, variant=Variant.PAPER_TOEPLITZ,
                   c: float = SPEED_OF_SOUND) -> HelmholtzOperator:
    """Assemble H(k) for ``k = 2 pi freq_hz / c`` on ``grid``."""
    if not freq_hz > 0:
        raise ValueError(f"frequency must be positive, got {freq_hz}")
    if not c > 0:
        raise ValueError(f"speed of sound must be positive, got {c}")
    variant = Variant.parse(variant)
    k = wavenumber(freq_hz, c)
    mat = _stencil(grid.n, variant)
    mat.setdiag(-4.0 + (k * grid.spacing_m) ** 2)
    mat = mat.tocsr()
    mat.sort_indices()
    return HelmholtzOperator(grid.n, grid.spacing_m, k, variant, mat)


def residual(op: HelmholtzOperator, field) -> np.ndarray:
    """``H(k) @ field``."""
    vec = np.asarray(field)
    if vec.shape != (op.n * op.n,):
        raise ValueError(f"field must have length {op.n * op.n}, got shape {vec.shape}")
    return op.matrix @ vec


def residual_norm_sq(op: HelmholtzOperator, field) -> float:
    r = residual(op, field)
    return float(np.vdot(r, r).real)


def stencil_symbol(k: float, h: float, theta: float) -> float:
    """Value the 5-point stencil returns (per unit amplitude) for a plane wave
    travelling at angle ``theta`` with wavenumber ``k``."""
    return -4.0 + (k * h) ** 2 + 2.0 * np.cos(k * h * np.cos(theta)) + 2.0 * np.cos(k * h * np.sin(theta))


def interior_indices(n: int) -> np.ndarray:
    """Indices whose four stencil neighbours all lie on the grid."""
    rows, cols = np.divmod(np.arange(n * n), n)
    keep = (rows > 0) & (rows < n - 1) & (cols > 0) & (cols < n - 1)
    return np.flatnonzero(keep)
