"""Frequency-indexed dictionaries and the Bessel-covariance baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.spatial.distance import pdist, squareform

from .grid import Grid2D, MeasurementMask, make_rng
from .helmholtz import SPEED_OF_SOUND, wavenumber
from .special import spherical_j0

__all__ = [
    "Dictionary",
    "atom_frequencies",
    "bessel_covariance",
    "draw_bessel_atoms",
    "sample_baseline_dictionary",
    "measured_rows",
]

JITTER_LEVELS = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Atom matrix of shape (n², L); column ``l`` models frequency ``atom_freqs_hz[l]``."""

    grid: Grid2D
    atom_freqs_hz: tuple[float, ...]
    atoms: np.ndarray

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.atom_freqs_hz)
        atoms = np.array(self.atoms, dtype=complex)
        if atoms.ndim != 2 or atoms.shape[0] != self.grid.size:
            raise ValueError(f"atoms must have shape ({self.grid.size}, L), got {atoms.shape}")
        if atoms.shape[1] != len(freqs):
            raise ValueError(f"{atoms.shape[1]} atoms but {len(freqs)} atom frequencies")
        if len(freqs) == 0 or any(f <= 0 for f in freqs):
            raise ValueError("atom frequencies must be positive")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("atom frequencies must be strictly increasing")
        atoms.setflags(write=False)
        object.__setattr__(self, "atom_freqs_hz", freqs)
        object.__setattr__(self, "atoms", atoms)

    @property
    def num_atoms(self) -> int:
        return self.atoms.shape[1]

    def with_atoms(self, atoms: np.ndarray) -> "Dictionary":
        return Dictionary(self.grid, self.atom_freqs_hz, atoms)


def atom_frequencies(band_lo_hz: float, band_hi_hz: float, l: int) -> list[float]:
    """``l`` equally spaced frequencies covering [band_lo_hz, band_hi_hz] inclusive."""
    if not band_lo_hz > 0:
        raise ValueError(f"band start must be positive, got {band_lo_hz}")
    if not band_hi_hz > band_lo_hz:
        raise ValueError(f"degenerate band [{band_lo_hz}, {band_hi_hz}]")
    if l < 2:
        raise ValueError(f"need at least 2 atoms, got {l}")
    return np.linspace(band_lo_hz, band_hi_hz, l).tolist()


def bessel_covariance(grid: Grid2D, freq_hz: float, c: float = SPEED_OF_SOUND) -> np.ndarray:
    """Dense (n², n²) matrix with entries ``j0(k |r_s - r_t|)``."""
    if not freq_hz > 0:
        raise ValueError(f"frequency must be positive, got {freq_hz}")
    k = wavenumber(freq_hz, c)
    dist = pdist(grid.positions())
    cov = squareform(spherical_j0(k * dist))
    np.fill_diagonal(cov, 1.0)
    return cov


def _factor(cov: np.ndarray) -> np.ndarray:
    size = cov.shape[0]
    for jitter in JITTER_LEVELS:
        try:
            return sla.cholesky(cov + jitter * np.eye(size), lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError(
        f"covariance factorization failed even with jitter {JITTER_LEVELS[-1]:g}")


def draw_bessel_atoms(grid: Grid2D, freq_hz: float, count: int, rng: np.random.Generator,
                      c: float = SPEED_OF_SOUND) -> np.ndarray:
    """``count`` unnormalized circular complex Gaussian draws with covariance Σ(freq).

    Real and imaginary parts are independent with covariance Σ/2 each, so
    ``E[d d^H] = Σ``. Returns an (n², count) array.
    """
    chol = _factor(bessel_covariance(grid, freq_hz, c))
    z = rng.standard_normal((grid.size, count)) + 1j * rng.standard_normal((grid.size, count))
    return chol @ (z / np.sqrt(2.0))


def sample_baseline_dictionary(grid: Grid2D, atom_freqs_hz, seed: int,
                               c: float = SPEED_OF_SOUND) -> Dictionary:
    """One unit-norm Bessel-covariance atom per frequency, reproducible per ``seed``."""
    freqs = [float(f) for f in atom_freqs_hz]
    rng = make_rng(seed)
    atoms = np.empty((grid.size, len(freqs)), dtype=complex)
    for col, f in enumerate(freqs):
        atom = draw_bessel_atoms(grid, f, 1, rng, c)[:, 0]
        norm = np.linalg.norm(atom)
        if norm == 0.0:
            raise np.linalg.LinAlgError(f"atom {col} at {f} Hz drew an all-zero vector")
        atoms[:, col] = atom / norm
    return Dictionary(grid, tuple(freqs), atoms)


def measured_rows(dictionary: Dictionary, mask: MeasurementMask) -> np.ndarray:
    """Rows of the atom matrix at the measured grid points, shape (M, L)."""
    idx = mask.as_array()
    if idx.size and (idx[0] < 0 or idx[-1] >= dictionary.grid.size):
        raise IndexError(f"mask index outside grid of {dictionary.grid.size} points")
    return dictionary.atoms[idx, :]
