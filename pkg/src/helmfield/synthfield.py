"""Synthetic ground-truth fields, microphone sampling and noise injection.

All generated fields solve the source-free 2D Helmholtz equation exactly
(time convention ``exp(+j omega t)``), so they satisfy the grid-aware
finite-difference operator up to stencil truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, MeasurementMask, make_rng
from .helmholtz import SPEED_OF_SOUND, wavenumber
from .special import hankel2_0

__all__ = [
    "PressureField",
    "MeasurementSet",
    "plane_wave_field",
    "random_plane_waves",
    "cylindrical_wave_field",
    "point_source_field",
    "add_noise",
    "sample_field",
]


@dataclass(frozen=True, eq=False)
class PressureField:
    grid: Grid2D
    freq_hz: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != self.grid.size:
            raise ValueError(f"field has {vals.shape[0]} values, grid has {self.grid.size} points")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        if not self.freq_hz > 0:
            raise ValueError(f"frequency must be positive, got {self.freq_hz}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "freq_hz", float(self.freq_hz))


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    mask: MeasurementMask
    values: np.ndarray
    freq_hz: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != self.mask.m:
            raise ValueError(f"{vals.shape[0]} values for a mask of {self.mask.m} points")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "freq_hz", float(self.freq_hz))


def plane_wave_field(grid: Grid2D, freq_hz: float, angles_deg, amplitudes,
                     c: float = SPEED_OF_SOUND) -> PressureField:
    """Superposition ``sum_q a_q exp(-j k (x cos t_q + y sin t_q))``."""
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    amps = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
    if angles.shape != amps.shape or angles.ndim != 1 or angles.size == 0:
        raise ValueError("need equally long, non-empty angle and amplitude lists")
    k = wavenumber(freq_hz, c)
    pos = grid.positions()
    theta = np.deg2rad(angles)
    phase = np.outer(pos[:, 0], np.cos(theta)) + np.outer(pos[:, 1], np.sin(theta))
    return PressureField(grid, freq_hz, np.exp(-1j * k * phase) @ amps)


def random_plane_waves(count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Random directions (degrees, uniform) and circular complex Gaussian amplitudes."""
    rng = make_rng(seed)
    angles = rng.uniform(0.0, 360.0, count)
    amps = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2.0)
    return angles, amps


def _grid_distances(grid: Grid2D, source_xy_m) -> np.ndarray:
    pos = grid.positions()
    return np.hypot(pos[:, 0] - source_xy_m[0], pos[:, 1] - source_xy_m[1])


def _check_outside(grid: Grid2D, source_xy_m, dist: np.ndarray):
    lo = np.array(grid.origin_m)
    hi = lo + (grid.n - 1) * grid.spacing_m
    sx, sy = source_xy_m
    inside = lo[0] <= sx <= hi[0] and lo[1] <= sy <= hi[1]
    if inside or dist.min() < grid.spacing_m:
        raise ValueError("source must lie outside the grid, at least one spacing away")


def cylindrical_wave_field(grid: Grid2D, freq_hz: float, source_xy_m, amplitude=1.0,
                           c: float = SPEED_OF_SOUND) -> PressureField:
    """Outgoing line-source field ``amplitude * H0^(2)(k r)`` from a source off the grid."""
    dist = _grid_distances(grid, source_xy_m)
    _check_outside(grid, source_xy_m, dist)
    k = wavenumber(freq_hz, c)
    return PressureField(grid, freq_hz, complex(amplitude) * hankel2_0(k * dist))


def point_source_field(grid: Grid2D, freq_hz: float, source_xyz_m, amplitude=1.0,
                       c: float = SPEED_OF_SOUND) -> PressureField:
    """3D free-field monopole sampled on the grid plane (z = 0).

    This does not satisfy the 2D Helmholtz equation; it is only meant for
    robustness experiments outside the model.
    """
    pos = grid.positions()
    sx, sy, sz = source_xyz_m
    dist = np.sqrt((pos[:, 0] - sx) ** 2 + (pos[:, 1] - sy) ** 2 + sz ** 2)
    if dist.min() < grid.spacing_m:
        raise ValueError("point source too close to the grid")
    k = wavenumber(freq_hz, c)
    return PressureField(grid, freq_hz, complex(amplitude) * np.exp(-1j * k * dist) / (4 * np.pi * dist))


def sample_field(field: PressureField, mask: MeasurementMask) -> MeasurementSet:
    idx = mask.as_array()
    if idx[-1] >= field.grid.size:
        raise IndexError(f"mask index {idx[-1]} outside grid of {field.grid.size} points")
    return MeasurementSet(mask, field.values[idx], field.freq_hz)


def add_noise(ms: MeasurementSet, snr_db: float | None, seed: int) -> MeasurementSet:
    """Add circular complex Gaussian noise at exactly ``snr_db`` (``None`` or +inf: no noise).

    The drawn noise vector is rescaled so the realized SNR matches ``snr_db``.
    """
    if snr_db is None or snr_db == np.inf:
        return ms
    if not np.isfinite(snr_db):
        raise ValueError(f"SNR must be finite or +inf, got {snr_db}")
    rng = make_rng(seed)
    m = ms.values.shape[0]
    noise = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    signal_power = float(np.vdot(ms.values, ms.values).real)
    noise *= np.sqrt(signal_power / 10.0 ** (snr_db / 10.0)) / np.linalg.norm(noise)
    return MeasurementSet(ms.mask, ms.values + noise, ms.freq_hz)
