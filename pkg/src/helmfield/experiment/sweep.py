"""Frequency / microphone-count / fold sweeps comparing BL and the learned dictionary.

Work is split into units of one (band, fold, M) triple. Each unit draws its
mask from ``base_seed + fold`` and its dictionary seed from
``(base_seed, band index, fold, M)``, so results never depend on how the
units are scheduled. Rows are sorted before they are returned.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from ..dictionary import sample_baseline_dictionary
from ..errors import FieldFormatError
from ..grid import Grid2D, draw_mask
from ..learner import LearnConfig, fit_coefficients, learn, reconstruct, synthesize
from ..metrics import ncc, ncc_literal, nmse_db
from ..synthfield import (PressureField, add_noise, cylindrical_wave_field, plane_wave_field,
                          random_plane_waves, sample_field)
from .io import load_field, scan_dataset

__all__ = [
    "METHODS",
    "SweepSpec",
    "ReportRow",
    "SyntheticSource",
    "DatasetSource",
    "eval_frequencies",
    "unit_seed",
    "run_sweep",
    "load_sweep_config",
    "worker_count",
]

log = logging.getLogger(__name__)

METHODS = ("BL", "Proposed")
THREADS_ENV = "HELMFIELD_THREADS"


@dataclass(frozen=True)
class SweepSpec:
    bands_hz: tuple[tuple[float, float], ...] = ((500.0, 700.0), (700.0, 900.0),
                                                 (900.0, 1100.0), (1100.0, 1300.0))
    eval_freq_step_hz: float = 2.5
    mic_counts: tuple[int, ...] = (10, 20, 30, 40, 50)
    folds: int = 5
    base_seed: int = 0
    methods: tuple[str, ...] = METHODS
    learn_cfg: LearnConfig = field(default_factory=LearnConfig)
    reuse_dict_within_band: bool = False
    snr_db: float | None = None
    record_timing: bool = False
    literal_ncc: bool = False

    def __post_init__(self):
        bands = tuple((float(lo), float(hi)) for lo, hi in self.bands_hz)
        if not bands or any(not 0 < lo < hi for lo, hi in bands):
            raise ValueError(f"invalid bands {self.bands_hz}")
        methods = tuple(self.methods)
        unknown = set(methods) - set(METHODS)
        if not methods or unknown:
            raise ValueError(f"methods must be a non-empty subset of {METHODS}, got {methods}")
        if self.folds < 1 or not self.mic_counts or not self.eval_freq_step_hz > 0:
            raise ValueError("need folds >= 1, at least one mic count and a positive step")
        object.__setattr__(self, "bands_hz", bands)
        object.__setattr__(self, "methods", tuple(m for m in METHODS if m in methods))
        object.__setattr__(self, "mic_counts", tuple(int(m) for m in self.mic_counts))


@dataclass(frozen=True)
class ReportRow:
    band_lo_hz: float
    band_hi_hz: float
    freq_hz: float
    fold: int
    method: str
    m: int
    nmse_db: float
    ncc: float
    wall_time_s: float
    mask_hash: str

    def sort_key(self):
        return (self.band_lo_hz, self.band_hi_hz, self.freq_hz, self.fold, self.method, self.m)


@dataclass(frozen=True)
class SyntheticSource:
    """Helmholtz-exact synthetic fields: fixed geometry, any frequency."""

    n: int = 32
    spacing_m: float = 0.025
    kind: str = "plane_waves"
    count: int = 5
    seed: int = 0
    source_distance_m: float = 0.5

    def __post_init__(self):
        if self.kind not in ("plane_waves", "cylindrical"):
            raise ValueError(f"unknown synthetic field kind {self.kind!r}")

    @property
    def grid(self) -> Grid2D:
        return Grid2D(self.n, self.spacing_m)

    def _cylindrical_sources(self):
        rng = np.random.Generator(np.random.PCG64(self.seed))
        side = (self.n - 1) * self.spacing_m
        center = np.array([0.5 * side, 0.5 * side])
        radius = np.sqrt(2.0) * 0.5 * side + self.source_distance_m
        angles = rng.uniform(0.0, 2 * np.pi, self.count)
        amps = (rng.standard_normal(self.count) + 1j * rng.standard_normal(self.count)) / np.sqrt(2.0)
        pos = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
        return pos, amps

    def field(self, freq_hz: float) -> PressureField:
        grid = self.grid
        if self.kind == "plane_waves":
            angles, amps = random_plane_waves(self.count, self.seed)
            return plane_wave_field(grid, freq_hz, angles, amps)
        pos, amps = self._cylindrical_sources()
        values = sum(cylindrical_wave_field(grid, freq_hz, p, a).values for p, a in zip(pos, amps))
        return PressureField(grid, freq_hz, values)


class DatasetSource:
    """Directory of ``f<freq>.csv`` field files sharing one grid."""

    def __init__(self, directory, expected_grid: Grid2D | None = None):
        self.directory = Path(directory)
        self.files = scan_dataset(self.directory)
        if not self.files:
            raise FileNotFoundError(f"{self.directory}: no f<freq>.csv field files")
        self.expected_grid = expected_grid
        self._grid = None

    @property
    def grid(self) -> Grid2D:
        if self._grid is None:
            first = load_field(self.files[min(self.files)])
            self._check_grid(first)
            self._grid = first.grid
        return self._grid

    def _check_grid(self, f: PressureField):
        ref = self.expected_grid if self.expected_grid is not None else self._grid
        if ref is not None and f.grid != ref:
            raise FieldFormatError(f"{self.directory}: field grid {f.grid} does not match {ref}")

    def field(self, freq_hz: float) -> PressureField:
        for f, path in self.files.items():
            if abs(f - freq_hz) <= 1e-6:
                fld = load_field(path)
                self._check_grid(fld)
                if fld.grid != self.grid:
                    raise FieldFormatError(f"{path}: grid differs from the rest of the dataset")
                return fld
        raise FileNotFoundError(f"{self.directory}: no field file for {freq_hz} Hz")


def eval_frequencies(lo: float, hi: float, step: float) -> list[float]:
    count = int(round((hi - lo) / step))
    if abs(lo + count * step - hi) > 1e-9 * max(1.0, hi):
        raise ValueError(f"step {step} Hz does not divide band [{lo}, {hi}]")
    return [lo + i * step for i in range(count + 1)]


def unit_seed(base_seed: int, band_idx: int, fold: int, m: int) -> int:
    """Dictionary/noise seed for one (band, fold, M) unit."""
    seq = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(band_idx), int(fold), int(m)))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads if threads > 0 else (os.cpu_count() or 1)


def _run_unit(spec: SweepSpec, source, band_idx: int, fold: int, m: int) -> list[ReportRow]:
    lo, hi = spec.bands_hz[band_idx]
    grid = source.grid
    mask = draw_mask(grid, m, spec.base_seed + fold)
    digest = mask.digest()
    seed = unit_seed(spec.base_seed, band_idx, fold, m)
    cfg = replace(spec.learn_cfg.with_band(lo, hi), init_seed=seed)
    t0 = time.perf_counter()
    baseline = sample_baseline_dictionary(grid, cfg.atom_freqs(), seed, cfg.speed_of_sound)
    setup = time.perf_counter() - t0
    score_ncc = ncc_literal if spec.literal_ncc else ncc

    def measure(truth, freq_idx):
        ms = sample_field(truth, mask)
        if spec.snr_db is not None:
            ms = add_noise(ms, spec.snr_db, seed + 1 + freq_idx)
        return ms

    shared = None
    if "Proposed" in spec.methods and spec.reuse_dict_within_band:
        t0 = time.perf_counter()
        center = 0.5 * (lo + hi)
        shared = learn(measure(source.field(center), -1), grid, center, cfg, init=baseline).dictionary
        setup += time.perf_counter() - t0

    rows = []
    for freq_idx, freq in enumerate(eval_frequencies(lo, hi, spec.eval_freq_step_hz)):
        truth = source.field(freq)
        ms = measure(truth, freq_idx)
        for method in spec.methods:
            t0 = time.perf_counter()
            if method == "BL":
                coeffs = fit_coefficients(baseline, ms, cfg.alpha)
                estimate = synthesize(baseline, coeffs.values, freq)
            elif shared is not None:
                coeffs = fit_coefficients(shared, ms, cfg.alpha)
                estimate = synthesize(shared, coeffs.values, freq)
            else:
                estimate = reconstruct(learn(ms, grid, freq, cfg, init=baseline))
            elapsed = time.perf_counter() - t0 + setup
            wall = float(elapsed) if spec.record_timing else 0.0
            rows.append(ReportRow(lo, hi, float(freq), fold, method, m,
                                  nmse_db(truth, estimate), score_ncc(truth, estimate), wall, digest))
    log.info("band [%g, %g] fold %d M=%d: %d rows", lo, hi, fold, m, len(rows))
    return rows


def _run_unit_star(args):
    return _run_unit(*args)


def run_sweep(spec: SweepSpec, source, threads: int | None = None) -> list[ReportRow]:
    """Run every (band, fold, M) unit and return rows sorted by (band, freq, fold, method, M).

    ``threads`` caps the worker processes (``None``: read ``HELMFIELD_THREADS``;
    0 or unset: one per CPU).
    """
    units = [(spec, source, b, fold, m)
             for b in range(len(spec.bands_hz))
             for fold in range(spec.folds)
             for m in spec.mic_counts]
    for m in spec.mic_counts:
        if not 1 <= m < source.grid.size:
            raise ValueError(f"microphone count {m} invalid for a grid of {source.grid.size} points")
    workers = min(worker_count(threads), len(units))
    if workers <= 1:
        chunks = [_run_unit_star(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_unit_star, units))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=ReportRow.sort_key)
    return rows


def _learn_cfg_from(raw: dict) -> LearnConfig:
    known = {f.name for f in fields(LearnConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown learn settings: {sorted(unknown)}")
    return LearnConfig(**raw)


def load_sweep_config(path) -> tuple[SweepSpec, object]:
    """Parse a JSON sweep config into a spec and a field source.

    Recognised keys: ``bands_hz``, ``eval_freq_step_hz``, ``mic_counts``,
    ``folds``, ``base_seed``, ``methods``, ``reuse_dict_within_band``,
    ``snr_db``, ``record_timing``, ``literal_ncc``, ``learn`` (LearnConfig
    fields), ``grid`` (``n``, ``spacing_m``) and ``source`` with either
    ``{"dataset": <dir>}`` or ``{"synthetic": {...SyntheticSource fields}}``.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FieldFormatError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise FieldFormatError(f"{path}: config must be a JSON object")
    raw = dict(raw)
    learn_raw = raw.pop("learn", {}) or {}
    source_raw = raw.pop("source", None)
    grid_raw = raw.pop("grid", None)
    known = {f.name for f in fields(SweepSpec)} - {"learn_cfg"}
    unknown = set(raw) - known
    if unknown:
        raise FieldFormatError(f"{path}: unknown config keys {sorted(unknown)}")
    for key in ("bands_hz", "mic_counts", "methods"):
        if key in raw:
            raw[key] = tuple(tuple(v) if isinstance(v, list) else v for v in raw[key])
    spec = SweepSpec(learn_cfg=_learn_cfg_from(learn_raw), **raw)

    expected = None
    if grid_raw is not None:
        expected = Grid2D(int(grid_raw["n"]), float(grid_raw["spacing_m"]),
                          tuple(grid_raw.get("origin_m", (0.0, 0.0))))
    if not isinstance(source_raw, dict) or len(source_raw) != 1:
        raise FieldFormatError(f"{path}: 'source' must hold exactly one of 'dataset' or 'synthetic'")
    if "dataset" in source_raw:
        directory = Path(source_raw["dataset"])
        if not directory.is_absolute():
            directory = path.parent / directory
        source = DatasetSource(directory, expected)
        _ = source.grid
    elif "synthetic" in source_raw:
        source = SyntheticSource(**source_raw["synthetic"])
        if expected is not None and source.grid != expected:
            raise FieldFormatError(f"{path}: synthetic grid {source.grid} does not match {expected}")
    else:
        raise FieldFormatError(f"{path}: unknown source type {sorted(source_raw)}")
    return spec, source
