"""Zero-shot Helmholtz-regularized dictionary learning.

Given microphone pressures ``p`` at M grid points, alternately minimizes ::

    ||p - D_meas x||^2 + alpha ||x||_1 + beta * sum_l ||H(k_l) d_l||^2

over coefficients ``x`` (complex LASSO) and the full atom matrix ``D``
(one exact least-squares solve per atom). The Helmholtz term is what
propagates information from measured rows of an atom to the unmeasured
ones; with ``beta = 0`` only measured rows ever change.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .dictionary import Dictionary, atom_frequencies, measured_rows, sample_baseline_dictionary
from .errors import NumericError
from .grid import Grid2D
from .helmholtz import SPEED_OF_SOUND, HelmholtzOperator, Variant, build_operator
from .sparse import Coefficients, SparseProblem, objective as sparse_objective, sparse_code
from .synthfield import MeasurementSet, PressureField

__all__ = [
    "LearnConfig",
    "LearnResult",
    "atom_operators",
    "full_objective",
    "helmholtz_penalty",
    "learn",
    "fit_coefficients",
    "reconstruct",
    "synthesize",
]

UNUSED_ATOM_THRESHOLD = 1e-12


@dataclass(frozen=True)
class LearnConfig:
    alpha: float = 1.0
    beta: float = 0.1
    outer_iters: int = 40
    band_lo_hz: float = 500.0
    band_hi_hz: float = 700.0
    num_atoms: int = 21
    operator_variant: Variant = Variant.PAPER_TOEPLITZ
    init_seed: int = 0
    skip_unused_atoms: bool = True
    sparse_tol: float = 1e-8
    sparse_max_iters: int = 500
    speed_of_sound: float = SPEED_OF_SOUND

    def __post_init__(self):
        object.__setattr__(self, "operator_variant", Variant.parse(self.operator_variant))
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.outer_iters < 1:
            raise ValueError("need at least one outer iteration")
        if self.num_atoms < 2:
            raise ValueError("need at least two atoms")
        if not 0 < self.band_lo_hz < self.band_hi_hz:
            raise ValueError(f"invalid band [{self.band_lo_hz}, {self.band_hi_hz}]")

    def atom_freqs(self) -> list[float]:
        return atom_frequencies(self.band_lo_hz, self.band_hi_hz, self.num_atoms)

    def with_band(self, lo: float, hi: float) -> "LearnConfig":
        return replace(self, band_lo_hz=float(lo), band_hi_hz=float(hi))


@dataclass(frozen=True, eq=False)
class LearnResult:
    dictionary: Dictionary
    coefficients: Coefficients
    objective_trace: list[float]
    helmholtz_penalty_trace: list[float]
    target_freq_hz: float
    # (after sparse coding, after dictionary update) per outer iteration
    step_objectives: list[tuple[float, float]] = field(default_factory=list, repr=False)


def atom_operators(dictionary: Dictionary, variant=Variant.PAPER_TOEPLITZ,
                   c: float = SPEED_OF_SOUND) -> list[HelmholtzOperator]:
    return [build_operator(dictionary.grid, f, variant, c) for f in dictionary.atom_freqs_hz]


def helmholtz_penalty(dictionary: Dictionary, operators) -> float:
    """``sum_l ||H(k_l) d_l||^2``."""
    total = 0.0
    for col, op in enumerate(operators):
        r = op.matrix @ dictionary.atoms[:, col]
        total += float(np.vdot(r, r).real)
    return total


def full_objective(measurements: MeasurementSet, dictionary: Dictionary, x,
                   cfg: LearnConfig, operators) -> float:
    """Data misfit on the measured rows plus l1 and Helmholtz penalties."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape[0] != dictionary.num_atoms or len(operators) != dictionary.num_atoms:
        raise ValueError("coefficient/operator count does not match the dictionary")
    problem = SparseProblem(measured_rows(dictionary, measurements.mask), measurements.values, cfg.alpha)
    value = sparse_objective(problem, x)
    if cfg.beta:
        value += cfg.beta * helmholtz_penalty(dictionary, operators)
    return value


def _check_inputs(measurements: MeasurementSet, grid: Grid2D, target_freq_hz: float, cfg: LearnConfig):
    idx = measurements.mask.as_array()
    if idx[-1] >= grid.size:
        raise ValueError(f"measurement index {idx[-1]} outside grid of {grid.size} points")
    if not cfg.band_lo_hz <= target_freq_hz <= cfg.band_hi_hz:
        raise ValueError(
            f"target {target_freq_hz} Hz outside band [{cfg.band_lo_hz}, {cfg.band_hi_hz}] Hz")
    if not np.all(np.isfinite(measurements.values)):
        raise NumericError("measurements contain non-finite values")


def _update_atoms(atoms: np.ndarray, x: np.ndarray, meas_idx: np.ndarray, p: np.ndarray,
                  normals: list[sp.csr_matrix], cfg: LearnConfig) -> None:
    """One ascending sweep of exact per-atom updates, in place."""
    size = atoms.shape[0]
    resid = p - atoms[meas_idx, :] @ x
    sel = np.zeros(size)
    sel[meas_idx] = 1.0
    for col in range(atoms.shape[1]):
        xl = x[col]
        weight = abs(xl) ** 2
        if weight <= UNUSED_ATOM_THRESHOLD ** 2 and cfg.skip_unused_atoms:
            continue
        target = resid + xl * atoms[meas_idx, col]
        if cfg.beta == 0.0:
            if weight == 0.0:
                raise NumericError(f"atom {col}: singular update (zero coefficient and beta = 0)")
            # only the measured rows enter the objective
            atoms[meas_idx, col] = target / xl
        else:
            rhs = np.zeros(size, dtype=complex)
            rhs[meas_idx] = np.conj(xl) * target
            system = (cfg.beta * normals[col] + sp.diags(weight * sel)).tocsc()
            try:
                lu = splu(system)
            except RuntimeError as exc:
                raise NumericError(f"atom {col}: update system is singular") from exc
            sol = lu.solve(np.column_stack([rhs.real, rhs.imag]))
            atom = sol[:, 0] + 1j * sol[:, 1]
            if not np.all(np.isfinite(atom)):
                raise NumericError(f"atom {col}: update produced non-finite values")
            atoms[:, col] = atom
        resid = target - xl * atoms[meas_idx, col]


def learn(measurements: MeasurementSet, grid: Grid2D, target_freq_hz: float,
          cfg: LearnConfig = LearnConfig(), init: Dictionary | None = None) -> LearnResult:
    """Learn a dictionary and coefficients from the measurements alone.

    The dictionary starts from the Bessel baseline drawn with
    ``cfg.init_seed`` unless ``init`` is given; coefficients start at zero
    and are warm-started across outer iterations.
    """
    _check_inputs(measurements, grid, target_freq_hz, cfg)
    if init is None:
        init = sample_baseline_dictionary(grid, cfg.atom_freqs(), cfg.init_seed, cfg.speed_of_sound)
    elif init.grid != grid:
        raise ValueError("initial dictionary was built on a different grid")
    operators = atom_operators(init, cfg.operator_variant, cfg.speed_of_sound)
    normals = [op.normal_matrix() for op in operators] if cfg.beta else []

    meas_idx = measurements.mask.as_array()
    p = np.asarray(measurements.values, dtype=complex)
    atoms = np.array(init.atoms, dtype=complex)
    x = np.zeros(init.num_atoms, dtype=complex)
    coeffs = None
    obj_trace, pen_trace, steps = [], [], []

    for _ in range(cfg.outer_iters):
        dictionary = init.with_atoms(atoms)
        problem = SparseProblem(atoms[meas_idx, :], p, cfg.alpha)
        coeffs = sparse_code(problem, cfg.sparse_tol, cfg.sparse_max_iters, x0=x)
        x = coeffs.values
        after_coding = full_objective(measurements, dictionary, x, cfg, operators)

        _update_atoms(atoms, x, meas_idx, p, normals, cfg)
        dictionary = init.with_atoms(atoms)
        penalty = helmholtz_penalty(dictionary, operators)
        problem = SparseProblem(atoms[meas_idx, :], p, cfg.alpha)
        after_update = sparse_objective(problem, x) + cfg.beta * penalty
        if not np.isfinite(after_update):
            raise NumericError("objective became non-finite")
        steps.append((after_coding, after_update))
        obj_trace.append(after_update)
        pen_trace.append(penalty)

    final = init.with_atoms(atoms)
    coeffs = Coefficients(x, sparse_objective(SparseProblem(atoms[meas_idx, :], p, cfg.alpha), x),
                          coeffs.iterations_used, coeffs.converged)
    return LearnResult(final, coeffs, obj_trace, pen_trace, float(target_freq_hz), steps)


def synthesize(dictionary: Dictionary, x, freq_hz: float) -> PressureField:
    """Full-grid field ``D x``."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape[0] != dictionary.num_atoms:
        raise ValueError(f"{x.shape[0]} coefficients for {dictionary.num_atoms} atoms")
    return PressureField(dictionary.grid, freq_hz, dictionary.atoms @ x)


def reconstruct(result: LearnResult) -> PressureField:
    return synthesize(result.dictionary, result.coefficients.values, result.target_freq_hz)


def fit_coefficients(dictionary: Dictionary, measurements: MeasurementSet, alpha: float = 1.0,
                     tol: float = 1e-8, max_iters: int = 5000) -> Coefficients:
    """Sparse coding only, for a fixed dictionary (baseline and dictionary reuse)."""
    problem = SparseProblem(measured_rows(dictionary, measurements.mask), measurements.values, alpha)
    return sparse_code(problem, tol, max_iters)
