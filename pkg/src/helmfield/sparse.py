"""Complex l1-regularized least squares (sparse coding).

Minimizes ``||p - A x||_2^2 + alpha * sum_l |x_l|`` over complex ``x`` with a
monotone accelerated proximal gradient method (MFISTA with adaptive
restart). The data term carries no 1/2 factor, so the gradient is
``2 A^H (A x - p)`` and the shrinkage threshold per step is ``alpha / (2 L)``
with ``L`` the largest eigenvalue of ``A^H A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError

__all__ = [
    "SparseProblem",
    "Coefficients",
    "soft_threshold",
    "objective",
    "largest_eigenvalue",
    "stationarity",
    "sparse_code",
]


@dataclass(frozen=True, eq=False)
class SparseProblem:
    design: np.ndarray
    observations: np.ndarray
    alpha: float

    def __post_init__(self):
        design = np.atleast_2d(np.asarray(self.design, dtype=complex))
        obs = np.asarray(self.observations, dtype=complex).reshape(-1)
        if design.shape[0] < 1 or design.shape[1] < 1:
            raise ValueError("design matrix must be at least 1x1")
        if obs.shape[0] != design.shape[0]:
            raise ValueError(
                f"{obs.shape[0]} observations for a design with {design.shape[0]} rows")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True, eq=False)
class Coefficients:
    values: np.ndarray
    objective: float
    iterations_used: int
    converged: bool
    history: list[float] = field(default_factory=list, repr=False)


def soft_threshold(z: np.ndarray, tau: float) -> np.ndarray:
    """Complex shrinkage ``z * max(0, 1 - tau / |z|)``."""
    mag = np.abs(z)
    scale = np.maximum(0.0, 1.0 - tau / np.where(mag > 0, mag, 1.0))
    return np.where(mag > tau, z * scale, 0.0 + 0.0j)


def objective(problem: SparseProblem, x) -> float:
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape[0] != problem.design.shape[1]:
        raise ValueError(f"x has length {x.shape[0]}, expected {problem.design.shape[1]}")
    r = problem.observations - problem.design @ x
    return float(np.vdot(r, r).real + problem.alpha * np.abs(x).sum())


def largest_eigenvalue(a: np.ndarray, iters: int = 500, rtol: float = 1e-12) -> float:
    """Largest eigenvalue of ``a^H a`` by power iteration."""
    rng = np.random.Generator(np.random.PCG64(0))
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = a.conj().T @ (a @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        lam_new = float(np.vdot(v, w).real)
        v = w / nrm
        if abs(lam_new - lam) <= rtol * lam_new:
            return lam_new
        lam = lam_new
    return lam


def stationarity(problem: SparseProblem, x) -> float:
    """Norm of the minimum-norm subgradient of the objective at ``x``."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    a = problem.design
    grad = 2.0 * (a.conj().T @ (a @ x - problem.observations))
    mag = np.abs(x)
    on = mag > 0
    sub = np.empty_like(grad)
    sub[on] = grad[on] + problem.alpha * x[on] / mag[on]
    g_off = grad[~on]
    g_mag = np.abs(g_off)
    shrink = np.maximum(0.0, 1.0 - problem.alpha / np.where(g_mag > 0, g_mag, 1.0))
    sub[~on] = g_off * shrink
    return float(np.linalg.norm(sub))


def sparse_code(problem: SparseProblem, tol: float = 1e-8, max_iters: int = 5000,
                x0=None, record_history: bool = False) -> Coefficients:
    """Solve the complex LASSO in ``problem``.

    Starts from ``x0`` when it is given and no worse than zero. The run stops
    once the relative objective decrease of an iteration falls below ``tol``
    and the minimum-norm subgradient is below ``10 * tol`` (scaled by
    ``max(1, ||2 A^H p||)``), or after ``max_iters`` iterations. The returned objective never exceeds that of
    the starting point.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    a, p, alpha = problem.design, problem.observations, problem.alpha
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(p)) and np.isfinite(alpha)):
        raise NumericError("sparse coding received non-finite inputs")

    num = a.shape[1]
    x = np.zeros(num, dtype=complex)
    f_x = objective(problem, x)
    if x0 is not None:
        x0 = np.asarray(x0, dtype=complex).reshape(-1)
        if x0.shape[0] != num:
            raise ValueError(f"warm start has length {x0.shape[0]}, expected {num}")
        f0 = objective(problem, x0)
        if f0 <= f_x:
            x, f_x = x0.copy(), f0

    history = [f_x] if record_history else []
    lip = largest_eigenvalue(a) * (1.0 + 1e-6)
    if lip == 0.0:
        # A == 0: the minimizer is x = 0
        zero = np.zeros(num, dtype=complex)
        f_zero = objective(problem, zero)
        return Coefficients(zero, f_zero, 0, True, history + ([f_zero] if record_history else []))

    step = 1.0 / lip
    tau = alpha * step / 2.0
    ah = a.conj().T
    ahp = ah @ p
    grad_scale = max(1.0, 2.0 * float(np.linalg.norm(ahp)))

    y = x.copy()
    x_prev = x.copy()
    t = 1.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        z = soft_threshold(y - step * (ah @ (a @ y) - ahp), tau)
        f_z = objective(problem, z)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        f_prev = f_x
        if f_z <= f_x:
            x_prev, x, f_x = x, z, f_z
            y = x + ((t - 1.0) / t_next) * (x - x_prev)
            t = t_next
        else:
            # no descent: keep x and restart momentum from it
            x_prev = x
            y = x.copy()
            t = 1.0
        if not np.isfinite(f_x):
            raise NumericError("sparse coding diverged")
        if record_history:
            history.append(f_x)
        decrease = f_prev - f_x
        if decrease <= tol * max(f_prev, np.finfo(float).tiny):
            if stationarity(problem, x) <= 10.0 * tol * grad_scale:
                converged = True
                break
    return Coefficients(x, f_x, it, converged, history)
