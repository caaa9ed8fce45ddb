"""Reconstruction scores: NMSE in dB and normalized cross-correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Score", "nmse_db", "ncc", "ncc_literal", "score"]


@dataclass(frozen=True)
class Score:
    nmse_db: float
    ncc: float


def _values(f):
    return np.asarray(getattr(f, "values", f), dtype=complex).reshape(-1)


def _check_pair(truth, estimate):
    for attr in ("grid", "freq_hz"):
        a, b = getattr(truth, attr, None), getattr(estimate, attr, None)
        if a is not None and b is not None and a != b:
            raise ValueError(f"fields differ in {attr}: {a} vs {b}")
    p, q = _values(truth), _values(estimate)
    if p.shape != q.shape:
        raise ValueError(f"field lengths differ: {p.shape[0]} vs {q.shape[0]}")
    return p, q


def nmse_db(truth, estimate) -> float:
    """``10 log10(||p - p_hat||^2 / ||p||^2)``; ``-inf`` for an exact match."""
    p, q = _check_pair(truth, estimate)
    ref = float(np.vdot(p, p).real)
    if ref == 0.0:
        raise ValueError("NMSE is undefined for an all-zero reference field")
    diff = p - q
    err = float(np.vdot(diff, diff).real)
    if err == 0.0:
        return float("-inf")
    return float(10.0 * np.log10(err / ref))


def ncc(truth, estimate) -> float:
    """``|p_hat^H p| / (||p_hat|| ||p||)``, in [0, 1]."""
    p, q = _check_pair(truth, estimate)
    np_, nq = np.linalg.norm(p), np.linalg.norm(q)
    if np_ == 0.0 or nq == 0.0:
        raise ValueError("NCC is undefined for an all-zero field")
    return float(min(1.0, abs(np.vdot(q, p)) / (nq * np_)))


def ncc_literal(truth, estimate) -> float:
    """Variant dividing by squared norms, ``|p_hat^H p| / (||p_hat||^2 ||p||^2)``.

    Not scale invariant; kept only for cross-checking published numbers.
    """
    p, q = _check_pair(truth, estimate)
    den = float(np.vdot(q, q).real * np.vdot(p, p).real)
    if den == 0.0:
        raise ValueError("NCC is undefined for an all-zero field")
    return float(abs(np.vdot(q, p)) / den)


def score(truth, estimate, literal_ncc: bool = False) -> Score:
    return Score(nmse_db(truth, estimate), (ncc_literal if literal_ncc else ncc)(truth, estimate))
