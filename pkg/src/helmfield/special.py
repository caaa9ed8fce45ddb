"""Bessel-type functions needed by the dictionary and field generators.

``bessel_j0``/``bessel_y0`` use the ascending power series below
``ASYMPTOTIC_CROSSOVER`` and the Hankel asymptotic expansion (truncated at
its smallest term) above it. Absolute error is below 1e-10 on [1e-3, 1e3].
"""

from __future__ import annotations

import numpy as np

__all__ = ["spherical_j0", "bessel_j0", "bessel_y0", "hankel2_0", "ASYMPTOTIC_CROSSOVER"]

ASYMPTOTIC_CROSSOVER = 12.0
_EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 60
_ASYMPTOTIC_TERMS = 30


def spherical_j0(x):
    """sin(x)/x with j0(0) = 1; short Taylor series near zero."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    x2 = xs * xs
    out[small] = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    xl = x[~small]
    out[~small] = np.sin(xl) / xl
    return out


def _series(x):
    """J0 and Y0 from their ascending series, x > 0."""
    q = 0.25 * x * x
    term = np.ones_like(x)
    j0 = np.ones_like(x)
    ysum = np.zeros_like(x)
    harmonic = 0.0
    for k in range(1, _SERIES_TERMS):
        term = -term * q / (k * k)
        harmonic += 1.0 / k
        j0 = j0 + term
        ysum = ysum - harmonic * term
        if np.all(np.abs(term) * max(harmonic, 1.0) < 1e-17 * np.maximum(np.abs(j0), 1e-300)):
            break
    y0 = (2.0 / np.pi) * ((np.log(0.5 * x) + _EULER_GAMMA) * j0 + ysum)
    return j0, y0


def _asymptotic(x):
    """J0 and Y0 from the Hankel expansion, stopping at the smallest term."""
    p = np.ones_like(x)
    qsum = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    prev = np.abs(term)
    for k in range(1, 2 * _ASYMPTOTIC_TERMS):
        nxt = term * (-(2 * k - 1) ** 2) / (k * 8.0 * x)
        # asymptotic series: stop once terms start growing again
        active &= np.abs(nxt) < prev
        if not active.any():
            break
        term = np.where(active, nxt, term)
        prev = np.where(active, np.abs(nxt), prev)
        contrib = np.where(active, nxt, 0.0)
        if k % 2 == 0:
            p = p + (-1) ** (k // 2) * contrib
        else:
            qsum = qsum + (-1) ** ((k - 1) // 2) * contrib
    chi = x - 0.25 * np.pi
    amp = np.sqrt(2.0 / (np.pi * x))
    j0 = amp * (p * np.cos(chi) - qsum * np.sin(chi))
    y0 = amp * (p * np.sin(chi) + qsum * np.cos(chi))
    return j0, y0


def _j0_y0(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("Bessel evaluation needs finite positive arguments")
    j0 = np.empty_like(x)
    y0 = np.empty_like(x)
    low = x < ASYMPTOTIC_CROSSOVER
    if low.any():
        j0[low], y0[low] = _series(x[low])
    if (~low).any():
        j0[~low], y0[~low] = _asymptotic(x[~low])
    return j0, y0


def bessel_j0(x):
    return _j0_y0(x)[0]


def bessel_y0(x):
    return _j0_y0(x)[1]


def hankel2_0(x):
    """Zero-order Hankel function of the second kind, J0(x) - i Y0(x)."""
    j0, y0 = _j0_y0(x)
    return j0 - 1j * y0
