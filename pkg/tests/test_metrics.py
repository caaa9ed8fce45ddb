import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helmfield.grid import Grid2D
from helmfield.metrics import ncc, ncc_literal, nmse_db, score
from helmfield.synthfield import PressureField


def test_nmse_examples():
    p = np.array([1.0, 0.0])
    assert nmse_db(p, p) == -np.inf
    assert nmse_db(p, np.zeros(2)) == 0.0
    assert nmse_db(p, np.array([0.5, 0.0])) == pytest.approx(10 * np.log10(0.25), abs=1e-12)
    assert nmse_db(p, np.array([0.5, 0.0])) == pytest.approx(-6.0206, abs=1e-4)


def test_nmse_zero_truth():
    with pytest.raises(ValueError):
        nmse_db(np.zeros(3), np.ones(3))


def test_ncc_examples():
    p = np.array([1.0, 0.0])
    assert ncc(p, (2 - 3j) * p) == pytest.approx(1.0, abs=1e-12)
    assert ncc(p, np.array([0.0, 1.0])) == 0.0
    assert ncc(p, np.array([1.0, 1.0]) / np.sqrt(2)) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    with pytest.raises(ValueError):
        ncc(p, np.zeros(2))


def test_ncc_literal_uses_squared_norms():
    p = np.array([2.0, 0.0])
    assert ncc_literal(p, p) == pytest.approx(4.0 / 16.0)


def test_fields_must_agree():
    g = Grid2D(3, 1.0)
    a = PressureField(g, 600.0, np.ones(9))
    b = PressureField(g, 610.0, np.ones(9))
    with pytest.raises(ValueError):
        nmse_db(a, b)
    s = score(a, PressureField(g, 600.0, 2 * np.ones(9)))
    assert s.nmse_db == 0.0 and s.ncc == pytest.approx(1.0)


complex_vec = st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=12)


@given(a=complex_vec, b=complex_vec)
@settings(max_examples=80, deadline=None)
def test_ncc_in_unit_interval(a, b):
    n = min(len(a), len(b))
    p = np.array([complex(*v) for v in a[:n]])
    q = np.array([complex(*v) for v in b[:n]])
    if np.linalg.norm(p) == 0 or np.linalg.norm(q) == 0:
        return
    assert 0.0 <= ncc(p, q) <= 1.0


@given(seed=st.integers(0, 10_000), re=st.floats(-3, 3), im=st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_scale_properties(seed, re, im):
    c = complex(re, im)
    if abs(c) < 1e-3:
        return
    rng = np.random.default_rng(seed)
    p = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    q = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    assert ncc(p, c * p) == pytest.approx(1.0, abs=1e-12)
    assert nmse_db(p, p) == -np.inf
    assert nmse_db(c * p, c * q) == pytest.approx(nmse_db(p, q), abs=1e-9)
