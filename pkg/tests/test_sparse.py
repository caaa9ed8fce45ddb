import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helmfield.errors import NumericError
from helmfield.sparse import (SparseProblem, largest_eigenvalue, objective, soft_threshold,
                              sparse_code)

from .conftest import crandn


def min_subgradient(a, p, alpha, x):
    """Smallest-norm element of the subdifferential, computed entrywise."""
    grad = 2 * a.conj().T @ (a @ x - p)
    out = []
    for gl, xl in zip(grad, x):
        if xl != 0:
            out.append(gl + alpha * xl / abs(xl))
        else:
            out.append(gl * max(0.0, 1 - alpha / abs(gl)) if gl != 0 else 0.0)
    return np.linalg.norm(out)


def coordinate_descent(a, p, alpha, sweeps=20_000):
    """Exact cyclic coordinate minimization; independent of the accelerated path."""
    x = np.zeros(a.shape[1], complex)
    r = p.copy()
    norms = np.sum(np.abs(a) ** 2, axis=0)
    for _ in range(sweeps):
        delta = 0.0
        for l in range(a.shape[1]):
            if norms[l] == 0:
                continue
            r += a[:, l] * x[l]
            z = a[:, l].conj() @ r
            new = z * max(0.0, 1 - alpha / (2 * abs(z))) / norms[l] if abs(z) > 0 else 0.0
            delta = max(delta, abs(new - x[l]))
            x[l] = new
            r -= a[:, l] * x[l]
        if delta < 1e-15:
            break
    return x


def random_problem(rng, m, l, alpha):
    return SparseProblem(crandn(rng, m, l), crandn(rng, m), alpha)


def test_soft_threshold():
    z = np.array([3 + 4j, 0.1, 0.0, -2.0])
    out = soft_threshold(z, 1.0)
    np.testing.assert_allclose(out, [(3 + 4j) * 0.8, 0.0, 0.0, -1.0])


def test_zero_data_gives_zero(rng):
    problem = SparseProblem(crandn(rng, 4, 3), np.zeros(4), 0.5)
    res = sparse_code(problem)
    assert np.array_equal(res.values, np.zeros(3))
    assert res.objective == 0.0


def test_identity_unregularized(rng):
    p = crandn(rng, 3)
    res = sparse_code(SparseProblem(np.eye(3), p, 0.0))
    np.testing.assert_allclose(res.values, p, atol=1e-7)
    assert res.converged


def test_scalar_case_against_grid_search():
    # brute-force minimization of |2 - x|^2 + |x| over a complex grid
    re = np.linspace(0.0, 3.0, 3001)
    im = np.linspace(-0.5, 0.5, 1001)
    xr, xi = np.meshgrid(re, im)
    x = xr + 1j * xi
    vals = np.abs(2 - x) ** 2 + np.abs(x)
    best = x.ravel()[np.argmin(vals)]
    assert best == pytest.approx(1.5 + 0j, abs=1e-3)

    res = sparse_code(SparseProblem(np.eye(1), [2.0 + 0j], 1.0))
    assert res.values[0] == pytest.approx(best, abs=1e-3)
    assert res.values[0] == pytest.approx(1.5 + 0j, abs=1e-8)


def test_objective_examples(rng):
    a, p = crandn(rng, 4, 3), crandn(rng, 4)
    problem = SparseProblem(a, p, 0.7)
    assert objective(problem, np.zeros(3)) == pytest.approx(np.sum(np.abs(p) ** 2), rel=1e-14)

    x = crandn(rng, 3)
    naive = sum(abs(p[i] - sum(a[i, j] * x[j] for j in range(3))) ** 2 for i in range(4))
    naive += 0.7 * sum(abs(v) for v in x)
    assert objective(problem, x) == pytest.approx(naive, rel=1e-12)

    sq = crandn(rng, 3, 3)
    xs = crandn(rng, 3)
    assert objective(SparseProblem(sq, sq @ xs, 0.0), xs) < 1e-10

    with pytest.raises(ValueError):
        objective(problem, np.zeros(4))


def test_largest_eigenvalue(rng):
    a = crandn(rng, 6, 4)
    assert largest_eigenvalue(a) == pytest.approx(np.linalg.eigvalsh(a.conj().T @ a).max(), rel=1e-9)


def test_rejects_bad_input(rng):
    with pytest.raises(NumericError):
        sparse_code(SparseProblem(np.array([[np.nan]]), [1.0], 1.0))
    with pytest.raises(ValueError):
        SparseProblem(np.eye(2), [1.0, 2.0, 3.0], 1.0)
    with pytest.raises(ValueError):
        SparseProblem(np.eye(2), [1.0, 2.0], -1.0)
    with pytest.raises(ValueError):
        sparse_code(SparseProblem(np.eye(2), [1.0, 2.0], 1.0), tol=0.0)


def test_coefficients_objective_consistent(rng):
    problem = random_problem(rng, 5, 4, 0.3)
    res = sparse_code(problem)
    assert res.objective >= 0
    assert res.objective == pytest.approx(objective(problem, res.values), rel=1e-10)
    assert res.objective <= np.sum(np.abs(problem.observations) ** 2)


@given(seed=st.integers(0, 100_000), alpha=st.sampled_from([0.1, 1.0, 10.0]))
@settings(max_examples=50, deadline=None)
def test_monotone_history(seed, alpha):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)), alpha)
    hist = sparse_code(problem, record_history=True).history
    assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))


@given(seed=st.integers(0, 100_000), alpha=st.sampled_from([0.1, 1.0, 10.0]))
@settings(max_examples=50, deadline=None)
def test_optimality_certificate(seed, alpha):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)), alpha)
    tol = 1e-8
    res = sparse_code(problem, tol=tol)
    assert res.converged
    a, p = problem.design, problem.observations
    assert min_subgradient(a, p, alpha, res.values) <= 10 * tol * max(1.0, 2 * np.linalg.norm(a.conj().T @ p))


@given(seed=st.integers(0, 100_000))
@settings(max_examples=30, deadline=None)
def test_sparsity_shrinks_with_alpha(seed):
    rng = np.random.default_rng(seed)
    a, p = crandn(rng, 4, 5), crandn(rng, 4)
    l1 = [np.abs(sparse_code(SparseProblem(a, p, al)).values).sum() for al in (0.1, 1.0, 10.0)]
    assert l1[1] <= l1[0] + 1e-8
    assert l1[2] <= l1[1] + 1e-8


def test_matches_coordinate_descent(rng):
    for i in range(30):
        m, l = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        alpha = [0.1, 1.0, 10.0][i % 3]
        problem = random_problem(rng, m, l, alpha)
        ref = objective(problem, coordinate_descent(problem.design, problem.observations, alpha))
        got = sparse_code(problem).objective
        assert got <= ref * (1 + 1e-6)
        assert got >= ref * (1 - 1e-6)


def test_warm_start_never_worse(rng):
    problem = random_problem(rng, 5, 5, 1.0)
    x0 = sparse_code(problem).values
    res = sparse_code(problem, max_iters=1, x0=x0)
    assert res.objective <= objective(problem, x0)
