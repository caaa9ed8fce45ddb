"""Acceptance checks, one per criterion; each prints a PASS/FAIL line with its measurement."""

import os
import time

import mpmath
import numpy as np
import pytest

from helmfield.dictionary import sample_baseline_dictionary
from helmfield.experiment.cli import main
from helmfield.experiment.sweep import DatasetSource, SweepSpec, SyntheticSource, run_sweep
from helmfield.grid import Grid2D, draw_mask
from helmfield.helmholtz import Variant, build_operator, interior_indices, wavenumber
from helmfield.learner import LearnConfig, fit_coefficients, learn, reconstruct, synthesize
from helmfield.metrics import ncc, nmse_db
from helmfield.sparse import SparseProblem, sparse_code
from helmfield.synthfield import plane_wave_field, random_plane_waves, sample_field

from .conftest import crandn

DATASET_ENV = "HELMFIELD_CLASSROOM_DIR"


@pytest.fixture
def verdict(capsys):
    start = time.perf_counter()

    def emit(name, ok, detail, budget_s):
        elapsed = time.perf_counter() - start
        ok = bool(ok) and elapsed < budget_s
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({elapsed:.1f} s, budget {budget_s:g} s)")
        assert ok, f"{name}: {detail}"

    return emit


def _symbol_oracle(k, h, theta):
    # arbitrary precision so the comparison does not share rounding with the operator
    kh = mpmath.mpf(k) * mpmath.mpf(h)
    th = mpmath.mpf(theta)
    val = -4 + kh ** 2 + 2 * mpmath.cos(kh * mpmath.cos(th)) + 2 * mpmath.cos(kh * mpmath.sin(th))
    return float(abs(val))


def test_criterion_1_stencil_symbol(verdict):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(8, 33))
        freq = float(rng.uniform(300, 1200))
        theta_deg = float(rng.uniform(0, 360))
        grid = Grid2D(n, 0.025)
        field = plane_wave_field(grid, freq, [theta_deg], [1.0])
        op = build_operator(grid, freq, Variant.GRID_AWARE)
        inner = interior_indices(n)
        r = (op.matrix @ field.values)[inner]
        rel = np.linalg.norm(r) / np.linalg.norm(field.values[inner])
        pred = _symbol_oracle(wavenumber(freq), 0.025, np.deg2rad(theta_deg))
        worst = max(worst, rel / pred, pred / rel)
    verdict("1 stencil symbol", worst <= 1.05, f"worst ratio to symbol oracle {worst:.12f}", 5)


def test_criterion_2_sparse_oracle(verdict):
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(100):
        m, l = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        alpha = (0.1, 1.0, 10.0)[i % 3]
        a, p = crandn(rng, m, l), crandn(rng, m)
        got = sparse_code(SparseProblem(a, p, alpha)).objective
        x = cp.Variable(l, complex=True)
        prob = cp.Problem(cp.Minimize(cp.sum_squares(p - a @ x) + alpha * cp.norm1(x)))
        prob.solve(solver=cp.CLARABEL)
        ref = prob.value
        worst = max(worst, abs(got - ref) / ref)
    verdict("2 sparse oracle", worst <= 1e-6, f"worst relative objective gap {worst:.2e}", 30)


def _instance(n, m, freq, waves, wave_seed, mask_seed):
    grid = Grid2D(n, 0.025)
    angles, amps = random_plane_waves(waves, wave_seed)
    truth = plane_wave_field(grid, freq, angles, amps)
    return grid, truth, sample_field(truth, draw_mask(grid, m, mask_seed))


def test_criterion_3_alternating_descent(verdict):
    worst = -np.inf
    for s in range(10):
        grid, _, ms = _instance(16, 60, 600.0, 5, 100 + s, s)
        res = learn(ms, grid, 600.0, LearnConfig(num_atoms=11, init_seed=s))
        assert len(res.objective_trace) == 40
        seq = [v for pair in res.step_objectives for v in pair]
        rel = max((b - a) / a for a, b in zip(seq, seq[1:]))
        worst = max(worst, rel)
    verdict("3 alternating descent", worst <= 1e-8, f"largest relative increase {worst:.3e}", 120)


def test_criterion_4_row_freeze(verdict):
    grid, _, ms = _instance(16, 60, 600.0, 5, 3, 3)
    cfg = LearnConfig(beta=0.0)
    res = learn(ms, grid, 600.0, cfg)
    init = sample_baseline_dictionary(grid, cfg.atom_freqs(), cfg.init_seed)
    free = np.setdiff1d(np.arange(grid.size), ms.mask.as_array())
    frozen = np.array_equal(res.dictionary.atoms[free], init.atoms[free])
    moved = not np.array_equal(res.dictionary.atoms, init.atoms)
    verdict("4 beta=0 row freeze", frozen and moved,
            f"unmeasured rows bit-identical={frozen}, measured rows changed={moved}", 10)


def test_criterion_5_physics_wins(verdict):
    cfg = LearnConfig()
    grid = Grid2D(32, 0.025)
    angles, amps = random_plane_waves(5, 11)
    truth = plane_wave_field(grid, 600.0, angles, amps)
    base = sample_baseline_dictionary(grid, cfg.atom_freqs(), cfg.init_seed)
    prop, bl = [], []
    for fold in range(5):
        ms = sample_field(truth, draw_mask(grid, 150, fold))
        prop.append(nmse_db(truth, reconstruct(learn(ms, grid, 600.0, cfg, init=base))))
        bl.append(nmse_db(truth, synthesize(base, fit_coefficients(base, ms, cfg.alpha).values, 600.0)))
    p, b = float(np.mean(prop)), float(np.mean(bl))
    verdict("5 physics regularization wins", p <= -10.0 and p <= b - 3.0,
            f"Proposed {p:.2f} dB, BL {b:.2f} dB", 600)


def test_criterion_6_classroom(verdict, capsys):
    directory = os.environ.get(DATASET_ENV)
    if not directory:
        with capsys.disabled():
            print(f"\n[SKIP] 6 full-scale classroom reproduction: set {DATASET_ENV} to a directory of f<freq>.csv files")
        pytest.skip(f"{DATASET_ENV} not set; criterion is conditional on the external dataset")
    spec = SweepSpec(bands_hz=((500.0, 700.0),), mic_counts=(50,), folds=5)
    rows = run_sweep(spec, DatasetSource(directory))
    prop = [r for r in rows if r.method == "Proposed"]
    bl = [r for r in rows if r.method == "BL"]
    pn = float(np.mean([r.nmse_db for r in prop]))
    pc = float(np.mean([r.ncc for r in prop]))
    bn = float(np.mean([r.nmse_db for r in bl]))
    ok = abs(pn + 3.56) <= 1.0 and abs(pc - 0.738) <= 0.05 and abs(bn + 1.07) <= 1.0
    verdict("6 full-scale classroom reproduction", ok,
            f"Proposed {pn:.2f} dB / NCC {pc:.3f}, BL {bn:.2f} dB", float("inf"))


def test_criterion_7_metrics(verdict):
    truth = np.array([1.0, 0.0])
    nm = nmse_db(truth, np.array([0.5, 0.0]))
    c = ncc(truth, (0.3 - 2.0j) * truth)
    orth = ncc(truth, np.array([0.0, 1.0]))
    diag = ncc(truth, np.array([1.0, 1.0]) / np.sqrt(2))
    ok = (abs(nm + 6.0206) <= 1e-4 and abs(nm - 10 * np.log10(0.25)) <= 1e-6
          and abs(c - 1.0) <= 1e-12 and orth == 0.0 and abs(diag - 1 / np.sqrt(2)) <= 1e-12
          and nmse_db(truth, truth) == -np.inf and nmse_db(truth, np.zeros(2)) == 0.0)
    verdict("7 metric examples", ok, f"nmse {nm:.6f} dB, collinear ncc {c:.15f}", 1)


def test_criterion_8_determinism(verdict, tmp_path, monkeypatch):
    cfg = tmp_path / "sweep.json"
    cfg.write_text('{"bands_hz": [[595.0, 605.0]], "eval_freq_step_hz": 5.0, "mic_counts": [150],'
                   ' "folds": 2, "source": {"synthetic": {"n": 32, "count": 5, "seed": 11}}}')
    outputs = []
    for threads in ("1", "4", "0"):
        monkeypatch.setenv("HELMFIELD_THREADS", threads)
        out = tmp_path / f"report_{threads}.csv"
        assert main(["sweep", str(cfg), "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    rows = outputs[0].count(b"\n") - 1
    same = all(o == outputs[0] for o in outputs)
    verdict("8 determinism", same and rows == 12,
            f"{rows} rows, identical bytes across HELMFIELD_THREADS=1,4,0: {same}", 300)


def test_criterion_9_wideband_reuse(verdict):
    spec = SweepSpec(bands_hz=((500.0, 700.0),), eval_freq_step_hz=2.5, mic_counts=(150,),
                     folds=1, methods=("Proposed",), reuse_dict_within_band=True)
    source = SyntheticSource(n=32, count=5, seed=11)
    rows = run_sweep(spec, source, threads=1)
    row = next(r for r in rows if abs(r.freq_hz - 557.5) < 1e-9)
    verdict("9 wideband reuse", row.nmse_db < 0.0, f"NMSE at 557.5 Hz {row.nmse_db:.2f} dB", 120)
