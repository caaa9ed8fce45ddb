"""Command line entry point: ``helmfield {synth,dict,reconstruct,sweep,score}``.

Exit codes: 0 on success, 2 on invalid input (arguments, files, formats),
3 on numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..dictionary import atom_frequencies, sample_baseline_dictionary
from ..errors import FieldFormatError, NumericError
from ..grid import Grid2D, draw_mask
from ..learner import LearnConfig, fit_coefficients, learn, reconstruct, synthesize
from ..metrics import ncc, ncc_literal, nmse_db
from ..synthfield import add_noise, sample_field
from .io import field_filename, load_field, save_dictionary, save_field, save_report
from .sweep import SyntheticSource, eval_frequencies, load_sweep_config, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("helmfield")


def _fmt(x: float) -> str:
    return "-inf" if x == -np.inf else f"{x:.6f}"


def cmd_synth(args) -> int:
    source = SyntheticSource(args.n, args.spacing, args.kind, args.count, args.seed, args.distance)
    if args.band:
        freqs = eval_frequencies(args.band[0], args.band[1], args.step)
    else:
        freqs = args.freq or [600.0]
    out = Path(args.out)
    if out.suffix == ".csv" and len(freqs) == 1:
        save_field(source.field(freqs[0]), out)
    else:
        out.mkdir(parents=True, exist_ok=True)
        for f in freqs:
            save_field(source.field(f), out / field_filename(f))
    log.info("wrote %d field file(s) to %s", len(freqs), out)
    return EXIT_OK


def cmd_dict(args) -> int:
    grid = Grid2D(args.n, args.spacing)
    freqs = atom_frequencies(args.band[0], args.band[1], args.atoms)
    save_dictionary(sample_baseline_dictionary(grid, freqs, args.seed), args.out)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    truth = load_field(args.field)
    grid = truth.grid
    lo, hi = args.band if args.band else (truth.freq_hz - 100.0, truth.freq_hz + 100.0)
    cfg = LearnConfig(alpha=args.alpha, beta=args.beta, outer_iters=args.iters, band_lo_hz=lo,
                      band_hi_hz=hi, num_atoms=args.atoms, operator_variant=args.variant,
                      init_seed=args.seed)
    mask = draw_mask(grid, args.mics, args.seed)
    ms = sample_field(truth, mask)
    if args.snr is not None:
        ms = add_noise(ms, args.snr, args.seed)
    if args.method == "BL":
        base = sample_baseline_dictionary(grid, cfg.atom_freqs(), cfg.init_seed)
        estimate = synthesize(base, fit_coefficients(base, ms, cfg.alpha).values, truth.freq_hz)
    else:
        estimate = reconstruct(learn(ms, grid, truth.freq_hz, cfg))
    if args.out:
        save_field(estimate, args.out)
    score_ncc = ncc_literal if args.ncc_literal else ncc
    print(f"method={args.method} m={args.mics} freq_hz={truth.freq_hz:g} "
          f"nmse_db={_fmt(nmse_db(truth, estimate))} ncc={score_ncc(truth, estimate):.6f} "
          f"mask_hash={mask.digest()}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec, source = load_sweep_config(args.config)
    overrides = {}
    if args.reuse_dict_within_band:
        overrides["reuse_dict_within_band"] = True
    if args.timing:
        overrides["record_timing"] = True
    if args.ncc_literal:
        overrides["literal_ncc"] = True
    if overrides:
        spec = replace(spec, **overrides)
    rows = run_sweep(spec, source, threads=args.threads)
    save_report(rows, args.out)
    log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def cmd_score(args) -> int:
    truth, estimate = load_field(args.truth), load_field(args.estimate)
    score_ncc = ncc_literal if args.ncc_literal else ncc
    print(f"nmse_db={_fmt(nmse_db(truth, estimate))} ncc={score_ncc(truth, estimate):.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helmfield",
                                     description="Physics-informed dictionary learning for sound fields")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write synthetic field files")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--spacing", type=float, default=0.025)
    p.add_argument("--kind", choices=["plane_waves", "cylindrical"], default="plane_waves")
    p.add_argument("--count", type=int, default=5, help="number of waves / sources")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distance", type=float, default=0.5,
                   help="cylindrical sources: distance beyond the grid's circumcircle (m)")
    p.add_argument("--freq", type=float, action="append", help="frequency in Hz (repeatable)")
    p.add_argument("--band", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--step", type=float, default=2.5)
    p.add_argument("--out", required=True, help="directory, or a .csv path for one frequency")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("dict", help="write a baseline Bessel dictionary")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--spacing", type=float, default=0.025)
    p.add_argument("--band", type=float, nargs=2, default=[500.0, 700.0], metavar=("LO", "HI"))
    p.add_argument("--atoms", type=int, default=21)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dict)

    p = sub.add_parser("reconstruct", help="reconstruct one field from random microphones")
    p.add_argument("field")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=40)
    p.add_argument("--atoms", type=int, default=21)
    p.add_argument("--band", type=float, nargs=2, metavar=("LO", "HI"),
                   help="atom band (default: field frequency +- 100 Hz)")
    p.add_argument("--mics", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=["paper", "grid"], default="paper")
    p.add_argument("--method", choices=["BL", "Proposed"], default="Proposed")
    p.add_argument("--snr", type=float, default=None, help="add noise at this SNR (dB)")
    p.add_argument("--ncc-literal", action="store_true")
    p.add_argument("--out", help="write the reconstructed field here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sweep", help="run a band / microphone / fold sweep from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $HELMFIELD_THREADS, 0 = auto)")
    p.add_argument("--reuse-dict-within-band", action="store_true")
    p.add_argument("--timing", action="store_true", help="record wall times (report no longer reproducible)")
    p.add_argument("--ncc-literal", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("score", help="NMSE / NCC between two field files")
    p.add_argument("truth")
    p.add_argument("estimate")
    p.add_argument("--ncc-literal", action="store_true")
    p.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FieldFormatError, ValueError, IndexError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
