"""Command-line front end.

Four subcommands: ``segment`` fits one CSV signal and writes a JSON result,
``generate`` builds a synthetic corpus with a truth manifest, ``bench``
compares algorithms over a corpus and writes CSV reports, and ``eval``
scores a predicted segmentation against a truth file.

Exit codes: 0 on success, 1 for runtime failures (unreadable files, an
algorithm that cannot deliver), 2 for usage and contract violations
(malformed signal rows, infeasible k, unknown names, bad ranges).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as benchmod
from .exceptions import (
    InfeasibleSegmentationError,
    PeakSelectionError,
    SignalFormatError,
)
from .io import (
    read_change_points,
    read_manifest,
    read_signal_csv,
    result_document,
    write_manifest,
    write_result_json,
    write_signal_csv,
)
from .metrics import covering_score, rand_index
from .registry import ALGORITHM_NAMES, RunOptions, run_algorithm
from .signal import build_prefix_stats, ksegment_cost
from .synth import SynthSpec, generate_corpus

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _add_algo_options(parser: argparse.ArgumentParser) -> None:
    grp = parser.add_argument_group("algorithm options")
    grp.add_argument("--gamma", type=int, default=2,
                     help="minimum points per segment (default 2)")
    grp.add_argument("--epsilon", type=float, default=1e-6,
                     help="relative-improvement stopping threshold")
    grp.add_argument("--rmax", type=int, default=30,
                     help="max refinement iterations")
    grp.add_argument("--seed", type=int, default=0,
                     help="seed for randomized initializations")
    grp.add_argument("--delta", type=int, default=2,
                     help="initial cell width for bottom-up merging")
    grp.add_argument("--window", type=int, default=50,
                     help="window width for the sliding-window baseline")
    grp.add_argument("--q", type=int, default=20,
                     help="number of random restarts for lm-20inits")


def _options(args: argparse.Namespace) -> RunOptions:
    return RunOptions(
        gamma=args.gamma,
        epsilon=args.epsilon,
        r_max=args.rmax,
        rng_seed=args.seed,
        delta=args.delta,
        window=args.window,
        q=args.q,
    )


def cmd_segment(args: argparse.Namespace) -> int:
    signal = read_signal_csv(args.input)
    start = time.perf_counter()
    stats = build_prefix_stats(signal)
    seg = run_algorithm(args.algo, signal, stats, args.k, _options(args))
    elapsed = time.perf_counter() - start
    doc = result_document(
        signal, seg, ksegment_cost(signal, seg), args.algo, elapsed
    )
    if args.output is None:
        print(json.dumps(doc, indent=2))
    else:
        write_result_json(args.output, doc)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    for lo, hi in (args.size_range, args.k_range, args.d_range):
        if lo > hi:
            print(f"error: empty range ({lo}, {hi})", file=sys.stderr)
            return EXIT_USAGE
    base = SynthSpec(
        n=args.size_range[0],
        d=args.d_range[0],
        k=args.k_range[0],
        poly_degree_max=args.poly_degree_max,
        nonlinear_scale=args.nonlinear_scale,
        noise_gaussian_sigma=args.sigma,
        noise_trig_amp=args.trig_amp,
        impulse_prob=args.impulse_prob,
        impulse_amp=args.impulse_amp,
        min_segment_frac=args.min_segment_frac,
        jump_min=args.jump_min,
    )
    corpus = generate_corpus(
        base,
        args.count,
        tuple(args.size_range),
        tuple(args.k_range),
        tuple(args.d_range),
        seed=args.seed,
    )
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (signal, truth, spec) in enumerate(corpus):
        name = f"signal_{i:04d}.csv"
        write_signal_csv(out_dir / name, signal)
        entries.append(
            {
                "path": name,
                "n": spec.n,
                "d": spec.d,
                "k": spec.k,
                "seed": spec.rng_seed,
                "change_points": [int(b) for b in truth],
            }
        )
    write_manifest(out_dir / "manifest.jsonl", entries)
    print(f"wrote {len(entries)} signals to {out_dir}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    corpus_dir = Path(args.corpus_dir)
    manifest_path = corpus_dir / "manifest.jsonl"
    if not manifest_path.exists():
        print(f"error: no manifest at {manifest_path}", file=sys.stderr)
        return EXIT_USAGE
    for name in args.algos:
        if name not in ALGORITHM_NAMES:
            known = ", ".join(ALGORITHM_NAMES)
            print(
                f"error: unknown algorithm {name!r} (known: {known})",
                file=sys.stderr,
            )
            return EXIT_USAGE
    if args.baseline not in args.algos:
        print(
            f"error: baseline {args.baseline!r} is not among the "
            f"selected algorithms",
            file=sys.stderr,
        )
        return EXIT_USAGE
    items = []
    for entry in read_manifest(manifest_path):
        signal = read_signal_csv(corpus_dir / entry["path"])
        truth = np.asarray(entry.get("change_points", []), dtype=np.intp)
        items.append(
            benchmod.CorpusItem(
                signal_id=entry["path"],
                signal=signal,
                k=int(entry["k"]),
                truth=truth,
            )
        )
    reports = benchmod.evaluate(items, args.algos, _options(args))
    summary = benchmod.summarize(reports, args.baseline, args.algos)
    deficits = benchmod.deficit_rows(reports, args.algos)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    benchmod.write_reports_csv(out_dir / "runs.csv", reports)
    benchmod.write_summary_csv(out_dir / "summary.csv", summary)
    benchmod.write_deficit_csv(out_dir / "deficit.csv", deficits)
    header = (
        f"{'algorithm':<12} {'rel_runtime':>11} {'rel_cost':>9} "
        f"{'covering':>9} {'rand':>7}"
    )
    print(header)
    for row in summary:
        cov = "-" if row["covering"] is None else f"{row['covering']:.3f}"
        ri = "-" if row["rand_index"] is None else f"{row['rand_index']:.3f}"
        print(
            f"{row['algorithm']:<12} {row['rel_runtime']:>11.3f} "
            f"{row['rel_cost']:>9.3f} {cov:>9} {ri:>7}"
        )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    pred, n_pred = read_change_points(args.predicted)
    truth, n_true = read_change_points(args.truth)
    if n_pred != n_true:
        print(
            f"error: signal lengths differ ({n_pred} vs {n_true})",
            file=sys.stderr,
        )
        return EXIT_USAGE
    print(f"covering {covering_score(truth, pred, n_true):.5f}")
    print(f"rand_index {rand_index(truth, pred, n_true):.5f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kseg",
        description="Piecewise-linear segmentation of time-indexed signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_seg = sub.add_parser(
        "segment", help="segment one CSV signal and emit a JSON result"
    )
    p_seg.add_argument("input", help="signal CSV (header time,f0,...)")
    p_seg.add_argument("--k", type=int, required=True,
                       help="number of segments")
    p_seg.add_argument("--algo", default="lm-botup", choices=ALGORITHM_NAMES)
    p_seg.add_argument("--output", default=None,
                       help="result JSON path (default: stdout)")
    _add_algo_options(p_seg)
    p_seg.set_defaults(func=cmd_segment)

    p_gen = sub.add_parser(
        "generate", help="write a synthetic corpus plus truth manifest"
    )
    p_gen.add_argument("--count", type=int, required=True)
    p_gen.add_argument("--output-dir", required=True)
    p_gen.add_argument("--size-range", type=int, nargs=2, default=[50, 2000],
                       metavar=("MIN", "MAX"))
    p_gen.add_argument("--k-range", type=int, nargs=2, default=[2, 10],
                       metavar=("MIN", "MAX"))
    p_gen.add_argument("--d-range", type=int, nargs=2, default=[2, 16],
                       metavar=("MIN", "MAX"))
    p_gen.add_argument("--seed", type=int, default=0)
    defaults = SynthSpec(n=2, d=1, k=1)
    p_gen.add_argument("--sigma", type=float,
                       default=defaults.noise_gaussian_sigma,
                       help="gaussian noise level")
    p_gen.add_argument("--trig-amp", type=float,
                       default=defaults.noise_trig_amp,
                       help="oscillatory noise amplitude")
    p_gen.add_argument("--impulse-prob", type=float,
                       default=defaults.impulse_prob)
    p_gen.add_argument("--impulse-amp", type=float,
                       default=defaults.impulse_amp)
    p_gen.add_argument("--nonlinear-scale", type=float,
                       default=defaults.nonlinear_scale,
                       help="polynomial bend size relative to segment swing")
    p_gen.add_argument("--poly-degree-max", type=int,
                       default=defaults.poly_degree_max)
    p_gen.add_argument("--min-segment-frac", type=float,
                       default=defaults.min_segment_frac)
    p_gen.add_argument("--jump-min", type=float, default=defaults.jump_min,
                       help="minimum level change planted at each boundary")
    p_gen.set_defaults(func=cmd_generate)

    p_bench = sub.add_parser(
        "bench", help="compare algorithms over a generated corpus"
    )
    p_bench.add_argument("corpus_dir", help="directory with manifest.jsonl")
    p_bench.add_argument("--algos", nargs="+", required=True,
                         help=f"subset of: {', '.join(ALGORITHM_NAMES)}")
    p_bench.add_argument("--baseline", required=True,
                         help="algorithm runtimes/costs are divided by")
    p_bench.add_argument("--output-dir", required=True,
                         help="where runs.csv, summary.csv, deficit.csv go")
    _add_algo_options(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_eval = sub.add_parser(
        "eval", help="score predicted change points against truth"
    )
    p_eval.add_argument("predicted", help="result JSON from `segment`")
    p_eval.add_argument(
        "truth",
        help='result JSON or bare {"n": ..., "change_points": [...]} file',
    )
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        return args.func(args)
    except SignalFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleSegmentationError as err:
        print(f"error: infeasible k ({err})", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        # covers malformed JSON, bad ranges, unknown names
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except PeakSelectionError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
