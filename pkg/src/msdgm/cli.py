"""Command-line entry point: ``msdgm analyze | simulate | recovery-study | spectra dump``."""
from __future__ import annotations

import argparse
import io
import os
import sys
import warnings
from pathlib import Path

from .errors import MsdgmError
from .graph import to_dot, to_json, component_census
from .partial import write_edge_statistics, write_partial
from .pattern import ColumnSchema, MarkedPointPattern, Window, dumps_pattern, load_pattern
from .pipeline import DEFAULT_THRESHOLDS, AnalysisResult, EstimationConfig, analyze, preprocess
from .simulate import SimulationSpec, simulate
from .smoothing import smooth_field
from .spectra import FrequencyGrid, periodogram_field, write_field


def _alpha_tag(alpha: float) -> str:
    return repr(alpha)


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="delimited text file with a header row")
    p.add_argument("--x-col", default="x")
    p.add_argument("--y-col", default="y")
    p.add_argument("--type-col", default="type")
    p.add_argument("--mark-col", default="mark")
    p.add_argument("--tab", action="store_true", help="tab-delimited input")
    p.add_argument("--window", nargs=4, type=float, metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
                   help="observation window (default: bounding box of the data)")


def _add_estimation_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-max", type=int, default=16)
    p.add_argument("--q-max", type=int, default=16)
    p.add_argument("--kernel", choices=("uniform", "triangular"), default="uniform")
    p.add_argument("--bandwidth", type=int, default=None,
                   help="smoothing half-width h (default: max(3, smallest h with (2h+1)^2 >= d))")
    p.add_argument("--ridge", type=float, default=1e-8)
    p.add_argument("--thresholds", nargs="+", type=float, default=list(DEFAULT_THRESHOLDS))
    p.add_argument("--min-n", type=int, default=1, help="drop types with fewer points")
    p.add_argument("--workers", type=int, default=1, help="threads for the per-frequency inversion")


def _config(args) -> EstimationConfig:
    return EstimationConfig(p_max=args.p_max, q_max=args.q_max, kernel=args.kernel, bandwidth=args.bandwidth,
                            ridge=args.ridge, thresholds=tuple(args.thresholds), min_n=args.min_n,
                            workers=args.workers)


def _load(args) -> MarkedPointPattern:
    schema = ColumnSchema(args.x_col, args.y_col, args.type_col, args.mark_col, "\t" if args.tab else ",")
    window = Window(*args.window) if args.window else None
    return load_pattern(args.input, schema, window)


class _Outputs:
    """Track written files so a failed run can remove them."""

    def __init__(self):
        self.paths: list[Path] = []

    def write(self, path: Path, text: str) -> None:
        self.paths.append(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def rollback(self) -> None:
        for p in self.paths:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _report(res: AnalysisResult, config: EstimationConfig, input_name: str) -> str:
    lines = [f"input: {input_name}", f"types: {res.pattern.d}", f"points: {res.pattern.n}"]
    for t in res.pattern.types:
        lines.append(f"  {t.name}: n={t.count} mark_mean={t.mark_mean!r}")
    lines.append(f"dropped types: {', '.join(res.dropped) if res.dropped else 'none'}")
    lines.append(f"grid: p=0..{config.p_max}, q={-config.q_max}..{config.q_max - 1}")
    s = res.smoother
    lines.append(f"smoother: kernel={s.kernel} half_width={s.half_width} ridge={s.ridge!r}")
    lines.append(f"usable frequencies: {res.statistics.n_frequencies} of {res.inverse.flags.size}")
    for name, count in res.inverse.flag_counts().items():
        lines.append(f"  flagged {name}: {count}")
    lines.append(f"regularized frequencies: {int(res.inverse.regularized.sum())}")
    for alpha, g in res.graphs.items():
        census = ", ".join(f"{k}:{v}" for k, v in component_census(g).items())
        lines.append(f"alpha={alpha!r}: edges={len(g.edges)} component sizes {{{census}}}")
    lines.append("timing (s): " + ", ".join(f"{k}={v:.3f}" for k, v in res.timing.items()))
    return "\n".join(lines) + "\n"


def run_analyze(args) -> int:
    config = _config(args)
    pattern = _load(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    res = analyze(pattern, config)
    outputs = _Outputs()
    try:
        for alpha, g in res.graphs.items():
            stem = f"msdgm_alpha_{_alpha_tag(alpha)}"
            outputs.write(out_dir / f"{stem}.dot", to_dot(g))
            outputs.write(out_dir / f"{stem}.json", to_json(g))
        buf = io.StringIO()
        write_edge_statistics(res.statistics, buf)
        outputs.write(out_dir / "edge_statistics.csv", buf.getvalue())
        outputs.write(out_dir / "report.txt", _report(res, config, os.path.basename(args.input)))
    except BaseException:
        outputs.rollback()
        raise
    print(f"wrote {len(outputs.paths)} files to {out_dir}")
    return 0


def run_simulate(args) -> int:
    spec = SimulationSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    text = dumps_pattern(simulate(spec))
    Path(args.out).write_text(text, encoding="utf-8")
    names = spec.type_names
    truth = sorted(tuple(sorted(p)) for p in spec.truth())
    print("coupled pairs: " + (", ".join(f"{names[i]}-{names[j]}" for i, j in truth) if truth else "none"))
    return 0


def recovery_study(spec: SimulationSpec, replicates: int, config: EstimationConfig):
    """Simulate, analyze and score ``replicates`` patterns with seeds spec.seed + r.

    Returns raw rows (replicate, seed, alpha, tp, fn, fp, tn).
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    truth = spec.truth()
    pairs = [frozenset((i, j)) for i in range(spec.d) for j in range(i + 1, spec.d)]
    rows = []
    for r in range(replicates):
        seed = (spec.seed + r) % 2**64
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = analyze(simulate(spec.with_seed(seed)), config)
        for alpha, g in res.graphs.items():
            found = g.edge_set
            tp = sum(1 for p in pairs if p in truth and p in found)
            fp = sum(1 for p in pairs if p not in truth and p in found)
            rows.append((r, seed, alpha, tp, len(truth) - tp, fp, len(pairs) - len(truth) - fp))
    return rows


def _rate(num: int, den: int) -> str:
    return repr(num / den) if den else "nan"


def run_recovery_study(args) -> int:
    spec = SimulationSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    config = _config(args)
    rows = recovery_study(spec, args.replicates, config)
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("replicate,seed,alpha,tp,fn,fp,tn,tp_rate,fp_rate\n")
            for r, seed, alpha, tp, fn, fp, tn in rows:
                fh.write(f"{r},{seed},{alpha!r},{tp},{fn},{fp},{tn},{_rate(tp, tp + fn)},{_rate(fp, fp + tn)}\n")
    print("alpha,replicates,tp_rate,fp_rate,mean_fp_edges")
    for alpha in config.thresholds:
        sel = [row for row in rows if row[2] == alpha]
        tp = sum(x[3] for x in sel)
        fn = sum(x[4] for x in sel)
        fp = sum(x[5] for x in sel)
        tn = sum(x[6] for x in sel)
        print(f"{alpha!r},{len(sel)},{_rate(tp, tp + fn)},{_rate(fp, fp + tn)},{fp / len(sel)!r}")
    return 0


def run_spectra_dump(args) -> int:
    pattern, _ = preprocess(_load(args), args.min_n)
    grid = FrequencyGrid(args.p_max, args.q_max)
    field = periodogram_field(pattern, grid)
    if args.smoothed or args.partial:
        config = _config(args)
        smoother = config.smoother(pattern.d)
        field = smooth_field(field, smoother)
    buf = io.StringIO()
    if args.partial:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = analyze(pattern, _config(args))
        write_partial(res.partial, buf)
    else:
        write_field(field, buf)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msdgm", description="Marked spatial dependence graph models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="estimate dependence graphs from a pattern file")
    _add_input_args(p)
    _add_estimation_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=run_analyze)

    p = sub.add_parser("simulate", help="write a synthetic pattern from a JSON spec")
    p.add_argument("spec", help="JSON simulation spec")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("recovery-study", help="score edge recovery over simulated replicates")
    p.add_argument("spec", help="JSON simulation spec")
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--log", default=None, help="per-replicate raw rows")
    _add_estimation_args(p)
    p.set_defaults(func=run_recovery_study)

    p = sub.add_parser("spectra", help="intermediate spectral output")
    spectra_sub = p.add_subparsers(dest="spectra_command", required=True)
    dump = spectra_sub.add_parser("dump", help="write the periodogram field (or partial strengths) as rows")
    _add_input_args(dump)
    _add_estimation_args(dump)
    dump.add_argument("--smoothed", action="store_true", help="dump the smoothed field instead of the raw one")
    dump.add_argument("--partial", action="store_true", help="dump |d_ij| per usable frequency")
    dump.add_argument("--out", default="-")
    dump.set_defaults(func=run_spectra_dump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MsdgmError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
