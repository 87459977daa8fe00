"""Command-line benchmark and transform harness.

Subcommands: `roundtrip` (random-signal accuracy/timing), `bench` (scaling
sweep over band-limits), `quadrature` (exactness checks) and `transform`
(file-to-file forward/inverse).  Report subcommands write a schema-stable
CSV, a two-column `.dat` companion and matplotlib figures next to the CSV
(disable the figures with --no-plot).  Exit code 0 on success, 2 with a
one-line diagnostic on any contract violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import NumericalIntegrityError
from .grid import BandLimits, read_coeffs, read_samples, write_coeffs, write_samples
from .harness import (
    bench_scaling,
    quadrature_check,
    roundtrip,
    scaling_ratios,
    write_dat,
    write_quadrature_csv,
    write_reports_csv,
)
from .transform import TransformPlan, forward_naive, inverse_naive


def _limits_from_args(args) -> BandLimits:
    M = args.M if args.M is not None else args.L
    N = args.N if args.N is not None else args.L
    return BandLimits(args.L, M, N)


def _add_common(parser, with_path=True):
    parser.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    parser.add_argument("--out", type=Path, default=None, help="CSV output path")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip rendering figures next to --out")
    if with_path:
        parser.add_argument("--path", choices=["auto", "3d", "per-n", "naive"],
                            default="auto", help="transform algorithm")
        parser.add_argument("--parallel", action="store_true",
                            help="run per-n sub-transforms on a thread pool")


def _emit_reports(reports, out: Path, no_plot: bool, dat_rows, dat_header,
                  timing: bool) -> None:
    write_reports_csv(reports, out)
    write_dat(out.with_suffix(".dat"), dat_rows, dat_header)
    if no_plot:
        return
    from . import plots

    plots.plot_accuracy(reports, out.with_name(out.stem + "_accuracy.png"))
    if timing:
        plots.plot_timing(reports, out.with_name(out.stem + "_timing.png"))


def _cmd_roundtrip(args) -> int:
    limits = _limits_from_args(args)
    report = roundtrip(limits, args.seed, args.reality, args.path,
                       args.trials, parallel=args.parallel)
    print(
        f"roundtrip L={report.L} M={report.M} N={report.N} {report.reality} "
        f"path={report.path}: max_abs_error={report.max_abs_error:.3e} "
        f"forward={report.forward_seconds:.4f}s inverse={report.inverse_seconds:.4f}s"
    )
    if args.out is not None:
        _emit_reports([report], args.out, args.no_plot,
                      [(report.L, report.max_abs_error)],
                      "L max_abs_error", timing=False)
    return 0


def _parse_L_list(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise ValueError(f"bad --L-list {text!r}: {exc}")


def _cmd_bench(args) -> int:
    L_list = _parse_L_list(args.L_list)
    N_mode = args.N if args.N == "equal" else int(args.N)
    reports = bench_scaling(L_list, N_mode, args.reality, args.seed,
                            args.trials, args.path, args.parallel)
    for report in reports:
        mean = 0.5 * (report.forward_seconds + report.inverse_seconds)
        print(
            f"bench L={report.L} N={report.N} path={report.path}: "
            f"time={mean:.4f}s max_abs_error={report.max_abs_error:.3e}"
        )
    for L, ratio in scaling_ratios(reports):
        print(f"bench ratio time({L})/time({L // 2}) = {ratio:.2f}")
    if args.out is not None:
        rows = [
            (r.L, 0.5 * (r.forward_seconds + r.inverse_seconds)) for r in reports
        ]
        _emit_reports(reports, args.out, args.no_plot, rows,
                      "L mean_transform_seconds", timing=True)
    return 0


def _cmd_quadrature(args) -> int:
    limits = _limits_from_args(args)
    report = quadrature_check(limits, args.seed)
    print(
        f"quadrature L={report.L} M={report.M} N={report.N}: "
        f"const={report.const_abs_error:.3e} "
        f"random_rel={report.random_rel_error:.3e} "
        f"basis_max={report.basis_max_abs:.3e}"
    )
    if args.out is not None:
        write_quadrature_csv([report], args.out)
        write_dat(args.out.with_suffix(".dat"),
                  [(report.L, max(report.const_abs_error,
                                  report.random_rel_error,
                                  report.basis_max_abs))],
                  "L max_quadrature_error")
        if not args.no_plot:
            from . import plots

            plots.plot_quadrature(report, args.out.with_name(args.out.stem + ".png"))
    return 0


def _cmd_transform(args) -> int:
    if args.direction == "forward":
        samples = read_samples(args.infile)
        if args.path == "naive":
            coeffs = forward_naive(samples)
        else:
            plan = TransformPlan(samples.limits)
            coeffs = plan.forward(samples, args.path, args.parallel)
        write_coeffs(coeffs, args.out)
        print(f"forward: {args.infile} -> {args.out} "
              f"(L={samples.limits.L} M={samples.limits.M} N={samples.limits.N})")
    else:
        coeffs = read_coeffs(args.infile)
        if args.path == "naive":
            samples = inverse_naive(coeffs)
        else:
            plan = TransformPlan(coeffs.limits)
            samples = plan.inverse(coeffs, args.path, args.parallel)
        write_samples(samples, args.out)
        print(f"inverse: {args.infile} -> {args.out} "
              f"(L={coeffs.limits.L} M={coeffs.limits.M} N={coeffs.limits.N})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="so3fft",
        description="Exact Wigner transforms on SO(3): benchmarks and file transforms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roundtrip", help="random-signal round-trip accuracy/timing")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--reality", choices=["real", "complex"], default="complex")
    p.add_argument("--trials", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser("bench", help="timing/accuracy scaling over band-limits")
    p.add_argument("--L-list", dest="L_list", required=True,
                   help="comma-separated ascending powers of two, e.g. 32,64,128")
    p.add_argument("--N", default="equal",
                   help='"equal" for N = L, or a fixed integer N')
    p.add_argument("--reality", choices=["real", "complex"], default="complex")
    p.add_argument("--trials", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("quadrature", help="exact-quadrature checks")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    _add_common(p, with_path=False)
    p.set_defaults(func=_cmd_quadrature)

    p = sub.add_parser("transform", help="file-to-file forward/inverse transform")
    p.add_argument("--direction", choices=["forward", "inverse"], required=True)
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--path", choices=["auto", "3d", "per-n", "naive"], default="auto")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=_cmd_transform)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, NumericalIntegrityError, OSError) as exc:
        print(f"so3fft: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
