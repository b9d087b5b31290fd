"""Command-line entry point.

    quantsine <experiment> [--bits B] [--delta D] [--amp-min x --amp-max y --amp-steps k]
              [--lambda L] [--n N] [--records R] [--seed S] [--sigma G] [--offset d]
              [--config FILE] [--out FILE] [--threads T] [--plot]
    quantsine verify --suite fast|full [--threads T]
    quantsine list

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import ConfigError, format_value, load_config, render_csv

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# CLI flag -> parameter key
_FLAGS = {
    "bits": "bits",
    "delta": "delta",
    "amp_min": "amp_min",
    "amp_max": "amp_max",
    "amp_steps": "amp_steps",
    "lam": "lambda",
    "n": "n",
    "records": "records",
    "seed": "seed",
    "sigma": "sigma",
    "offset": "offset",
    "threads": "threads",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _experiment_parser(name: str) -> argparse.ArgumentParser:
    p = _Parser(prog=f"quantsine {name}", description="run one experiment and write CSV")
    p.add_argument("--bits", help="bits, or a comma-separated list for sweeps over resolution")
    p.add_argument("--delta", help="quantizer step (overrides --bits)")
    p.add_argument("--amp-min", dest="amp_min")
    p.add_argument("--amp-max", dest="amp_max")
    p.add_argument("--amp-steps", dest="amp_steps")
    p.add_argument("--lambda", dest="lam", help="periods per record")
    p.add_argument("--n", help="samples per record")
    p.add_argument("--records", help="Monte Carlo replicates (0 skips Monte Carlo where optional)")
    p.add_argument("--seed")
    p.add_argument("--sigma", help="Gaussian noise std before quantization")
    p.add_argument("--offset", help="signal offset d")
    p.add_argument("--threads", help="worker threads for sweep points")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot", action="store_true", help="also render <out>.png (needs matplotlib)")
    return p


def _run_experiment(name: str, argv: list[str]) -> int:
    from .experiments import EXPERIMENTS, ExperimentConfig, resolve_params, run_experiment

    if name not in EXPERIMENTS:
        print(f"quantsine: unknown experiment {name!r}; try 'quantsine list'", file=sys.stderr)
        return EXIT_CONFIG
    args = _experiment_parser(name).parse_args(argv)
    try:
        overrides = load_config(args.config) if args.config else {}
        for flag, key in _FLAGS.items():
            v = getattr(args, flag)
            if v is not None:
                overrides[key] = v
        params = resolve_params(name, overrides)
        if args.plot and not args.out:
            raise ConfigError("--plot needs --out")
    except ConfigError as exc:
        print(f"quantsine: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        res, meta = run_experiment(ExperimentConfig(name, params, args.out))
    except ConfigError as exc:
        print(f"quantsine: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render_csv(meta, params, res.columns, res.rows)
    summary = [f"{name}: {len(res.rows)} rows"] + [f"  {k} = {format_value(v)}" for k, v in res.summary.items()]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print("\n".join(summary))
        if args.plot:
            from .plotting import plot_result

            try:
                png = plot_result(name, res.columns, res.rows, args.out)
            except RuntimeError as exc:
                print(f"quantsine: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            print(f"  figure = {png}")
    else:
        sys.stdout.write(text)
        print("\n".join(summary), file=sys.stderr)
    return EXIT_OK


def _run_verify(argv: list[str]) -> int:
    from .verify import format_report, run_suite

    p = _Parser(prog="quantsine verify", description="run the cross-engine invariant checks")
    p.add_argument("--suite", choices=("fast", "full"), default="fast")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="also write the report to this file")
    args = p.parse_args(argv)
    if args.threads < 1:
        print("quantsine: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    results = run_suite(args.suite, args.threads)
    report = format_report(results, args.suite)
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _list() -> int:
    from .experiments import EXPERIMENTS

    for name, exp in EXPERIMENTS.items():
        print(f"{name:14s} {exp.description}")
        print(f"{'':14s} keys: {', '.join(exp.schema)}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        return EXIT_OK if argv else EXIT_CONFIG
    cmd, rest = argv[0], argv[1:]
    try:
        if cmd == "verify":
            return _run_verify(rest)
        if cmd == "list":
            return _list()
        return _run_experiment(cmd, rest)
    except SystemExit as exc:  # argparse: --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
