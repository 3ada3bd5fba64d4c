"""Command-line entry point: ``lrthermal <kind> [options]``.

Exit codes: 0 on success, 2 for invalid input (including capacity limits and
unwritable output paths), 3 for numerical failures.
"""
import argparse
import json
import sys

from . import harness
from .errors import NumericalError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lrthermal",
        description="Thermal correlations, mutual information and negativity "
                    "of long-range lattice models.",
    )
    sub = parser.add_subparsers(dest="kind", required=True, metavar="KIND")
    for kind in harness.KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        p.add_argument("--preset", choices=sorted(harness.PRESETS))
        p.add_argument("--scale", type=float, help="shrink preset sizes and samples (0, 1]")
        p.add_argument("--config", help="flat 'key = value' configuration file")
        p.add_argument("--alpha", help="comma-separated exponents, e.g. 0.6,1.5")
        p.add_argument("--sizes", "--n", dest="sizes",
                       help="comma-separated chain lengths (1D) or side lengths (2D)")
        p.add_argument("--dim", type=int, dest="dimension", choices=(1, 2))
        p.add_argument("--model", choices=harness.MODELS)
        p.add_argument("--beta", type=float)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--amplitude", help="coupling amplitude interval lo,hi")
        p.add_argument("--metric", choices=("manhattan", "euclidean"))
        p.add_argument("--u-variant", dest="u_variant", choices=("lemma", "plain"))
        p.add_argument("--out", help="CSV path (the configuration goes to OUT.config)")
        p.add_argument("--workers", type=int)
    return parser


def config_from_args(args):
    overrides = dict(
        alphas=args.alpha, sizes=args.sizes, dimension=args.dimension, model=args.model,
        beta=args.beta, samples=args.samples, seed=args.seed, amplitude=args.amplitude,
        metric=args.metric, u_variant=args.u_variant, out=args.out, workers=args.workers,
    )
    if args.preset:
        if harness.PRESETS[args.preset]["kind"] != args.kind:
            raise ValidationError(
                f"preset {args.preset} is a {harness.PRESETS[args.preset]['kind']} experiment")
        if args.config:
            raise ValidationError("--preset and --config are mutually exclusive")
        scale = 1.0 if args.scale is None else args.scale
        return harness.resolve_preset(args.preset, scale, **overrides)
    if args.scale is not None and args.scale != 1.0:
        raise ValidationError("--scale only applies to presets")
    text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}") from exc
    return harness.ExperimentConfig.from_text(text, kind=args.kind, **overrides)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        result = harness.run_experiment(config)
        if config.out:
            harness.write_outputs(result, config.out)
        else:
            sys.stdout.write(harness.format_csv(result.rows))
        print(json.dumps(result.summary, sort_keys=True), file=sys.stderr)
    except ValidationError as exc:
        print(f"lrthermal: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"lrthermal: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"lrthermal: cannot write output: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
