"""Command-line entry point: ``truncvendi <subcommand> [flags]``.

Exit codes: 0 success, 2 invalid input, 3 computation failure. Results go
to ``--out`` (stdout by default); diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from decimal import ROUND_HALF_EVEN, Decimal

from threadpoolctl import threadpool_limits

from . import __version__
from .approx import DEFAULT_RCOND, fkea_truncated_vendi, nystrom_truncated_vendi
from .entropy import rke_score, truncated_vendi_score, vendi_score
from .errors import ComputationError, ValidationError, VendiError
from .harness import DIVERSITY_COLUMNS, convergence_sweep, load_diversity_config, load_sweep_config, synth_mixture
from .io import TABLE_COLUMNS, read_embeddings, write_score, write_table
from .kernels import KernelSpec
from .oracle import STATEMENTS, BoundQuery, load_distribution, population_vendi, save_distribution, theoretical_bound

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE = 0, 2, 3
SCORE_METHODS = ("exact", "truncated", "nystrom", "fkea", "rke")
BOUND_DECIMALS = 5


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def format_fixed(value: float, decimals: int) -> str:
    """Fixed-point text rounded half-to-even on the shortest decimal repr."""
    q = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_EVEN))


def _kernel_flags(p):
    p.add_argument("--kernel", choices=("cosine", "gaussian"), default="cosine", help="similarity kernel (default: cosine)")
    p.add_argument("--sigma", type=float, help="Gaussian bandwidth; required with --kernel gaussian")


def _out_flags(p):
    p.add_argument("--out", default="stdout", help="output path, or 'stdout' (default)")
    p.add_argument("--out-format", choices=("json-lines", "csv"), default="json-lines",
                   help="score record format (default: json-lines)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="truncvendi", description="Vendi, RKE and truncated Vendi diversity scores.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, help="BLAS threads (default: $VENDI_THREADS or all cores)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("score", help="score an embedding file")
    p.add_argument("--input", required=True, help="embedding file")
    p.add_argument("--format", choices=("vemb", "csv"), help="input format (default: from extension)")
    _kernel_flags(p)
    p.add_argument("--alpha", type=float, help="entropy order (default: 1)")
    p.add_argument("--method", choices=SCORE_METHODS, default="exact", help="scoring method (default: exact)")
    p.add_argument("--t", type=int, help="truncation level / landmarks / Fourier features")
    p.add_argument("--seed", type=int, default=0, help="seed for nystrom and fkea (default: 0)")
    p.add_argument("--rcond", type=float, default=DEFAULT_RCOND, help=f"Nystrom cutoff (default: {DEFAULT_RCOND:g})")
    _out_flags(p)

    p = sub.add_parser("oracle", help="exact population score of a distribution document")
    p.add_argument("--dist", required=True, help="distribution JSON (support, probs, label)")
    _kernel_flags(p)
    p.add_argument("--alpha", type=float, default=1.0, help="entropy order (default: 1)")
    p.add_argument("--t", type=int, help="truncation level (default: untruncated)")
    _out_flags(p)

    p = sub.add_parser("bound", help="evaluate a concentration bound")
    p.add_argument("--statement", required=True, choices=STATEMENTS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--d", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--decimals", type=int, default=BOUND_DECIMALS,
                   help=f"decimals printed, rounded half-to-even (default: {BOUND_DECIMALS})")

    for name, text in (("converge", "convergence sweep"), ("diversity", "diversity sweep")):
        p = sub.add_parser(name, help=f"run a {text} from a JSON config")
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True, help="CSV output path, or 'stdout'")

    p = sub.add_parser("synth", help="write a synthetic mixture distribution document")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--spread", type=float, required=True)
    p.add_argument("--within-std", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--atoms-per-mode", type=int, default=32)
    p.add_argument("--orthogonal", action="store_true", help="mutually orthogonal centers (needs k <= d)")
    p.add_argument("--out", required=True)
    return parser


def _kernel(args) -> KernelSpec:
    if args.kernel == "gaussian" and args.sigma is None:
        raise UsageError("--sigma is required when --kernel gaussian")
    if args.kernel == "cosine" and args.sigma is not None:
        raise UsageError("--sigma only applies to --kernel gaussian")
    return KernelSpec(args.kernel, args.sigma)


def _cmd_score(args):
    kernel = _kernel(args)
    if args.method in ("truncated", "nystrom", "fkea") and args.t is None:
        raise UsageError(f"--t is required with --method {args.method}")
    if args.method == "fkea" and not kernel.is_gaussian:
        raise UsageError("--method fkea requires --kernel gaussian")
    if args.method == "rke" and args.alpha is not None and args.alpha != 2:
        print("warning: --method rke is order 2 by definition; ignoring --alpha", file=sys.stderr)
    alpha = 1.0 if args.alpha is None else args.alpha
    E = read_embeddings(args.input, args.format)
    if args.method == "exact":
        rep = vendi_score(E, kernel, alpha)
    elif args.method == "truncated":
        rep = truncated_vendi_score(E, kernel, alpha, args.t)
    elif args.method == "nystrom":
        rep = nystrom_truncated_vendi(E, kernel, alpha, args.t, args.seed, args.rcond)
    elif args.method == "fkea":
        rep = fkea_truncated_vendi(E, kernel, alpha, args.t, args.seed)
    else:
        rep = rke_score(E, kernel)
    write_score(rep, args.out, args.out_format)


def _cmd_oracle(args):
    kernel = _kernel(args)
    rep = population_vendi(load_distribution(args.dist), kernel, args.alpha, args.t)
    write_score(rep, args.out, args.out_format)


def _cmd_bound(args):
    if args.decimals < 0:
        raise UsageError("--decimals must be nonnegative")
    q = BoundQuery(args.statement, args.n, args.delta, args.alpha, d=args.d, t=args.t, tau=args.tau, r=args.r)
    value = theoretical_bound(q)
    if args.statement == "thm3b":
        print("note: thm3b is asymptotic; universal constant taken as 1", file=sys.stderr)
    print(format_fixed(value, args.decimals))


def _cmd_converge(args):
    write_table(convergence_sweep(load_sweep_config(args.config)), args.out, TABLE_COLUMNS)


def _cmd_diversity(args):
    write_table(load_diversity_config(args.config).run(), args.out, DIVERSITY_COLUMNS)


def _cmd_synth(args):
    dist = synth_mixture(args.k, args.d, args.spread, args.within_std, args.seed,
                         atoms_per_mode=args.atoms_per_mode, orthogonal_centers=args.orthogonal)
    save_distribution(dist, args.out)


COMMANDS = {
    "score": _cmd_score,
    "oracle": _cmd_oracle,
    "bound": _cmd_bound,
    "converge": _cmd_converge,
    "diversity": _cmd_diversity,
    "synth": _cmd_synth,
}


def _thread_count(requested):
    if requested is not None:
        if requested < 1:
            raise UsageError("--threads must be at least 1")
        return requested
    env = os.environ.get("VENDI_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"VENDI_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise UsageError("VENDI_THREADS must be at least 1")
        return value
    return os.cpu_count() or 1


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        threads = _thread_count(args.threads)
        with threadpool_limits(limits=threads):
            COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ComputationError, VendiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ArithmeticError, MemoryError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
