"""Command-line harness: list problems, run convergence and local-error studies."""

from __future__ import annotations

import argparse
import os
import sys

from .flows import LinearFlowConfig
from .harness import ExperimentSpec, ReferencePolicy, emit, run_convergence, run_local_error
from .problems import PROBLEM_IDS, PROBLEM_SUMMARIES, builtin_problem, load_problem
from .splitting import SCHEME_NAMES

SCHEME_SUMMARIES = {
    "lie": "classical Lie splitting (reaction flow, then diffusion with data b(t))",
    "lie-mod": "boundary-corrected Lie splitting (split u - z, corrected reaction)",
    "strang": "classical Strang splitting (diffusion half, reaction, diffusion half)",
    "strang-mod": "boundary-corrected Strang splitting",
}

LINEAR_CHOICES = {
    "exp": "exact_spectral_exp_euler",
    "midpoint": "exponential_midpoint",
    "cn": "crank_nicolson",
}


def parse_steps(text: str) -> tuple[float, ...]:
    """Step-size list: either 'START:halve:COUNT' or comma-separated values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or parts[1] != "halve":
            raise argparse.ArgumentTypeError(
                f"bad step spec {text!r}; expected START:halve:COUNT or a comma list"
            )
        start, count = float(parts[0]), int(parts[2])
        if start <= 0 or count < 1:
            raise argparse.ArgumentTypeError("step spec needs START > 0 and COUNT >= 1")
        return tuple(start / 2**i for i in range(count))
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad step list {text!r}: {e}") from None


def parse_reference(text: str) -> ReferencePolicy | None:
    if text == "auto":
        return None
    kind, _, arg = text.partition(":")
    try:
        if kind == "modstrang":
            return ReferencePolicy.modified_strang(float(arg))
        if kind == "same":
            return ReferencePolicy.per_scheme(float(arg))
        if kind == "substep":
            return ReferencePolicy.substepped(int(arg))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    raise argparse.ArgumentTypeError(
        f"bad reference {text!r}; expected auto, modstrang:TAU, same:TAU or substep:K"
    )


def _comma_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitpde",
        description="Convergence studies for splitting integrators applied to "
        "diffusion-reaction problems with Dirichlet boundary conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list built-in problems, schemes and norms")

    def add_common(p, default_steps):
        p.add_argument(
            "--problem",
            required=True,
            help="built-in id (P1..P5) or path to a key = value config file",
        )
        p.add_argument(
            "--schemes",
            type=_comma_list,
            default=SCHEME_NAMES,
            help="comma list from: " + ",".join(SCHEME_NAMES),
        )
        p.add_argument(
            "--norms",
            type=_comma_list,
            default=("inf",),
            help="comma list from: inf,one,two (default inf)",
        )
        p.add_argument(
            "--steps",
            type=parse_steps,
            default=parse_steps(default_steps),
            help=f"START:halve:COUNT or comma list (default {default_steps})",
        )
        p.add_argument("--grid", type=int, default=None, metavar="N",
                       help="override interior nodes per axis (built-in problems only)")
        p.add_argument("--linear", choices=["auto", *LINEAR_CHOICES], default="auto",
                       help="linear sub-integrator (auto: exp if boundary data is "
                       "time-independent, else midpoint)")
        p.add_argument("--cn-substeps", type=int, default=10, metavar="M")
        p.add_argument("--reaction", choices=["rk4", "euler"], default="rk4",
                       help="reaction sub-integrator (default rk4)")
        p.add_argument("--reaction-substeps", type=int, default=10, metavar="K")
        p.add_argument("--format", choices=["markdown", "csv"], default="markdown")
        p.add_argument("--full-precision", action="store_true",
                       help="emit CSV values at full precision instead of 4 digits")
        p.add_argument("--out", default=None, metavar="FILE",
                       help="write the tables to FILE instead of stdout")

    run = sub.add_parser("run", help="global-error convergence study at t_final")
    add_common(run, "2e-2:halve:7")
    run.add_argument(
        "--reference",
        type=parse_reference,
        default=None,
        help="auto | modstrang:TAU | same:TAU | substep:K (default auto)",
    )

    loc = sub.add_parser("local-error", help="error after a single time step")
    add_common(loc, "6.25e-3:halve:4")
    loc.add_argument("--local-substeps", type=int, default=100, metavar="K",
                     help="reference substeps per step (default 100)")

    return parser


def _resolve_problem(args):
    if args.problem in PROBLEM_IDS:
        return builtin_problem(args.problem, n=args.grid)
    if os.path.exists(args.problem):
        if args.grid is not None:
            raise ValueError("--grid applies to built-in problems; set n in the config file")
        return load_problem(args.problem)
    raise ValueError(f"{args.problem!r} is neither a built-in problem id nor a config file")


def _resolve_linear(args) -> LinearFlowConfig | None:
    if args.linear == "auto":
        return None
    return LinearFlowConfig(LINEAR_CHOICES[args.linear], cn_substeps=args.cn_substeps)


def _render(tables, schemes, fmt, full_precision) -> str:
    blocks = []
    for name in schemes:
        text = emit(tables[name], fmt, full_precision=full_precision)
        if fmt == "csv" and len(schemes) > 1:
            text = f"# scheme: {name}\n{text}"
        blocks.append(text)
    return "\n".join(blocks)


def cmd_list() -> int:
    print("problems:")
    for pid in PROBLEM_IDS:
        print(f"  {pid}  {PROBLEM_SUMMARIES[pid]}")
    print("schemes:")
    for name in SCHEME_NAMES:
        print(f"  {name:<11} {SCHEME_SUMMARIES[name]}")
    print("norms: inf, one, two")
    return 0


def cmd_study(args, local: bool) -> int:
    problem = _resolve_problem(args)
    spec = ExperimentSpec(
        problem=problem,
        schemes=args.schemes,
        step_sizes=args.steps,
        norms=args.norms,
        reference=None if local else args.reference,
        linear=_resolve_linear(args),
        reaction_substeps=args.reaction_substeps,
        reaction_method=args.reaction,
        local=local,
        local_substeps=args.local_substeps if local else 100,
    )
    tables = run_local_error(spec) if local else run_convergence(spec)
    text = _render(tables, args.schemes, args.format, args.full_precision)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 2 if any(tables[s].failed for s in args.schemes) else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            return cmd_list()
        return cmd_study(args, local=args.command == "local-error")
    except (ValueError, OSError) as e:
        print(f"splitpde: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
