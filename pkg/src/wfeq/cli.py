"""Command-line interface.

Subcommands: equilibrium, simulate, simulate-stochastic, binary, validate
(plus a hidden `oracle` used to regenerate the README's worked examples).

Exit codes are a stable contract:

  0  success
  1  usage error or malformed model file
  2  inadmissible equilibrium (no interior fixed point)
  3  singular direction matrix
  4  iteration hit the step budget without converging
  5  a validation check failed
  6  model evaluation failed mid-run (degenerate normalizer or the like)

Primary output (CSV) goes to stdout or --out; the accompanying summary JSON
goes to stderr or --summary.  All runs are deterministic given their
arguments; WFEQ_SEED supplies the seed when --seed is omitted.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND_NAME
from .binary import BinaryModel
from .dynamics import iterate
from .equilibrium import (
    EquilibriumProfile,
    diagonal_from_equilibrium,
    profile_from_equilibrium,
    solve_equilibrium,
)
from .errors import (
    InadmissibleEquilibrium,
    ModelFormatError,
    SingularDirectionMatrix,
    WrightFisherError,
)
from .model import (
    SimplexVector,
    direction_transform,
)
from .modelio import (
    ModelSpec,
    json_text,
    load_model,
    paths_csv_lines,
    paths_json_lines,
    trajectory_csv_lines,
    trajectory_json_lines,
    write_lines,
)
from .stochastic import PopulationState, RandomSeed, simulate_paths
from .validate import run_validation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INADMISSIBLE = 2
EXIT_SINGULAR = 3
EXIT_NO_CONVERGENCE = 4
EXIT_CHECK_FAILED = 5
EXIT_MODEL_ERROR = 6

PUBLIC_COMMANDS = "{equilibrium,simulate,simulate-stochastic,binary,validate}"


class _Parser(argparse.ArgumentParser):
    """argparse variant using exit code 1 for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CommandError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers")


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers")


def _load_model_or_fail(path: str) -> ModelSpec:
    try:
        return load_model(path)
    except ModelFormatError as exc:
        raise CommandError(EXIT_USAGE, f"{path}: {exc}")


def _survival_of(spec: ModelSpec):
    if spec.kind == "W":
        return spec.survival
    if spec.kind == "V":
        return direction_transform(spec.direction)
    return direction_transform(diagonal_from_equilibrium(spec.rho))


def _trajectory_lines(states, fmt: str, columns=None):
    if fmt == "json":
        return trajectory_json_lines(states, columns)
    return trajectory_csv_lines(states, columns)


def _paths_lines(counts, fmt: str):
    if fmt == "json":
        return paths_json_lines(counts)
    return paths_csv_lines(counts)


def _write_primary(lines, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            write_lines(lines, fh)
    else:
        write_lines(lines, sys.stdout)


def _write_summary(payload, summary_path: str | None) -> None:
    text = json_text(payload)
    if summary_path:
        with open(summary_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stderr.write(text + "\n")


def _resolve_seed(args) -> RandomSeed:
    seed = args.seed
    if seed is None:
        env = os.environ.get("WFEQ_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise CommandError(EXIT_USAGE, f"WFEQ_SEED={env!r} is not an integer")
    return RandomSeed(seed=seed, stream_id=args.stream)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_equilibrium(args) -> int:
    spec = _load_model_or_fail(args.model)
    try:
        if spec.kind == "rho":
            profile = profile_from_equilibrium(spec.rho)
        else:
            direction = (
                spec.direction if spec.kind == "V"
                else direction_transform(spec.survival)
            )
            profile = solve_equilibrium(direction)
    except InadmissibleEquilibrium as exc:
        raise CommandError(EXIT_INADMISSIBLE, str(exc))
    except SingularDirectionMatrix as exc:
        raise CommandError(EXIT_SINGULAR, str(exc))
    payload = {
        "rho": profile.rho.values.tolist(),
        "pi": profile.pi,
        "inverse_row_sums": profile.inverse_row_sums.tolist(),
        "product_consistent": profile.product_consistent,
        "row_consistent": profile.row_consistent,
        "diagonal": profile.diagonal,
    }
    print(json_text(payload))
    return EXIT_OK


def _equilibrium_or_none(spec: ModelSpec) -> EquilibriumProfile | None:
    try:
        if spec.kind == "rho":
            return profile_from_equilibrium(spec.rho)
        direction = (
            spec.direction if spec.kind == "V"
            else direction_transform(spec.survival)
        )
        return solve_equilibrium(direction)
    except (InadmissibleEquilibrium, SingularDirectionMatrix):
        return None


def cmd_simulate(args) -> int:
    spec = _load_model_or_fail(args.model)
    dim = spec.n_states
    if args.p0 is None:
        p0 = SimplexVector.uniform(dim)
    else:
        if len(args.p0) != dim:
            raise CommandError(
                EXIT_USAGE, f"--p0 needs {dim} components, got {len(args.p0)}"
            )
        try:
            p0 = SimplexVector(args.p0)
        except ValueError as exc:
            raise CommandError(EXIT_USAGE, f"--p0: {exc}")
    if not (args.allow_boundary or p0.is_interior()):
        raise CommandError(
            EXIT_USAGE,
            "--p0 must be interior (0 < p < 1); pass --allow-boundary to override",
        )
    model = profile_from_equilibrium(spec.rho) if spec.kind == "rho" else _survival_of(spec)
    try:
        trajectory = iterate(
            model, p0, max_steps=args.steps, tol=args.tol,
            allow_boundary=args.allow_boundary,
        )
    except WrightFisherError as exc:
        raise CommandError(EXIT_MODEL_ERROR, str(exc))
    profile = _equilibrium_or_none(spec)
    summary = {
        "converged": trajectory.converged,
        "steps_taken": trajectory.steps_taken,
        "final_increment_norm": trajectory.final_increment_norm,
        "rho": profile.rho.values.tolist() if profile else None,
        "pi": profile.pi if profile else None,
    }
    _write_primary(_trajectory_lines(trajectory.states, args.format), args.out)
    _write_summary(summary, args.summary)
    return EXIT_OK if trajectory.converged else EXIT_NO_CONVERGENCE


def cmd_simulate_stochastic(args) -> int:
    spec = _load_model_or_fail(args.model)
    dim = spec.n_states
    W = _survival_of(spec)
    if args.initial is not None:
        if len(args.initial) != dim:
            raise CommandError(
                EXIT_USAGE, f"--initial needs {dim} counts, got {len(args.initial)}"
            )
        if sum(args.initial) != args.pop:
            raise CommandError(
                EXIT_USAGE,
                f"--initial counts sum to {sum(args.initial)}, expected --pop {args.pop}",
            )
        try:
            initial = PopulationState(counts=args.initial, population_size=args.pop)
        except ValueError as exc:
            raise CommandError(EXIT_USAGE, f"--initial: {exc}")
    else:
        base, extra = divmod(args.pop, dim)
        counts = [base + (1 if m < extra else 0) for m in range(dim)]
        initial = PopulationState(counts=counts, population_size=args.pop)
    seed = _resolve_seed(args)
    try:
        result = simulate_paths(
            W, initial, steps=args.steps, replicas=args.replicas,
            seed=seed, jobs=args.jobs,
        )
    except WrightFisherError as exc:
        raise CommandError(EXIT_MODEL_ERROR, str(exc))
    summary = {
        "population_size": result.population_size,
        "replicas": result.n_replicas,
        "steps": result.n_steps,
        "seed": seed.seed,
        "stream_id": seed.stream_id,
        "moments": result.moment_summary().as_records(),
    }
    _write_primary(_paths_lines(result.counts, args.format), args.out)
    _write_summary(summary, args.summary)
    return EXIT_OK


def cmd_binary(args) -> int:
    try:
        model = BinaryModel(w_plus=args.w_plus, w_minus=args.w_minus)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc))
    if not 0.0 <= args.p0 <= 1.0:
        raise CommandError(EXIT_USAGE, f"--p0 = {args.p0!r} outside [0, 1]")
    p0 = args.p0
    try:
        trajectory = iterate(
            model.survival_matrix(),
            np.array([p0, 1.0 - p0]),
            max_steps=args.steps,
            tol=args.tol,
            allow_boundary=not (0.0 < p0 < 1.0),
        )
    except WrightFisherError as exc:
        raise CommandError(EXIT_MODEL_ERROR, str(exc))
    summary = {
        "converged": trajectory.converged,
        "steps_taken": trajectory.steps_taken,
        "final_increment_norm": trajectory.final_increment_norm,
        "rho": [model.rho_plus, model.rho_minus],
        "pi": model.pi,
    }
    _write_primary(
        _trajectory_lines(trajectory.states, args.format, ["p_plus", "p_minus"]),
        args.out,
    )
    _write_summary(summary, args.summary)
    return EXIT_OK if trajectory.converged else EXIT_NO_CONVERGENCE


def cmd_validate(args) -> int:
    spec = _load_model_or_fail(args.model)
    report = run_validation(spec, n_points=args.points, seed=args.check_seed)
    print(json_text(report))
    failed = [c for c in report["checks"] if not c["passed"]]
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_oracle(args) -> int:
    # lazy import: exact-arithmetic tooling stays out of normal runs
    from . import oracle

    canonical_W = [["2/5", 1], [1, "4/5"]]
    canonical_p = ["1/2", "1/2"]
    step = oracle.exact_step(canonical_W, canonical_p)
    rho = ["1/2", "1/3", "1/6"]
    eq_rho, eq_pi = oracle.exact_equilibrium(
        oracle.exact_diagonal_from_equilibrium(rho)
    )
    adj_prefactor = oracle.adjudicate_drift_prefactor(
        rho, ["1/5", "3/10", "1/2"], m=0
    )
    adj_ratio = oracle.adjudicate_binary_ratio_index("3/5", "2/5", "1/5")
    adj_equilibrium = oracle.adjudicate_binary_equilibrium("3/5", "1/5")
    payload = {
        "canonical_model": {
            "W": [[str(x) for x in row] for row in oracle.as_matrix(canonical_W)],
            "p": [str(x) for x in oracle.as_vector(canonical_p)],
            "mean_fitness": str(oracle.exact_mean_fitness(canonical_W, canonical_p)),
            "step": [str(x) for x in step],
            "drift_numerator_state_0": str(
                oracle.exact_drift_numerator(canonical_W, canonical_p, 0)
            ),
            "increment_state_0": str(
                oracle.exact_increment(canonical_W, canonical_p, 0)
            ),
        },
        "diagonal_equilibrium": {
            "rho": [str(x) for x in eq_rho],
            "pi": str(eq_pi),
        },
        "adjudications": {
            "drift_prefactor": {
                "reference": str(adj_prefactor.reference),
                "implemented": str(adj_prefactor.implemented),
                "variant": str(adj_prefactor.variant),
                "implemented_matches": adj_prefactor.implemented_matches,
                "variant_matches": adj_prefactor.variant_matches,
            },
            "binary_ratio_index": {
                "reference": str(adj_ratio.reference),
                "implemented": str(adj_ratio.implemented),
                "variant": str(adj_ratio.variant),
                "implemented_matches": adj_ratio.implemented_matches,
                "variant_matches": adj_ratio.variant_matches,
            },
            "binary_equilibrium": {
                "drift_at_implemented": str(adj_equilibrium.implemented),
                "drift_at_variant": str(adj_equilibrium.variant),
                "bisection_root": adj_equilibrium.witness["bisection_root"],
                "variant_in_unit_interval": adj_equilibrium.witness[
                    "variant_in_unit_interval"
                ],
            },
        },
    }
    print(json_text(payload))
    return EXIT_OK


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="wfeq",
        description=(
            "Multitype Wright-Fisher dynamics: equilibria, deterministic "
            "convergence, and finite-population simulation."
        ),
        epilog=f"kernel backend: {BACKEND_NAME}",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(
        dest="command", metavar=PUBLIC_COMMANDS, parser_class=_Parser
    )

    eq = sub.add_parser("equilibrium", help="solve the equilibrium of a model file")
    eq.add_argument("model", help="model JSON file")
    eq.set_defaults(func=cmd_equilibrium)

    sim = sub.add_parser("simulate", help="iterate the deterministic dynamics")
    sim.add_argument("model", help="model JSON file")
    sim.add_argument("--p0", type=_csv_floats, default=None,
                     help="initial frequencies, comma-separated (default: uniform)")
    sim.add_argument("--steps", type=_positive_int, default=1_000_000,
                     help="step budget (default: %(default)s)")
    sim.add_argument("--tol", type=float, default=1e-10,
                     help="stopping tolerance on the increment max-norm")
    sim.add_argument("--allow-boundary", action="store_true",
                     help="accept boundary initial states (fixed points)")
    sim.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="trajectory output format (default: %(default)s)")
    sim.add_argument("--out", default=None, help="trajectory path (default: stdout)")
    sim.add_argument("--summary", default=None,
                     help="summary JSON path (default: stderr)")
    sim.set_defaults(func=cmd_simulate)

    sto = sub.add_parser("simulate-stochastic",
                         help="sample finite-population replica paths")
    sto.add_argument("model", help="model JSON file")
    sto.add_argument("--pop", type=_positive_int, required=True,
                     help="population size N")
    sto.add_argument("--steps", type=_positive_int, required=True,
                     help="generations per replica")
    sto.add_argument("--replicas", type=_positive_int, default=1,
                     help="independent replicas (default: %(default)s)")
    sto.add_argument("--seed", type=int, default=None,
                     help="root seed (default: WFEQ_SEED or 0)")
    sto.add_argument("--stream", type=int, default=0,
                     help="stream id separating experiments (default: %(default)s)")
    sto.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1,
                     help="worker threads (default: processor count)")
    sto.add_argument("--initial", type=_csv_ints, default=None,
                     help="initial counts, comma-separated (default: near-uniform)")
    sto.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="path output format (default: %(default)s)")
    sto.add_argument("--out", default=None, help="paths output (default: stdout)")
    sto.add_argument("--summary", default=None,
                     help="moment summary JSON path (default: stderr)")
    sto.set_defaults(func=cmd_simulate_stochastic)

    bi = sub.add_parser("binary", help="two-state closed-form dynamics")
    bi.add_argument("--w-plus", type=float, required=True,
                    help="survival parameter of the plus state, in (0, 1)")
    bi.add_argument("--w-minus", type=float, required=True,
                    help="survival parameter of the minus state, in (0, 1)")
    bi.add_argument("--p0", type=float, default=0.5,
                    help="initial plus-state frequency (default: %(default)s)")
    bi.add_argument("--steps", type=_positive_int, default=1_000_000,
                    help="step budget (default: %(default)s)")
    bi.add_argument("--tol", type=float, default=1e-10,
                    help="stopping tolerance on the increment max-norm")
    bi.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="trajectory output format (default: %(default)s)")
    bi.add_argument("--out", default=None, help="trajectory path (default: stdout)")
    bi.add_argument("--summary", default=None,
                    help="summary JSON path (default: stderr)")
    bi.set_defaults(func=cmd_binary)

    val = sub.add_parser("validate", help="run the model self-checks")
    val.add_argument("model", help="model JSON file")
    val.add_argument("--points", type=_positive_int, default=25,
                     help="random probe states per check (default: %(default)s)")
    val.add_argument("--check-seed", type=int, default=0,
                     help="seed for the probe states (default: %(default)s)")
    val.set_defaults(func=cmd_validate)

    orc = sub.add_parser("oracle")  # hidden: README example regeneration
    orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CommandError as exc:
        sys.stderr.write(f"wfeq: error: {exc}\n")
        return exc.exit_code
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
