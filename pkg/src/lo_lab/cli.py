"""Command-line entry point: ``lo-lab <command> [options]``.

Exit status: 0 success, 1 validation error, 2 capacity error, 3 invariant
violation found by a verification command.  Failures print one line to
stderr of the form ``error kind=<kind> reason=<json string>``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import asymp, dist, extremal, modfield, report, struct_lab
from .dist import StepSet
from .errors import CapacityError, InvariantViolation, LabError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_INVARIANT = 0, 1, 2, 3

RESULT_TYPES = {
    "rho": dist.RhoResult,
    "dist": dist.SumDistribution,
    "fourier": modfield.FourierReport,
    "levelset": modfield.LevelSet,
    "dual": modfield.DualBoundReport,
    "dyadic": modfield.DyadicProfile,
    "asymp-table": asymp.V0Table,
    "regimes": asymp.RegimeReport,
    "reduce": struct_lab.ReductionTrace,
    "dilation": struct_lab.DilationFit,
    "blocks": struct_lab.BlockBound,
    "arrange-fuzz": struct_lab.ArrangementFuzz,
    "stanley": extremal.StanleyResult,
    "stability": extremal.ScanReport,
    "mc": dist.MonteCarloResult,
}


@dataclass
class Outcome:
    result: object
    table: tuple[list[str], list[list]] | None = None
    violation: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _threads_default() -> int:
    env = os.environ.get("LO_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"LO_LAB_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}")


def _number(text: str) -> Fraction | float:
    """Rational literals ("101/100", "2") stay exact; decimals become floats."""
    try:
        if "." in text or "e" in text.lower():
            return float(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a number: {text!r}")


def _stepset(args) -> StepSet:
    if args.set is not None and args.v0 is not None:
        raise ValidationError("give either --set or --v0, not both")
    if args.v0 is not None:
        return StepSet.v0(args.v0)
    if args.set is None:
        raise ValidationError("a step set is required (--set or --v0)")
    return StepSet.parse(args.set)


def _steps_text(steps: StepSet) -> str:
    return " ".join(str(v) for v in steps.steps)


# -- commands ---------------------------------------------------------------


def cmd_rho(args) -> Outcome:
    return Outcome(dist.rho(_stepset(args), backend=args.backend))


def cmd_dist(args) -> Outcome:
    d = dist.distribution(_stepset(args), backend=args.backend)
    rows = [[s, w] for s, w in d.nonzero()]
    return Outcome(d, (["s", "weight"], rows))


def cmd_fourier(args) -> Outcome:
    E = modfield.embed_prime(_stepset(args))
    targets = _int_list(args.target) if args.target else None
    rep = modfield.fourier_check(E, targets)
    rows = [[r.a, r.fourier, r.exact, r.abs_err] for r in rep.rows]
    bad = rep.max_abs_err > 1e-9
    return Outcome(rep, (["a", "fourier", "exact", "abs_err"], rows),
                   f"inversion error {rep.max_abs_err:.3e} > 1e-9" if bad else None)


def cmd_levelset(args) -> Outcome:
    E = modfield.embed_prime(_stepset(args))
    S = modfield.level_set(E, args.m)
    rows = [[xi, modfield.cost(E, xi)] for xi in S.members]
    return Outcome(S, (["xi", "cost"], rows))


def cmd_dual(args) -> Outcome:
    rep = modfield.dual_bound_check(modfield.embed_prime(_stepset(args)))
    problems = []
    if not rep.holds:
        problems.append(f"|S_(n/100)|={rep.lhs} > 8p/n={rep.rhs:.3f}")
    if rep.t_min < rep.t_min_required:
        problems.append(f"min T_a={rep.t_min:.3f} < n/2")
    return Outcome(rep, None, "; ".join(problems) or None)


def cmd_dyadic(args) -> Outcome:
    prof = modfield.dyadic_profile(modfield.embed_prime(_stepset(args)), args.m, args.growth)
    rows = [[s.i, s.size, s.contained_in_s, s.cauchy_davenport] for s in prof.steps]
    bad = [s.i for s in prof.steps if not (s.contained_in_s and s.cauchy_davenport)]
    return Outcome(prof, (["i", "size", "contained_in_s", "cauchy_davenport"], rows),
                   f"dyadic checks failed at steps {bad}" if bad else None)


def cmd_asymp_table(args) -> Outcome:
    tab = asymp.v0_table(_int_list(args.n), backend=args.backend)
    rows = [[r.n, r.rho, r.scaled, r.prediction, r.abs_gap] for r in tab.rows]
    return Outcome(tab, (["n", "rho", "scaled", "prediction", "abs_gap"], rows))


def cmd_regimes(args) -> Outcome:
    rep = asymp.sigma2_split(args.n)
    violation = None
    if rep.n >= 101 and rep.sigma2 > rep.n ** -3:
        violation = f"tail majorant {rep.sigma2:.3e} > n^-3"
    return Outcome(rep, None, violation)


def cmd_reduce(args) -> Outcome:
    trace = struct_lab.irreducible_reduce(_stepset(args), args.c, args.window)
    violation = None
    if struct_lab.replay(trace) != list(trace.final.steps):
        violation = "trace does not replay"
    elif not struct_lab.is_c_irreducible(trace.final.steps, trace.c):
        violation = "final set is not c-irreducible"
    return Outcome(trace, None, violation)


def cmd_dilation(args) -> Outcome:
    V = _stepset(args)
    E = modfield.embed(V, args.p) if args.p else modfield.embed_prime(V)
    return Outcome(struct_lab.find_dilation_fp(E, args.budget))


def cmd_blocks(args) -> Outcome:
    V = _stepset(args)
    p = args.p or modfield.embed_prime(V).p
    res = struct_lab.block_lower_bound(V, p, args.xi, args.window)
    bad = res.bound > res.phase_cost + 1e-12
    return Outcome(res, None, f"bound {res.bound} exceeds phase cost {res.phase_cost}" if bad else None)


def cmd_arrange_fuzz(args) -> Outcome:
    res = struct_lab.arrangement_fuzz(args.trials, args.seed, args.sweep_pmax)
    bad = res.violations + res.sweep_violations
    return Outcome(res, None, f"{bad} arrangement violations" if bad else None)


def cmd_stanley(args) -> Outcome:
    res = extremal.stanley_verify(args.n, args.B, cap=args.cap, workers=args.threads)
    return Outcome(res, None, f"{res.violations} sets beat rho(V0)" if res.violations else None)


def cmd_stability(args) -> Outcome:
    rep = extremal.stability_scan(args.n, args.B, args.epsilon, cap=args.cap, workers=args.threads)
    rows = [[_steps_text(r.steps), r.rho, r.variance_ratio, r.is_dilate_of_V0] for r in rep.rows]
    violation = None
    if args.n % 2 and args.B >= args.n // 2:
        v0 = dist.rho(StepSet.v0(args.n)).rho
        if rep.rho_max > v0:
            violation = f"rho_max {rep.rho_max} exceeds rho(V0) {v0}"
    return Outcome(rep, (["steps", "rho", "variance_ratio", "is_dilate_of_V0"], rows), violation)


def cmd_mc(args) -> Outcome:
    return Outcome(dist.monte_carlo_rho(_stepset(args), args.samples, args.seed))


COMMANDS = {
    "rho": cmd_rho,
    "dist": cmd_dist,
    "fourier": cmd_fourier,
    "levelset": cmd_levelset,
    "dual": cmd_dual,
    "dyadic": cmd_dyadic,
    "asymp-table": cmd_asymp_table,
    "regimes": cmd_regimes,
    "reduce": cmd_reduce,
    "dilation": cmd_dilation,
    "blocks": cmd_blocks,
    "arrange-fuzz": cmd_arrange_fuzz,
    "stanley": cmd_stanley,
    "stability": cmd_stability,
    "mc": cmd_mc,
}

_STEP_COMMANDS = {"rho", "dist", "fourier", "levelset", "dual", "dyadic", "reduce", "dilation", "blocks", "mc"}
_GLOBAL_KEYS = {"command", "seed", "format", "output", "threads", "timing"}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--output", type=Path, default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--timing", action="store_true", help="record wall time in timing_ms")

    parser = _Parser(prog="lo-lab", description="Littlewood-Offord concentration laboratory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}

    for name in _STEP_COMMANDS:
        p[name].add_argument("--set", default=None, help="comma-separated integers")
        p[name].add_argument("--v0", type=int, default=None, help="use V0 for this odd n")
    for name in ("rho", "dist"):
        p[name].add_argument("--backend", choices=dist.BACKENDS, default="exact")
    p["fourier"].add_argument("--target", default=None, help="comma-separated targets (default: support)")
    p["levelset"].add_argument("--m", type=_number, required=True)
    p["dyadic"].add_argument("--m", type=_number, required=True)
    p["dyadic"].add_argument("--growth", type=float, default=modfield.DOUBLING_GROWTH)
    p["asymp-table"].add_argument("--n", required=True, help="comma-separated odd n")
    p["asymp-table"].add_argument("--backend", choices=dist.BACKENDS, default="float")
    p["regimes"].add_argument("--n", type=int, required=True)
    p["reduce"].add_argument("--c", type=float, required=True)
    p["reduce"].add_argument("--window", type=float, required=True)
    p["dilation"].add_argument("--budget", type=int, default=0)
    p["dilation"].add_argument("--p", type=int, default=None)
    p["blocks"].add_argument("--xi", type=int, required=True)
    p["blocks"].add_argument("--window", type=float, required=True)
    p["blocks"].add_argument("--p", type=int, default=None)
    p["arrange-fuzz"].add_argument("--trials", type=int, default=100_000)
    p["arrange-fuzz"].add_argument("--sweep-pmax", type=int, default=101)
    for name in ("stanley", "stability"):
        p[name].add_argument("--n", type=int, required=True)
        p[name].add_argument("--B", type=int, required=True)
        p[name].add_argument("--cap", type=int, default=extremal.ENUMERATION_CAP)
    p["stability"].add_argument("--epsilon", type=float, required=True)
    p["mc"].add_argument("--samples", type=int, default=100_000)
    return parser


def _glue_set_values(argv: list[str]) -> list[str]:
    """Turn ``--set -2,-1`` into ``--set=-2,-1`` so argparse does not read the
    value as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--set", "--target"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def render(command: str, outcome: Outcome, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return report.dumps(payload)
    if fmt == "csv":
        header, rows = outcome.table or report.flat_scalars(outcome.result)
        return report.to_csv(header, rows)
    lines = [f"{command}"]
    for key, value in payload["result"].items():
        text = value if not isinstance(value, (list, dict)) else json.dumps(value)
        lines.append(f"  {key}: {text}")
    return "\n".join(lines) + "\n"


def _fail(exc: LabError | Exception, kind: str, code: int) -> int:
    print(f"error kind={kind} reason={json.dumps(str(exc))}", file=sys.stderr)
    return code


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_set_values(argv))
        if args.threads is None:
            args.threads = _threads_default()
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        start = time.perf_counter()
        outcome = COMMANDS[args.command](args)
        elapsed = round((time.perf_counter() - start) * 1000.0, 3)
    except CapacityError as exc:
        return _fail(exc, exc.kind, EXIT_CAPACITY)
    except InvariantViolation as exc:
        return _fail(exc, exc.kind, EXIT_INVARIANT)
    except (ValidationError, ValueError) as exc:
        return _fail(exc, "validation", EXIT_VALIDATION)

    params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in _GLOBAL_KEYS}
    payload = report.envelope(args.command, params, args.seed, outcome.result, elapsed if args.timing else None)
    text = render(args.command, outcome, payload, args.format)
    if args.output:
        args.output.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if outcome.violation:
        print(f"error kind=invariant reason={json.dumps(outcome.violation)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
