"""Command-line interface.

Exit codes: 0 success/verified, 1 hypothesis violated, 2 invalid input,
3 theorem falsified (a reproducer file is written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import campaign
from .algebra import AlgebraDescriptor
from .errors import CStarFramesError, UnknownTheorem
from .frames import (
    FrameMap,
    canonical_dual,
    is_frame,
    is_mu_complete,
    norm_bounds_estimate,
    order_bounds,
    riesz_type_or_false,
)
from .fixtures import FIXTURES
from .generate import gen_frame
from .perturbation import THEOREM_IDS
from .scenario import Scenario, ScenarioFormatError, dumps
from .tolerances import TOL_ENV, default_tol

EXIT_OK, EXIT_HYPOTHESIS, EXIT_INVALID, EXIT_FALSIFIED = 0, 1, 2, 3


class InvalidInput(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help=f"rank/frame tolerance (default: ${TOL_ENV} or 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = argparse.ArgumentParser(prog="cstarframes", description="Frames in Hilbert C*-modules over block matrix algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="emit a scenario as JSON")
    g.add_argument("--theorem", help="generate a hypothesis-satisfying scenario for this theorem id")
    g.add_argument("--descriptor", default="2,3", help="block sizes, comma separated (default 2,3)")
    g.add_argument("--d", type=int, default=2, help="module rank (default 2)")
    g.add_argument("--m", type=int, default=None, help="number of atoms (default d + 1)")
    g.add_argument("--condition", type=float, default=4.0, help="target upper/lower bound ratio")
    g.add_argument("--standard-basis", action="store_true", help="emit the standard basis frame")
    g.add_argument("--fixture", choices=sorted(FIXTURES), help="emit a named fixture scenario")

    for name, text in (("bounds", "print frame bounds"), ("dual", "emit the canonical dual"), ("riesz", "Riesz-type verdict")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--scenario", type=Path, required=True)
        if name == "bounds":
            s.add_argument("--trials", type=int, default=256, help="samples for the norm sandwich")

    v = sub.add_parser("verify", parents=[common], help="check one theorem on a scenario")
    v.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    v.add_argument("--scenario", type=Path, required=True)
    v.add_argument("--trials", type=int, default=campaign.DEFAULT_CHECK_TRIALS)
    v.add_argument("--reproducer-dir", type=Path, default=Path("."))

    f = sub.add_parser("falsify", parents=[common], help="run a falsification campaign")
    f.add_argument("--theorem", required=True, help="theorem id or 'all'")
    f.add_argument("--trials", type=int, default=200)
    f.add_argument("--budget", type=int, default=None)
    f.add_argument("--check-trials", type=int, default=campaign.DEFAULT_CHECK_TRIALS)
    f.add_argument("--workers", type=int, default=1)
    f.add_argument("--reproducer-dir", type=Path, default=Path("."))
    return p


def _load(path: Path) -> Scenario:
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    return Scenario.loads(text)


def _text(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        elif isinstance(v, float):
            lines.append(f"{pad}{k} {v:.12g}")
        else:
            lines.append(f"{pad}{k} {v}")
    return "\n".join(x for x in lines if x)


def _emit(args, obj):
    text = dumps(obj) if args.format == "json" else _text(obj) + "\n"
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def _write_reproducer(directory: Path, theorem: str, seed: int, scenario_json: dict, report: dict) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"reproducer-{theorem}-{seed}.json"
    path.write_text(dumps({"theorem": theorem, "scenario": scenario_json, "report": report}))
    return path


def _cmd_gen(args, tol):
    if args.theorem:
        sc = campaign.make_scenario(args.theorem, args.seed)
    elif args.fixture:
        F, G, K = FIXTURES[args.fixture]()
        sc = Scenario(F.descriptor, F.space, F, G=G, K=K, seed=args.seed)
    else:
        try:
            desc = AlgebraDescriptor(tuple(int(x) for x in args.descriptor.split(",")))
        except ValueError as exc:
            raise InvalidInput(f"bad descriptor {args.descriptor!r}: {exc}") from None
        if args.standard_basis:
            F = FrameMap.standard_basis(desc, args.d)
        else:
            m = args.d + 1 if args.m is None else args.m
            F = gen_frame(desc, args.d, m, args.seed, args.condition)
        sc = Scenario(desc, F.space, F, seed=args.seed)
    _emit(args, sc.to_json())
    return EXIT_OK


def _cmd_bounds(args, tol):
    sc = _load(args.scenario)
    ob = order_bounds(sc.F)
    nb = norm_bounds_estimate(sc.F, args.trials, args.seed)
    _emit(
        args,
        {"order": ob.as_dict(), "norm": nb.as_dict(), "lower": ob.lower, "upper": ob.upper, "is_frame": is_frame(sc.F, tol)},
    )
    return EXIT_OK


def _cmd_dual(args, tol):
    sc = _load(args.scenario)
    dual = canonical_dual(sc.F, tol)
    _emit(args, Scenario(sc.descriptor, sc.space, dual, seed=sc.seed).to_json())
    return EXIT_OK


def _cmd_riesz(args, tol):
    sc = _load(args.scenario)
    frame = is_frame(sc.F, tol)
    _emit(args, {"frame": frame, "riesz_type": riesz_type_or_false(sc.F, tol), "mu_complete": is_mu_complete(sc.F, tol)})
    return EXIT_OK


def _cmd_verify(args, tol):
    sc = _load(args.scenario)
    try:
        report = campaign.check_scenario(args.theorem, sc, args.trials, tol)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    data = report.as_dict()
    if report.verdict == "falsified":
        path = _write_reproducer(args.reproducer_dir, args.theorem, sc.seed, sc.to_json(), data)
        data["reproducer"] = str(path)
    _emit(args, data)
    return {"verified": EXIT_OK, "hypothesis-violated": EXIT_HYPOTHESIS, "falsified": EXIT_FALSIFIED}[report.verdict]


def _cmd_falsify(args, tol):
    theorems = THEOREM_IDS if args.theorem == "all" else (args.theorem,)
    out, code = {}, EXIT_OK
    for th in theorems:
        rep = campaign.falsify(th, args.trials, args.seed, args.budget, args.check_trials, args.workers)
        data = rep.as_dict()
        if rep.falsified:
            code = EXIT_FALSIFIED
            data["reproducers"] = [
                str(_write_reproducer(args.reproducer_dir, th, s, r["scenario"], r["report"]))
                for s, r in zip(rep.falsified_seeds, rep.reproducers)
            ]
        out[th] = data
    _emit(args, out if args.theorem == "all" else out[args.theorem])
    return code


COMMANDS = {
    "gen": _cmd_gen,
    "bounds": _cmd_bounds,
    "dual": _cmd_dual,
    "riesz": _cmd_riesz,
    "verify": _cmd_verify,
    "falsify": _cmd_falsify,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = args.tol if args.tol is not None else default_tol()
        if tol < 0:
            raise InvalidInput("--tol must be nonnegative")
        return COMMANDS[args.command](args, tol)
    except (InvalidInput, ScenarioFormatError, UnknownTheorem, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CStarFramesError as exc:
        # structural errors (mismatched descriptors, not a frame, ...) are input problems
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
