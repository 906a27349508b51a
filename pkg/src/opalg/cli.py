"""Command-line front end: run scenario files, list builtins, verify everything.

Exit codes: 0 all pass (flagged counts as pass with a note), 1 any check
failed, 2 parse/validation/compute errors. OPALG_SEED sets the default seed;
the --seed flag beats it.
"""

import argparse
import concurrent.futures
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import ToleranceConfig
from .errors import ComputeError, OpalgError, ParseError, ValidationError
from .scenarios import Scenario, list_builtins, load_scenario, run_builtin, run_scenario


def _base_config(args) -> ToleranceConfig:
    seed = 0
    env = os.environ.get("OPALG_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ValidationError(f"OPALG_SEED must be an integer, got {env!r}")
    if args.seed is not None:
        seed = args.seed
    cfg = ToleranceConfig(rng_seed=seed)
    if args.tol_norm is not None:
        cfg = replace(cfg, norm_tol=args.tol_norm)
    if args.tol_structural is not None:
        cfg = replace(cfg, structural_tol=args.tol_structural)
    return cfg


def _apply_overrides(sc: Scenario, args) -> Scenario:
    payload = dict(sc.payload)
    if args.levels is not None:
        payload["levels"] = args.levels
    if args.cutoff is not None:
        payload["cutoff"] = args.cutoff
    if getattr(args, "emit_matrices", False):
        payload["emit_matrices"] = True
    return Scenario(sc.name, sc.kind, payload, sc.tolerances)


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="rng seed (beats OPALG_SEED)")
    p.add_argument("--tol-norm", type=float, default=None)
    p.add_argument("--tol-structural", type=float, default=None)
    p.add_argument("--levels", type=int, default=None, help="amplification level override")
    p.add_argument("--cutoff", type=int, default=None, help="Fock cutoff override")
    p.add_argument("--parallel", type=int, default=1, metavar="K")
    p.add_argument("--emit-matrices", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opalg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    p_run.add_argument("--out", default=None, help="write the report here (default stdout)")
    _add_common(p_run)

    sub.add_parser("list", help="list builtin scenarios")

    p_all = sub.add_parser("verify-all", help="run every builtin scenario")
    p_all.add_argument("--out-dir", default=None, help="write one report per builtin")
    _add_common(p_all)
    return parser


def _emit(report, out_path):
    text = report.to_json()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name in list_builtins():
                print(name)
            return 0
        cfg = _base_config(args)
        if args.command == "run":
            sc = _apply_overrides(load_scenario(args.scenario), args)
            report = run_scenario(sc, cfg)
            _emit(report, args.out)
            return 0 if report.status in ("pass", "flagged") else 1

        # verify-all: deterministic scheduling, serialized writing
        names = list_builtins()
        reports = {}
        if args.parallel > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=args.parallel) as pool:
                futures = {pool.submit(run_builtin, n, cfg): n for n in names}
                for fut in concurrent.futures.as_completed(futures):
                    reports[futures[fut]] = fut.result()
        else:
            for n in names:
                reports[n] = run_builtin(n, cfg)
        worst = 0
        for n in names:
            rep = reports[n]
            line = f"{rep.status.upper():7s} {n}"
            print(line)
            if rep.status == "fail":
                worst = 1
            if args.out_dir:
                Path(args.out_dir).mkdir(parents=True, exist_ok=True)
                Path(args.out_dir, f"{n}.json").write_text(rep.to_json(), encoding="utf-8")
        return worst
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ComputeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OpalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
