"""Command-line entry point: ``infodist verify|tradeoff|cascade|profile``.

Exit codes: 0 when every check passes, 1 on a property violation, 2 on a
usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import matcore, suites
from .errors import InfodistError
from .formats import load_contraction, load_ensemble, load_measurement, load_spec
from .measurement import PureInstrument, cascade
from .tradeoff import MAJOR_TOL, averaged_tradeoff, chaotic_disturbance, ozawa_disturbance, tradeoff_report

log = logging.getLogger("infodist")

DEFAULT_SEED = 20050101
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    dim: int = 4
    trials: int = 500
    tol_rank: float = matcore.RANK_TOL
    tol_major: float | None = None
    overrides: dict[str, float] = field(default_factory=dict)
    out: str | None = None

    def validate(self):
        if not 2 <= self.dim <= 16:
            raise UsageError(f"--dim must be in 2..16, got {self.dim}")
        if self.trials < 1:
            raise UsageError(f"--trials must be >= 1, got {self.trials}")
        if not self.tol_rank > 0:
            raise UsageError("--tol-rank must be positive")
        unknown = set(self.overrides) - set(suites.SUITES)
        if unknown:
            raise UsageError(f"unknown suite(s) in --tol: {', '.join(sorted(unknown))}")


def _parse_override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected SUITE=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance in {text!r}") from None


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _config(args) -> RunConfig:
    cfg = RunConfig(
        seed=args.seed,
        dim=getattr(args, "dim", 4),
        trials=getattr(args, "trials", 500),
        tol_rank=args.tol_rank,
        tol_major=args.tol_major,
        overrides=dict(getattr(args, "tol", None) or []),
        out=args.out,
    )
    cfg.validate()
    return cfg


def cmd_verify(args) -> int:
    cfg = _config(args)
    selected = args.suite or list(suites.SUITES)
    results = []
    for r in suites.run_all(cfg.seed, cfg.trials, cfg.dim, cfg.tol_major, cfg.overrides, only=selected, tol_rank=cfg.tol_rank):
        log.info("%-28s %s (%d violations)", r.name, "PASS" if r.passed else "FAIL", r.violations)
        results.append(r.to_json())
    ok = all(r["passed"] for r in results)
    report = {
        "config": {"seed": cfg.seed, "dim": cfg.dim, "trials": cfg.trials, "tol_major": cfg.tol_major,
                   "tol_rank": cfg.tol_rank, "overrides": cfg.overrides},
        "passed": ok,
        "suites": results,
    }
    _emit(_dumps(report), cfg.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_tradeoff(args) -> int:
    cfg = _config(args)
    tol = MAJOR_TOL if cfg.tol_major is None else cfg.tol_major
    e = load_ensemble(args.ensemble)
    labels, outcomes, complete = load_measurement(args.measurement, cfg.tol_rank)
    if outcomes[0].dim != e.dim:
        raise UsageError(f"ensemble dim {e.dim} != measurement dim {outcomes[0].dim}")
    reports = []
    for label, m in zip(labels, outcomes):
        if float(np.sum(e.priors * np.sum(np.abs(e.states @ m.matrix.T) ** 2, axis=1))) <= 1e-12:
            reports.append({"outcome": label, "probability": 0.0, "impossible": True})
            continue
        reports.append(tradeoff_report(e, m, label))
    out = {"ensemble_entropy_bits": e.entropy(), "outcomes": reports}
    violated = any(
        not r.get("impossible")
        and (not r["majorization"]["weak"]["holds"] or (r["parallelism"] != "squashed" and r["slack"] < -tol))
        for r in reports
    )
    if complete:
        avg = averaged_tradeoff(e, PureInstrument(tuple(outcomes), tuple(labels)))
        out["average"] = {
            "delta_I_bits": avg.delta_I_avg,
            "mean_entropy_z_bits": avg.mean_entropy_z,
            "bound_bits": avg.bound,
            "holevo_bound_bits": avg.holevo_bound,
            "chi_bits": avg.chi,
            "orthogonal_ensemble": avg.orthogonal,
            "flagged_outcomes": avg.flagged,
            "rigorous_bound_bits": avg.rigorous_bound,
        }
        if not avg.flagged:
            violated |= avg.bound - avg.delta_I_avg < -tol
    _emit(_dumps(out), cfg.out)
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_cascade(args) -> int:
    cfg = _config(args)
    spec = load_spec(args.spec)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    tr = cascade(spec, args.true_x, args.steps, compensate=args.compensate, seed=cfg.seed)
    if not tr.nondegenerate:
        log.warning("measurement is degenerate: some outcome has no unique most probable value")
    _emit(tr.to_jsonl(), cfg.out)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "outcome", "posterior_true_x", "sigma_min_sq", "fidelity"])
        for s in tr.steps:
            w.writerow([s.step, s.outcome, repr(s.posterior[args.true_x]), repr(s.sigma_min_sq), repr(s.fidelity)])
        with open(args.csv, "w") as fh:
            fh.write(buf.getvalue())
    if args.compensate and any(abs(1 - s.fidelity) > 1e-9 for s in tr.steps):
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_profile(args) -> int:
    cfg = _config(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["profile", "index", "sigma_sq_normalized", "chaotic_disturbance_bits", "ozawa_disturbance_bits"])
    for path in args.contractions:
        m = load_contraction(path, cfg.tol_rank)
        s2 = m.singular_values**2
        norm = s2 / s2.sum() if s2.sum() > 0 else s2
        cd, oz = chaotic_disturbance(m), ozawa_disturbance(m)
        for i, v in enumerate(norm):
            w.writerow([path, i, repr(float(v)), repr(cd), repr(oz)])
    _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--tol-rank", type=float, default=matcore.RANK_TOL, help="relative singular-value cutoff for rank")
    common.add_argument("--tol-major", type=float, default=None, help="tolerance for every inequality/identity check")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="infodist", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run every randomized property suite")
    v.add_argument("--dim", type=int, default=4, help="largest dimension drawn (2..16)")
    v.add_argument("--trials", type=int, default=500, help="instances per suite")
    v.add_argument("--tol", type=_parse_override, action="append", metavar="SUITE=VALUE", help="per-suite tolerance")
    v.add_argument("--suite", action="append", choices=list(suites.SUITES), help="run only these suites")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tradeoff", parents=[common], help="trade-off report for an ensemble and a measurement")
    t.add_argument("ensemble", help="ensemble JSON (or bundled:NAME)")
    t.add_argument("measurement", help="contraction, instrument or observable-spec JSON")
    t.set_defaults(func=cmd_tradeoff)

    c = sub.add_parser("cascade", parents=[common], help="repeated observable measurement trace (JSON lines)")
    c.add_argument("spec", help="observable spec JSON")
    c.add_argument("--true-x", type=int, default=0)
    c.add_argument("--steps", type=int, default=50)
    c.add_argument("--compensate", action="store_true", help="undo the back-action after each outcome")
    c.add_argument("--csv", default=None, help="also write a CSV summary here")
    c.set_defaults(func=cmd_cascade)

    f = sub.add_parser("profile", parents=[common], help="singular-value profile versus disturbance (CSV)")
    f.add_argument("contractions", nargs="+", help="contraction JSON files")
    f.set_defaults(func=cmd_profile)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, InfodistError, OSError) as exc:
        print(f"infodist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
