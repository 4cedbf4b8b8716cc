"""Command-line interface: ``forrkit {analyze,forrelation,simulate,check,estimate,curves}``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import boolfn, circuits, protocols, spectra
from .errors import ForrkitError
from .qsim import sample

SEED_ENV = "FORRKIT_SEED"
ROUND = 12


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _r(x: float) -> float:
    # adding 0.0 folds -0.0 into 0.0
    return round(x, ROUND) + 0.0


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _load_many(spec: str) -> list[boolfn.TruthTable]:
    return [boolfn.load_truth_table(p) for p in spec.split(",") if p]


def cmd_analyze(args) -> int:
    f = boolfn.load_truth_table(args.file)
    w = spectra.walsh_transform(f)
    report = {
        "n": f.n,
        "walsh": w.to_json(),
        "autocorrelation": spectra.auto_correlation(f).to_json(),
        "balanced": boolfn.is_balanced(f),
        "bent": boolfn.is_bent(f),
        "resiliency_order": spectra.resiliency_order(f),
        "parseval": spectra.parseval_ok(w),
    }
    if report["bent"]:
        d = boolfn.dual(f)
        report["dual"] = d.to_bits()
        report["self_dual"] = d == f
    _emit(report)
    return 0


def cmd_forrelation(args) -> int:
    fs = _load_many(args.fns)
    val = spectra.forrelation_k(fs)
    _emit({"k": val.k, "n": val.n, "value": _r(val.value)})
    return 0


_ARITY = {"dj": 1, "forr2": 2, "a33": 3, "a32": 3, "alg1": 2}


def _build(name: str, fs, variant: str | None):
    if len(fs) != _ARITY[name]:
        raise ForrkitError(f"circuit {name} needs {_ARITY[name]} functions, got {len(fs)}")
    if name == "dj":
        return circuits.deutsch_jozsa(*fs)
    if name == "forr2":
        return circuits.forrelation2_circuit(*fs)
    if name == "a33":
        return circuits.a33(*fs)
    if name == "a32":
        return circuits.a32(*fs)
    return circuits.algorithm1(circuits.parse_cn(variant or "uniform"), *fs)


def cmd_simulate(args) -> int:
    circ = _build(args.circuit, _load_many(args.fns), args.variant)
    if args.dump:
        text = circ.dumps() + "\n"
        if args.dump == "-":
            sys.stdout.write(text)
            return 0
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(text)
    dist = circ.measured_distribution()
    if args.shots:
        counts = sample(dist, args.shots, args.seed)
        _emit(dict(sorted(counts.items())))
    else:
        _emit({k: _r(v) for k, v in sorted(dist.as_dict(threshold=10.0 ** -ROUND).items())})
    return 0


def cmd_check(args) -> int:
    f = boolfn.load_truth_table(args.fn)
    if args.resilient is not None:
        v = protocols.check_resilient(f, args.resilient, budget=args.budget, seed=args.seed, exact=args.exact)
    else:
        g = boolfn.load_truth_table(args.fn2) if args.fn2 else f
        v = protocols.check_uncorrelated(f, g, args.uncorrelated, method=args.method,
                                         budget=args.budget, seed=args.seed, exact=args.exact)
    out = v.to_json()
    out["good_mass"] = _r(out["good_mass"])
    for e in out["per_weight"]:
        e["good_mass"] = _r(e["good_mass"])
    _emit(out)
    return 1 if args.fail_on_refute and v.refuted else 0


def cmd_estimate(args) -> int:
    f = boolfn.load_truth_table(args.fn)
    g = boolfn.load_truth_table(args.fn2) if args.fn2 else f
    res = protocols.estimate_cross_correlation_point(f, g, args.y, args.eps, args.delta, seed=args.seed)
    out = res.to_json()
    out["alpha"] = _r(out["alpha"])
    out["samples"] = [_r(s) for s in out["samples"]]
    out["call_bound"] = protocols.estimation_call_bound(args.eps, args.delta)
    _emit(out)
    return 0


def parse_grid(text: str) -> list[float]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ForrkitError(f"bad grid {text!r}, expected start:stop:step") from None
    if step <= 0 or hi < lo or lo < 0 or hi > 1:
        raise ForrkitError(f"bad grid {text!r}")
    count = int(round((hi - lo) / step)) + 1
    return [round(min(lo + i * step, hi), 10) for i in range(count)]


def cmd_curves(args) -> int:
    grid = parse_grid(args.pgrid)
    curves = [protocols.StrategyCurve.closed_form(p) for p in grid]
    instance = None
    if args.fn:
        if not args.set:
            raise ForrkitError("--fn needs --set")
        f = boolfn.load_truth_table(args.fn)
        instance, _ = protocols.strategy_curve(f, args.set.split(","))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("source",) + protocols.STRATEGY_COLUMNS)
    for c in curves:
        writer.writerow(["grid"] + [repr(_r(v)) for v in c.row()])
    if instance is not None:
        writer.writerow(["instance"] + [repr(_r(v)) for v in instance.row()])
    if args.plot:
        from .plotting import plot_strategy_curves

        plot_strategy_curves(curves, args.plot, instance)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forrkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="spectra and properties of one truth-table file")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    fo = sub.add_parser("forrelation", help="exact k-fold Forrelation, 2 <= k <= 4")
    fo.add_argument("--fns", required=True, help="comma-separated truth-table files")
    fo.set_defaults(func=cmd_forrelation)

    s = sub.add_parser("simulate", help="simulate one circuit")
    s.add_argument("--circuit", required=True, choices=sorted(_ARITY))
    s.add_argument("--fns", required=True, help="comma-separated truth-table files")
    s.add_argument("--variant", help="alg1 C_n: uniform | point:<bits> | dicke:<i>")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact distribution (default)")
    mode.add_argument("--shots", type=int)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--dump", metavar="PATH", help="write circuit JSON to PATH ('-' prints it and exits)")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("check", help="resiliency / uncorrelatedness verdicts")
    c.add_argument("--fn", required=True)
    c.add_argument("--fn2", help="second function for --uncorrelated (defaults to --fn)")
    which = c.add_mutually_exclusive_group(required=True)
    which.add_argument("--resilient", type=int, metavar="M")
    which.add_argument("--uncorrelated", type=int, metavar="M")
    c.add_argument("--method", choices=("flat", "dicke"), default="flat")
    c.add_argument("--budget", type=int, default=4000, help="oracle-call budget")
    c.add_argument("--seed", type=int, default=_default_seed())
    c.add_argument("--exact", action="store_true", help="treat every nonzero-probability outcome as observed")
    c.add_argument("--fail-on-refute", action="store_true")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("estimate", help="amplitude-estimate C_fg(y)/2^n")
    e.add_argument("--fn", required=True)
    e.add_argument("--fn2")
    e.add_argument("--y", required=True)
    e.add_argument("--eps", type=float, default=0.05)
    e.add_argument("--delta", type=float, default=0.1)
    e.add_argument("--seed", type=int, default=_default_seed())
    e.set_defaults(func=cmd_estimate)

    cu = sub.add_parser("curves", help="CSV of strategy success probabilities over a p grid")
    cu.add_argument("--pgrid", default="0:1:0.01")
    cu.add_argument("--fn")
    cu.add_argument("--set", help="comma-separated bit strings")
    cu.add_argument("--plot", metavar="PNG", help="also render the curves to this image file")
    cu.set_defaults(func=cmd_curves)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ForrkitError, OSError, ValueError) as exc:
        sys.stderr.write(f"forrkit: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
