"""Command-line front end.

Exit codes: 0 feasible/valid, 1 negative verdict, 2 usage or parse error,
3 physics validation failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, channels, holevo, monotones, numerics, preorder
from .errors import DegenerateFacetError, DocumentError, PreservabilityError, ValidationError

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_PHYSICS = 0, 1, 2, 3
SIG_DIGITS = 12
PAIR_ALIASES = {"depol": "depolarizing", "deph": "dephasing"}


def fmt(x):
    """Round a float to 12 significant digits."""
    return float(f"{x:.{SIG_DIGITS}g}")


def clean(obj):
    """JSON-ready copy with every float rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj))
    if isinstance(obj, complex):
        return [fmt(obj.real), fmt(obj.imag)]
    return obj


@dataclass
class RunReport:
    command: str
    inputs: list = field(default_factory=list)
    verdict: object = None
    values: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: object = None
    version: str = __version__
    timestamp: object = None

    def to_dict(self):
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "values": self.values,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "version": self.version,
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return clean(out)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(f"{path}: {exc.strerror}", EXIT_USAGE) from None
    try:
        doc = channels.parse_document(text)
    except DocumentError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line is not None else ""
        raise CommandError(f"{path}: {exc}{where}", EXIT_USAGE) from None
    try:
        spec = channels.spec_from_document(doc)
    except (PreservabilityError, ValueError) as exc:
        raise CommandError(f"{path}: {exc}", EXIT_PHYSICS) from None
    return spec, channels.to_document(spec)


def _verdict_payload(v):
    return {
        "feasible": v.feasible,
        "weights": {f"{k[0]},{k[1]}" if len(k) == 2 else ",".join(map(str, k)): w for k, w in v.weights.items()},
        "residual": v.residual,
        "method": v.method,
        "notes": v.notes,
    }


# --- commands ------------------------------------------------------------------


def cmd_validate(args):
    spec, doc = _load(args.file)
    diag = {
        "trace_preservation_defect": channels.tp_defect(spec.kraus()),
        "unital_defect": channels.unital_defect(spec),
        "unital": channels.is_unital(spec),
        "weyl_covariant": channels.is_weyl_covariant(spec),
    }
    return RunReport("validate", [doc], "valid", diag, {"check": channels.CHECK_TOLERANCE}), EXIT_OK


def cmd_convert(args):
    src, sdoc = _load(args.source)
    tgt, tdoc = _load(args.target)
    v = preorder.convertible(src, tgt, tolerance=args.tolerance)
    report = RunReport("convert", [sdoc, tdoc], v.feasible, _verdict_payload(v), {"feasibility": args.tolerance})
    return report, EXIT_OK if v.feasible else EXIT_NEGATIVE


def cmd_monotones(args):
    src, sdoc = _load(args.source)
    tgt, tdoc = _load(args.target)
    lam = preorder.eigenvalue_vector(src)
    mu = preorder.eigenvalue_vector(tgt)
    fs = monotones.facet_system(monotones.vertex_set(lam))
    try:
        ok, margins = monotones.check_monotones(fs, mu, args.tolerance)
        values = {"margins": margins, "degenerate": False}
    except DegenerateFacetError as exc:
        v = preorder.decide(lam.values, mu.values, lam.d, args.tolerance)
        ok = v.feasible
        values = {"margins": [], "degenerate": True, "note": str(exc), "lp": _verdict_payload(v)}
    values["lambda"] = lam.values
    values["mu"] = mu.values
    return RunReport("monotones", [sdoc, tdoc], ok, values, {"facet": args.tolerance}), EXIT_OK if ok else EXIT_NEGATIVE


def cmd_game(args):
    src, sdoc = _load(args.source)
    tgt, tdoc = _load(args.target)
    states = monotones.game_states(src)
    cand, ok = monotones.play_game(states, tgt, args.tolerance)
    values = {
        "source_success": states.source_success,
        "candidate_success": cand,
        "expected_source_success": states.expected_source_success(),
    }
    return RunReport("game", [sdoc, tdoc], ok, values, {"game": args.tolerance}), EXIT_OK if ok else EXIT_NEGATIVE


def cmd_holevo(args):
    spec, doc = _load(args.file)
    seed = 0 if args.seed is None else args.seed
    rep = holevo.holevo_capacity(spec, seed=seed)
    values = {
        "chi": rep.chi,
        "min_output_entropy": rep.min_output_entropy,
        "argmin_state": [[[z.real, z.imag] for z in row] for row in rep.argmin_state],
        "method": rep.method,
        "units": "nats",
    }
    return RunReport("holevo", [doc], rep.chi, values, {}, seed), EXIT_OK


def _family_pair(text):
    parts = text.replace(":", "-").split("-")
    if len(parts) != 2:
        raise CommandError(f"--family-pair must look like 'deph-depol', got {text!r}", EXIT_USAGE)
    fams = tuple(PAIR_ALIASES.get(p, p) for p in parts)
    for f in fams:
        if f not in ("depolarizing", "dephasing"):
            raise CommandError(f"unsupported family {f!r} in --family-pair", EXIT_USAGE)
    return fams


def sweep_rows(source_family, target_family, grid, tolerance=numerics.DEFAULT_TOLERANCE):
    """(param1, param2, feasible, residual, closed_form_bound) over a grid x grid lattice."""
    params = np.linspace(0.0, 1.0, grid)
    targets = [channels.ChannelSpec.named(target_family, y) for y in params]
    rows = []
    for x in params:
        src = channels.ChannelSpec.named(source_family, x)
        bound = preorder.closed_form_bound(source_family, x, target_family)
        for y, tgt in zip(params, targets):
            v = preorder.convertible(src, tgt, tolerance)
            rows.append((float(x), float(y), v.feasible, v.residual, bound))
    return rows


def cmd_sweep(args):
    sf, tf = _family_pair(args.family_pair)
    rows = sweep_rows(sf, tf, args.grid, args.tolerance)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["param1", "param2", "feasible", "residual", "closed_form_bound"])
            for x, y, ok, r, b in rows:
                w.writerow([repr(fmt(x)), repr(fmt(y)), int(ok), repr(fmt(r)), "" if b is None else repr(fmt(b))])
    values = {
        "source_family": sf,
        "target_family": tf,
        "grid": args.grid,
        "feasible_count": sum(r[2] for r in rows),
        "points": len(rows),
        "csv": args.out,
    }
    return RunReport("sweep", [], None, values, {"feasibility": args.tolerance}), EXIT_OK


def cmd_simplex(args):
    src, sdoc = _load(args.source)
    if src.d != 2:
        raise CommandError("simplex export is defined for d=2 only", EXIT_USAGE)
    lam = preorder.eigenvalue_vector(src)
    vs = monotones.vertex_set(lam)
    targets, docs = [], [sdoc]
    for path in args.targets or []:
        tgt, tdoc = _load(path)
        if tgt.d != 2:
            raise CommandError(f"{path}: simplex export is defined for d=2 only", EXIT_USAGE)
        mu = preorder.eigenvalue_vector(tgt).values
        v = preorder.decide(lam.values, mu, 2, args.tolerance)
        targets.append({"file": path, "mu_truncated": mu[:-1], "inside": v.feasible, "residual": v.residual})
        docs.append(tdoc)
    values = {
        "vertices_truncated": vs.truncated,
        "center_truncated": np.full(3, 0.25),
        "rank": vs.rank,
        "targets": targets,
    }
    report = RunReport("simplex", docs, None, values, {"feasibility": args.tolerance})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return report, EXIT_OK


# --- campaigns -------------------------------------------------------------------


def _trial_rng(seed, i):
    return np.random.default_rng([seed, i])


def _trial_closure(rng, tol):
    d = int(rng.choice([2, 3]))
    spec = channels.random_channel(d, "weyl_mixture", rng)
    sample = channels.random_superchannel(d, "weyl_mixture", rng)
    out = channels.apply_superchannel(sample, spec)
    v = preorder.convertible(spec, out, tolerance=tol)
    return v.feasible, {"residual": v.residual}, spec, sample


def _trial_purity(rng, tol):
    spec = channels.random_channel(2, "qubit_unital", rng)
    sample = channels.random_superchannel(2, "qubit_unital", rng)
    before = channels.choi(spec).purity()
    after = channels.choi(channels.apply_superchannel(sample, spec)).purity()
    return after <= before + tol, {"before": before, "after": after}, spec, sample


def _trial_game(rng, tol):
    src = channels.random_channel(2, "weyl_mixture", rng)
    if rng.random() < 0.5:
        tgt = channels.apply_superchannel(channels.random_superchannel(2, "weyl_mixture", rng), src)
    else:
        tgt = channels.random_channel(2, "weyl_mixture", rng)
    states = monotones.game_states(src)
    _, game = monotones.play_game(states, tgt, tol)
    lp = preorder.convertible(src, tgt, tolerance=tol).feasible
    return game == lp, {"game": game, "lp": lp}, src, tgt


def _trial_capacity(rng, tol):
    d = int(rng.choice([2, 3]))
    spec = channels.random_channel(d, "weyl_mixture", rng)
    sample = channels.random_superchannel(d, "weyl_mixture", rng)
    before, after, holds = holevo.capacity_monotonicity_trial(spec, sample, seed=0, tol=tol)
    return holds, {"before": before, "after": after}, spec, sample


SUITES = {"closure": _trial_closure, "purity": _trial_purity, "game": _trial_game, "capacity": _trial_capacity}


def _reproducer(i, spec, other):
    out = {"trial": i, "channel": channels.to_document(spec)}
    if isinstance(other, channels.FreeSuperchannelSample):
        out["superchannel"] = [
            {"p": p, "pre": channels.to_document(pre), "post": channels.to_document(post)} for p, pre, post in other.branches
        ]
    else:
        out["target"] = channels.to_document(other)
    return out


def run_campaign(suite, trials, seed, tolerance=numerics.DEFAULT_TOLERANCE):
    """(violations, reproducer or None); trial i draws from default_rng([seed, i])."""
    if suite not in SUITES:
        raise CommandError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}", EXIT_USAGE)
    fn = SUITES[suite]
    violations, first = 0, None
    for i in range(trials):
        ok, info, a, b = fn(_trial_rng(seed, i), tolerance)
        if not ok:
            violations += 1
            if first is None:
                first = dict(_reproducer(i, a, b), info=info)
    return violations, first


def cmd_campaign(args):
    seed = 0 if args.seed is None else args.seed
    violations, first = run_campaign(args.suite, args.trials, seed, args.tolerance)
    values = {"suite": args.suite, "trials": args.trials, "violations": violations, "reproducer": first}
    report = RunReport("campaign", [], violations == 0, values, {"property": args.tolerance}, seed)
    return report, EXIT_OK if violations == 0 else EXIT_NEGATIVE


# --- entry point -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=numerics.DEFAULT_TOLERANCE)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-identical reports")

    p = _Parser(prog="preservability", description="Convertibility of unital channels under free super-channels.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="parse a channel file and report CPTP diagnostics")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)
    for name, func, text in (
        ("convert", cmd_convert, "decide source -> target"),
        ("monotones", cmd_monotones, "facet margins of the target against the source"),
        ("game", cmd_game, "discrimination-game success probabilities"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("source")
        s.add_argument("target")
        s.set_defaults(func=func)
    s = sub.add_parser("holevo", parents=[common], help="Holevo capacity in nats")
    s.add_argument("file")
    s.set_defaults(func=cmd_holevo)
    s = sub.add_parser("sweep", parents=[common], help="family-pair verdict grid")
    s.add_argument("--family-pair", required=True, help="e.g. deph-depol")
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_sweep)
    s = sub.add_parser("simplex", parents=[common], help="qubit simplex plot data")
    s.add_argument("source")
    s.add_argument("--targets", nargs="*", default=[])
    s.add_argument("--out", help="JSON output path")
    s.set_defaults(func=cmd_simplex)
    s = sub.add_parser("campaign", parents=[common], help="seeded random property suite")
    s.add_argument("--suite", required=True, choices=sorted(SUITES))
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_campaign)
    return p


def _summary(report):
    lines = [f"command: {report.command}"]
    d = report.to_dict()
    if d["verdict"] is not None:
        lines.append(f"verdict: {d['verdict']}")
    for k, v in d["values"].items():
        lines.append(f"{k}: {json.dumps(v)}")
    return "\n".join(lines)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", 1) < 1 or getattr(args, "trials", 0) < 0:
        parser.error("--grid must be >= 1 and --trials >= 0")
    try:
        report, code = args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (PreservabilityError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    report.seed = args.seed if report.seed is None else report.seed
    if not args.no_timestamp:
        report.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    print(report.to_json() if args.json else _summary(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
