"""Command-line front end.

Usage examples::

    belllab claim1 --format json
    belllab correlate --model qm --theta-a 0 --theta-b pi/4 --samples 1e6 --seed 1
    belllab polytope --family chsh
    belllab claim2 --mu 2 --nu -1 --emit-plot-data claim2.csv --figure claim2.png
    belllab claim4 --model sequential,shared_noise=true --samples 1e5

Exit status: 0 on success, 1 on usage errors, 2 on numerical or
precondition failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from typing import Any

from . import inequalities, polytope, scan
from .core import (
    Quadruplet,
    linear_correlation,
    local_same_side_correlation,
    qm_cross_correlation,
)
from .errors import BellLabError, UsageError
from .inequalities import InequalityFamily, SignVariant
from .models import Capability, monte_carlo_correlations, parse_model_clause

# not echoed in the output so reruns with other thread counts or paths stay byte-identical
_NOT_ECHOED = {"threads", "output", "emit_plot_data", "figure", "config", "command", "handler"}

_PI_RE = re.compile(r"^([+-]?)(\d*\.?\d*)\s*\*?\s*pi(?:\s*/\s*(\d*\.?\d+))?$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def parse_angle(text: str, degrees: bool = False) -> float:
    """Parse ``0.5``, ``pi/4``, ``-3pi/4`` or ``2*pi``; plain numbers honour ``degrees``."""
    s = text.strip().replace(" ", "").lower()
    try:
        value = float(s)
    except ValueError:
        m = _PI_RE.match(s)
        if not m:
            raise UsageError(f"cannot parse angle {text!r}")
        sign, mult, div = m.groups()
        value = (float(mult) if mult not in ("", ".") else 1.0) * math.pi / (float(div) if div else 1.0)
        return -value if sign == "-" else value
    if not math.isfinite(value):
        raise UsageError(f"angle must be finite, got {text!r}")
    return math.radians(value) if degrees else value


def parse_count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}")
    if not v.is_integer() or v < 1:
        raise argparse.ArgumentTypeError(f"count must be a positive integer, got {text!r}")
    return int(v)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("-o", "--output", help="write the report here instead of stdout")
    g.add_argument("--seed", type=int, help="random seed (default: $BELLLAB_SEED or 0)")
    g.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    g.add_argument("--config", help="file of key=value lines using the long option names")
    g.add_argument("--degrees", action="store_true", help="read plain-number angles as degrees")

    angles = _Parser(add_help=False)
    h = angles.add_argument_group("configuration")
    h.add_argument("--angles", help="theta_a,theta_b,theta_a',theta_b' in one flag")
    h.add_argument("--theta-a", default="0")
    h.add_argument("--theta-b", default="pi/4")
    h.add_argument("--theta-a-prime", default="pi/2")
    h.add_argument("--theta-b-prime", default="-pi/4")

    parser = _Parser(prog="belllab", description="Bell/Boole inequality laboratory.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("correlate", parents=[common, angles],
                       help="closed-form correlations, or Monte Carlo ones with --model")
    p.add_argument("--model")
    p.add_argument("--samples", type=parse_count, default=100_000)
    p.set_defaults(handler=cmd_correlate)

    p = sub.add_parser("montecarlo", parents=[common, angles], help="sample a model and evaluate inequalities")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=parse_count, default=100_000)
    p.set_defaults(handler=cmd_montecarlo)

    p = sub.add_parser("grid", parents=[common], help="the 5x5 lattice of same-side values")
    p.add_argument("--emit-plot-data")
    p.add_argument("--figure", help="render the lattice to this image file")
    p.set_defaults(handler=cmd_grid)

    p = sub.add_parser("claim1", parents=[common], help="Boole violations on the lattice")
    p.add_argument("--tolerance", type=float, default=0.0)
    p.set_defaults(handler=cmd_claim1)

    p = sub.add_parser("claim2", parents=[common], help="perturbation scan off a parity point")
    p.add_argument("--q0", type=int, choices=(0, 1), default=0,
                   help="0 for (pi/4, -3pi/4), 1 for (3pi/4, -pi/4)")
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--nu", type=float, default=-1.0)
    p.add_argument("--eps", type=_float_list, help="comma-separated epsilon schedule")
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.add_argument("--emit-plot-data")
    p.add_argument("--figure")
    p.set_defaults(handler=cmd_claim2)

    p = sub.add_parser("claim3", parents=[common], help="Taylor dominance and violation search near zero angles")
    p.add_argument("--function", choices=("dominant", "symmetric"), default="dominant")
    p.add_argument("--radius", type=float, default=0.3)
    p.add_argument("--samples", type=parse_count, default=10_000)
    p.add_argument("--degree-max", type=int, default=4)
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.add_argument("--skip-ld-check", action="store_true")
    p.set_defaults(handler=cmd_claim3)

    p = sub.add_parser("claim4", parents=[common], help="locality audit of a counterfactual model")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=parse_count, default=100_000)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--diagnostic", action="store_true", help="run the replay phase only")
    p.set_defaults(handler=cmd_claim4)

    p = sub.add_parser("polytope", parents=[common], help="classical vertex maximum and quantum scan")
    p.add_argument("--family", choices=[f.value for f in InequalityFamily], default="chsh")
    p.add_argument("--resolution", type=float, default=1e-3)
    p.set_defaults(handler=cmd_polytope)

    p = sub.add_parser("audit-random", parents=[common], help="CHSH0 on random +-1 sequences")
    p.add_argument("--trials", type=parse_count, default=100_000)
    p.add_argument("--length", type=parse_count, default=100)
    p.set_defaults(handler=cmd_audit_random)
    return parser


# ---------------------------------------------------------------------------
# helpers


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BELLLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"BELLLAB_SEED must be an integer, got {env!r}")


def _quadruplet(args) -> Quadruplet:
    if args.angles:
        parts = args.angles.split(",")
        if len(parts) != 4:
            raise UsageError("--angles needs four comma-separated values")
    else:
        parts = [args.theta_a, args.theta_b, args.theta_a_prime, args.theta_b_prime]
    return Quadruplet(*(parse_angle(p, args.degrees) for p in parts))


def _quad_dict(q: Quadruplet) -> dict:
    return dict(zip(("theta_a", "theta_b", "theta_a_prime", "theta_b_prime"), q.as_tuple()))


def _corr_row(slot, c, law=""):
    return {"slot": slot, "law": law, "value": c.value, "stderr": c.stderr, "provenance": c.provenance.value,
            "assumes_locality": c.assumes_locality}


def _flatten(obj, prefix=""):
    """Nested results to (key, value) pairs for long-format CSV."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _csv_text(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in header})
    return buf.getvalue()


def _write_plot_data(path, triples):
    with open(path, "w", newline="") as fh:
        fh.write(_csv_text([dict(zip(("series", "x", "y", "value"), t)) for t in triples],
                           ["series", "x", "y", "value"]))


# ---------------------------------------------------------------------------
# command handlers: each returns (results, csv_rows, csv_header)


def cmd_correlate(args):
    q = _quadruplet(args)
    rows = []
    if args.model:
        spec = parse_model_clause(args.model)
        cs = monte_carlo_correlations(spec, q, args.samples, _seed(args), workers=args.threads)
        rows = [_corr_row(s, c, spec.kind.value) for s, c in cs.present().items()]
    else:
        a, b, ap, bp = q.as_tuple()
        rows = [
            _corr_row("ab", qm_cross_correlation(a, b), "singlet"),
            _corr_row("a_prime_b_prime", qm_cross_correlation(ap, bp, counterfactual=True), "singlet"),
            _corr_row("ab_prime", qm_cross_correlation(a, bp), "singlet"),
            _corr_row("a_prime_b", qm_cross_correlation(ap, b), "singlet"),
            _corr_row("aa_prime", local_same_side_correlation(a, ap), "local_cos"),
            _corr_row("bb_prime", local_same_side_correlation(b, bp), "local_cos"),
            _corr_row("aa_prime", linear_correlation(a, ap), "linear"),
            _corr_row("bb_prime", linear_correlation(b, bp), "linear"),
        ]
    header = ["slot", "law", "value", "stderr", "provenance", "assumes_locality"]
    return {"quadruplet": _quad_dict(q), "correlations": rows}, rows, header


def cmd_montecarlo(args):
    q = _quadruplet(args)
    spec = parse_model_clause(args.model)
    cs = monte_carlo_correlations(spec, q, args.samples, _seed(args), workers=args.threads)
    reports = []
    if spec.capability is Capability.FULL_CMR:
        reports = [r.as_dict() for r in inequalities.chsh(cs) + inequalities.boole(cs)]
    results = {
        "quadruplet": _quad_dict(q),
        "correlations": [_corr_row(s, c, spec.kind.value) for s, c in cs.present().items()],
        "inequalities": reports,
    }
    return results, None, None


def _cell_dict(cell):
    return {"i": cell.i, "j": cell.j, "theta_a": cell.theta_a, "theta_b": cell.theta_b,
            "A": cell.A, "B": cell.B, "status": cell.status.value}


def _default_stars(eps=0.1):
    out = []
    for p in scan.PARITY_POINTS:
        for mu, nu in ((2.0, -1.0), (-2.0, 1.0)):
            out.append((p.theta_a + mu * eps, p.theta_b - nu * eps))
    return out


def cmd_grid(args):
    grid = scan.figure1_grid()
    rows = [_cell_dict(c) for row in grid for c in row]
    if args.emit_plot_data:
        triples = [(s, c.theta_a, c.theta_b, getattr(c, s)) for s in ("A", "B") for row in grid for c in row]
        _write_plot_data(args.emit_plot_data, triples)
    if args.figure:
        from .plotting import plot_grid

        plot_grid(grid, args.figure, violations=scan.claim1_check(), stars=_default_stars())
    results = {"cells": rows, "mean_consistent": scan.grid_mean_consistent(grid)}
    return results, rows, ["i", "j", "theta_a", "theta_b", "A", "B", "status"]


def cmd_claim1(args):
    max_lhs, max_cell = scan.claim1_max_lhs()
    violations = []
    for cell, r in scan.claim1_check(args.tolerance):
        d = _cell_dict(cell)
        d.update({"variant": r.variant.value, "lhs": r.lhs, "margin": r.margin,
                  "robustness": scan.claim1_robustness(cell)})
        violations.append(d)
    results = {"max_lhs": max_lhs, "max_cell": _cell_dict(max_cell), "violations": violations}
    rows = [dict(v, max_lhs=max_lhs) for v in violations]
    header = ["i", "j", "theta_a", "theta_b", "A", "B", "status", "variant", "lhs", "margin", "robustness", "max_lhs"]
    return results, rows, header


def cmd_claim2(args):
    q0 = scan.PARITY_POINTS[args.q0]
    ma, mb = scan.default_claim2_models(q0)
    res = scan.claim2_scan(ma, mb, q0, args.mu, args.nu, args.eps, args.fd_step)
    trace = scan.claim2_trace(ma, mb, q0, args.mu, args.nu, args.eps)
    trace_rows = [s._asdict() for s in trace]
    if args.emit_plot_data:
        _write_plot_data(args.emit_plot_data,
                         [("boole_max", s.theta_a, s.theta_b, max(s.plus_lhs, s.minus_lhs)) for s in trace])
    if args.figure:
        from .plotting import plot_claim2

        plot_claim2(trace, args.figure)
    da, db = res.directional
    results = {
        "q0": {"theta_a": q0.theta_a, "theta_b": q0.theta_b},
        "mu": res.mu, "nu": res.nu,
        "gradients": dict(zip(("alpha1", "alpha2", "beta1", "beta2"), res.gradients)),
        "directional": {"A": da, "B": db},
        "first_violating_epsilon": res.epsilon,
        "report": res.report.as_dict(),
        "simple_fact": res.simple_fact.value if res.simple_fact else None,
        "order_check": res.order_check,
        "trace": trace_rows,
    }
    return results, trace_rows, list(scan.EpsilonSample._fields)


def cmd_claim3(args):
    f = scan.dominant_example if args.function == "dominant" else scan.symmetric_example
    est = scan.claim3_taylor(f, args.degree_max, args.fd_step)
    found = scan.claim3_search(f, None, args.radius, args.samples, _seed(args), require_ld=not args.skip_ld_check)
    results = {
        "function": args.function,
        "taylor": {
            "degree": est.degree,
            "ld_satisfied": est.ld_satisfied,
            "dominance_ratio": est.dominance_ratio,
            "coefficients": {",".join(map(str, k)): v for k, v in est.coefficients.items() if v != 0.0},
        },
        "violation": None if found is None else {"quadruplet": _quad_dict(found[0]), "report": found[1].as_dict()},
    }
    return results, None, None


def cmd_claim4(args):
    spec = parse_model_clause(args.model)
    rep = scan.claim4_audit(spec, args.samples, _seed(args), args.tolerance, workers=args.threads,
                            skip_phase1=args.diagnostic)
    results = {
        "model": spec.to_clause(),
        "verdict": rep.verdict.value,
        "same_side_unit": rep.same_side_unit,
        "setting_independent": rep.setting_independent,
        "alice_independent_of_bob": rep.alice_independent_of_bob,
        "bob_independent_of_alice": rep.bob_independent_of_alice,
        "same_side_estimates": [
            {"slot": s, "quadruplet": _quad_dict(q), "value": v, "stderr": se}
            for s, q, v, se in rep.same_side_estimates
        ],
    }
    return results, None, None


def cmd_polytope(args):
    family = InequalityFamily(args.family)
    if family is InequalityFamily.BELL0:
        classical = {"none": polytope.classical_max(family, None)}
    else:
        classical = {v.value: polytope.classical_max(family, v) for v in SignVariant}
    results: dict[str, Any] = {"family": family.value, "classical_max": max(classical.values()),
                               "classical_max_by_variant": classical}
    if family in (InequalityFamily.CHSH, InequalityFamily.BOOLE):
        r = polytope.quantum_max_scan(family, args.resolution, workers=args.threads)
        results.update({"quantum_max": r.best_value, "quantum_config": _quad_dict(r.best_config),
                        "evaluations": r.evaluations})
    return results, None, None


def cmd_audit_random(args):
    ok = polytope.random_sequence_audit(args.trials, args.length, _seed(args))
    return {"trials": args.trials, "length": args.length, "no_violation": ok}, None, None


# ---------------------------------------------------------------------------


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config`` (explicit flags still win)."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    options = {s: a for a in subparser._actions for s in a.option_strings}
    defaults = {}
    try:
        with open(args.config) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        action = options.get("--" + key.strip())
        if not sep or action is None:
            raise UsageError(f"{args.config}:{n}: unknown setting {line!r}")
        value = value.strip()
        if isinstance(action, argparse._StoreTrueAction):
            defaults[action.dest] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[action.dest] = action.type(value) if action.type else value
    subparser.set_defaults(**defaults)
    for a in subparser._actions:
        if a.dest in defaults:
            a.required = False
    return parser.parse_args(argv)


def run(argv=None) -> tuple[str, bool]:
    """Execute one command; return the report text and whether it went to a file."""
    parser = build_parser()
    args = _apply_config(parser, argv)
    if not args.command:
        raise UsageError(parser.format_usage())
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    results, rows, header = args.handler(args)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}
    config["seed"] = _seed(args)
    if args.format == "json":
        text = json.dumps(_clean({"command": args.command, "config": config, "results": results}), indent=2) + "\n"
    elif rows is not None:
        text = _csv_text(rows, header)
    else:
        pairs = [{"key": k, "value": v} for k, v in _flatten(_clean(results))]
        text = _csv_text(pairs, ["key", "value"])
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    return text, bool(args.output)


def main(argv=None) -> int:
    try:
        text, to_file = run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except BellLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not to_file:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
