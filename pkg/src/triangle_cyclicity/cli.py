"""Command line front end.

Every subcommand prints (or writes under ``--out-dir``) a JSON document with
``schema_version`` "1" or a CSV table.  Exit status is 0 when the requested
checks pass, 1 when a check fails and 2 for usage or domain errors.

Tolerances of the acceptance checks can be overridden with environment
variables ``TRIANGLE_TOL_<NAME>``; see ``checks.TOLERANCES`` for the names.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import checks as ck
from . import cyclicity as cy
from . import geometry as geo
from . import picard_fuchs as pf
from . import polyalg as pa
from . import quadrature as qd
from . import ratio as rt
from . import simulate as sm

SCHEMA_VERSION = "1"


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    command: str
    ok: bool
    payload: dict
    header: Optional[List[str]] = None
    rows: List[list] = field(default_factory=list)


# formatting ----------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        x = float(v)
        return x if math.isfinite(x) else repr(x)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, (int, bool)):
        return str(v)
    return v


def render_json(out: Outcome) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": out.command,
           "status": "pass" if out.ok else "fail", "result": out.payload}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17e}"
    return str(v)


def render_csv(out: Outcome) -> str:
    if out.header is None:
        raise UsageError(f"{out.command} has no tabular output; use --format json")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(out.header)
    for row in out.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


# argument parsing helpers ----------------------------------------------------------------


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _levels(args) -> List[float]:
    if args.grid:
        a, b, n = args.grid
        return list(np.linspace(a, b, int(n)))
    if args.h:
        return list(args.h)
    raise UsageError("give --h or --grid")


def _params(args) -> cy.PerturbationParams:
    given = [k for k in ("greek", "mu", "eps") if getattr(args, k, None) is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --greek, --mu, --eps")
    vals = getattr(args, given[0])
    want = 5 if given[0] == "eps" else 4
    if len(vals) != want:
        raise UsageError(f"--{given[0]} needs {want} values")
    return cy.convert_params(given[0], vals)


# commands ------------------------------------------------------------------------------


def cmd_oval(args) -> Outcome:
    rows = []
    for h in _levels(args):
        e = geo.oval_extent(h)
        rows.append([h, e.x1, e.x2, e.x3, e.width])
    header = ["h", "x1", "x2", "x3", "width"]
    return Outcome("oval", True, {"ovals": [dict(zip(header, r)) for r in rows]}, header, rows)


def cmd_integrals(args) -> Outcome:
    rows = []
    for h in _levels(args):
        fr = qd.integral_frame(h) if args.method == "quadrature" else pf.default_flow().frame(h)
        rows.append([h, fr.Istar, fr.I2, fr.I0, fr.dIstar, fr.dI2, fr.dI0])
    header = ["h", "Istar", "I2", "I0", "dIstar", "dI2", "dI0"]
    return Outcome("integrals", True, {"method": args.method, "frames": [dict(zip(header, r)) for r in rows]},
                   header, rows)


def _check_outcome(command, result: ck.CheckResult) -> Outcome:
    rows = [[result.key, p.name, p.passed, json.dumps(_jsonable(p.value), sort_keys=True),
             json.dumps(_jsonable(p.limit), sort_keys=True)] for p in result.parts]
    return Outcome(command, result.passed, {"checks": [result.as_dict()]},
                   ["check", "part", "passed", "value", "limit"], rows)


def cmd_pf_check(args) -> Outcome:
    return _check_outcome("pf-check", ck.check_picard_fuchs(ck.tolerances_from_env(), n_grid=args.n))


def cmd_ratio_check(args) -> Outcome:
    if args.grid or args.h:
        rows = []
        for h in _levels(args):
            p = rt.ratio_point(h)
            env = rt.envelope_check(h, p.w)
            rows.append([h, p.w, p.w1, p.w2, p.w3, env.inside])
        header = ["h", "w", "w1", "w2", "w3", "inside_envelope"]
        ok = all(r[-1] and r[2] > 0 and r[3] > 0 and r[4] > 0 for r in rows)
        return Outcome("ratio-check", ok, {"points": [dict(zip(header, r)) for r in rows]}, header, rows)
    return _check_outcome("ratio-check", ck.check_ratio(ck.tolerances_from_env()))


def cmd_poly_verify(args) -> Outcome:
    if args.resultant:
        p, q = (pa.parse(t) for t in args.resultant)
        r = pa.resultant(p, q, args.var)
        text = pa.format_poly(r)
        return Outcome("poly-verify", True, {"resultant": text, "var": args.var}, ["resultant"], [[text]])
    records = pa.verify_identities()
    ok = all(r.holds for r in records)
    rows = [[r.name, "exact-match" if r.holds else "mismatch", r.statement] for r in records]
    payload = {"identities": [{"name": r.name, "status": row[1], "statement": r.statement, "difference": r.difference}
                              for r, row in zip(records, rows)]}
    return Outcome("poly-verify", ok, payload, ["name", "status", "statement"], rows)


def cmd_j_eval(args) -> Outcome:
    params = _params(args)
    rows = []
    for h in _levels(args):
        rows.append([h, cy.J_eval(h, params, method=args.method), float(cy.f_eval(h, params))])
    header = ["h", "J", "f"]
    return Outcome("j-eval", True, {"params": params.as_dict(), "values": [dict(zip(header, r)) for r in rows]},
                   header, rows)


def cmd_count_zeros(args) -> Outcome:
    params = _params(args)
    rep = cy.count_zeros(params, args.delta1, args.delta2)
    ok = rep.count <= 3 and rep.suspects_unresolved == 0
    rows = [[z.location, z.bracket[0], z.bracket[1], z.direction, z.multiplicity_suspect, z.region]
            for z in rep.zeros]
    payload = rep.as_dict()
    payload["params"] = params.as_dict()
    return Outcome("count-zeros", ok, payload,
                   ["location", "bracket_lo", "bracket_hi", "direction", "multiplicity_suspect", "region"], rows)


def cmd_ect(args) -> Outcome:
    if args.grid or args.h:
        levels = _levels(args)
        res = [cy.ect_determinants(h) for h in levels]
        win = None
    else:
        win = cy.ect_window()
        levels = win.grid
        res = [cy.EctResult(h, d, inc) for h, d, inc in zip(win.grid, win.deltas, win.inconclusive)]
    rows = [[r.h, *r.deltas, r.inconclusive] for r in res]
    ok = all(all(d < 0 for d in r.deltas) for r in res if not r.inconclusive)
    payload = {"points": [{"h": r.h, "deltas": list(r.deltas), "inconclusive": r.inconclusive} for r in res],
               "series_at_center": [[str(c) for c in row] for row in cy.ect_center_series(3)]}
    if win is not None:
        payload["b"] = win.b
    return Outcome("ect", ok, payload, ["h", "delta1", "delta2", "delta3", "delta4", "inconclusive"], rows)


def cmd_find_three(args) -> Outcome:
    try:
        tz = cy.find_three_zeros(tuple(args.targets), window=args.window)
    except cy.WindowTooLargeError as exc:
        return Outcome("find-three", False, {"error": str(exc), "targets": list(args.targets)})
    rows = [[z.location, z.direction, z.multiplicity_suspect] for z in tz.report.zeros]
    payload = {"params": tz.params.as_dict(), "targets": list(tz.targets), "zeros": [r[0] for r in rows],
               "singular_values": list(tz.singular_values)}
    return Outcome("find-three", True, payload, ["location", "direction", "multiplicity_suspect"], rows)


def cmd_scan(args) -> Outcome:
    rep = cy.scan(args.samples, seed=args.seed, jobs=args.jobs or os.cpu_count() or 1)
    d = rep.as_dict()
    ok = (rep.global_max <= 3 and rep.suspects_unresolved == 0 and rep.parity_failures == 0
          and not any(v["violations"] for v in d["strata"].values()))
    rows = [[k, v["samples"], v["max_count"], v["predicted_bound"], v["violations"]] for k, v in sorted(d["strata"].items())]
    return Outcome("scan", ok, d, ["stratum", "samples", "max_count", "predicted_bound", "violations"], rows)


def cmd_simulate(args) -> Outcome:
    if args.eps is not None:
        if len(args.eps) != 5:
            raise UsageError("--eps needs 5 values")
        eps = sm.EpsVector(*args.eps)
    elif args.mu is not None:
        if len(args.mu) != 4:
            raise UsageError("--mu needs 4 values")
        eps = sm.eps_from_mu(args.mu, args.delta)
    else:
        raise UsageError("give --eps or --mu with --delta")
    window = tuple(args.window) if args.window else sm.DEFAULT_WINDOW
    cc = sm.count_cycles(eps, n_section=args.n_section, window=window)
    if args.orbit_csv:
        sm.write_csv(args.orbit_csv, ["t", "x", "y", "H"], sm.orbit_samples(args.orbit_level, eps))
    payload = {"eps": list(eps.values), "gauge": eps.gauge, "mu": [float(x) for x in eps.mu],
               "count": cc.count, "levels": cc.levels, "escaped": cc.escaped, "window": list(window)}
    rows = [[h, d] for h, d in zip(cc.grid, cc.displacements)]
    return Outcome("simulate", True, payload, ["h", "displacement"], rows)


def cmd_acceptance(args) -> Outcome:
    keys = list(ck.CHECKS)
    if args.only:
        keys = [k for k in args.only.split(",") if k]
    if args.skip:
        keys = [k for k in keys if k not in args.skip.split(",")]
    unknown = [k for k in keys if k not in ck.CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; known: {list(ck.CHECKS)}")
    tol = ck.tolerances_from_env()
    results = []
    for k in keys:
        r = ck.CHECKS[k](tol, jobs=args.jobs or None) if k == "C6" else ck.CHECKS[k](tol)
        print(r.line(), file=sys.stderr)
        results.append(r)
    rows = [[r.key, p.name, p.passed, json.dumps(_jsonable(p.value), sort_keys=True),
             json.dumps(_jsonable(p.limit), sort_keys=True)] for r in results for p in r.parts]
    payload = {"checks": [r.as_dict() for r in results], "tolerances": tol}
    return Outcome("acceptance", all(r.passed for r in results), payload,
                   ["check", "part", "passed", "value", "limit"], rows)


def cmd_report(args) -> Outcome:
    if not args.artifacts:
        raise UsageError("report needs at least one JSON artifact")
    checks = []
    sources = []
    for path in args.artifacts:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read artifact {path}: {exc}")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise UsageError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
        sources.append({"path": str(path), "command": doc.get("command"), "status": doc.get("status")})
        result = doc.get("result", {})
        for c in result.get("checks", []):
            checks.append({"key": c["key"], "title": c["title"], "anchor": c["anchor"], "passed": c["passed"],
                           "limits": {p["name"]: p["limit"] for p in c["parts"]}})
        if doc.get("command") == "scan":
            checks.append({"key": "scan", "title": "stratum maxima", "anchor": "zero bound per stratum",
                           "passed": doc.get("status") == "pass",
                           "limits": {k: {"max": v["max_count"], "bound": v["predicted_bound"]}
                                      for k, v in result.get("strata", {}).items()}})
    if not checks and not sources:
        raise UsageError("no artifacts")
    ok = all(s["status"] == "pass" for s in sources)
    rows = [[c["key"], c["title"], c["passed"], c["anchor"]] for c in checks]
    return Outcome("report", ok, {"sources": sources, "checks": checks}, ["key", "title", "passed", "anchor"], rows)


# parser --------------------------------------------------------------------------------


def _add_levels(p):
    p.add_argument("--h", type=float, nargs="+", help="energy levels in (-4, 0)")
    p.add_argument("--grid", type=float, nargs=3, metavar=("A", "B", "N"), help="N levels from A to B")


def _add_params(p):
    p.add_argument("--greek", type=_floats, help="lambda,sigma,gamma,kappa")
    p.add_argument("--mu", type=_floats, help="mu1,mu2,mu3,mu4")
    p.add_argument("--eps", type=_floats, help="eps0,...,eps4")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out-dir", help="write <command>.<format> into this directory instead of stdout")
    common.add_argument("--jobs", type=int, default=0, help="worker processes for scans (0: all cores)")

    parser = argparse.ArgumentParser(prog="triangle-cyclicity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oval", parents=[common], help="oval extent x1 < x2 at level h")
    _add_levels(p)
    p.set_defaults(func=cmd_oval)

    p = sub.add_parser("integrals", parents=[common], help="(I*, I2, I0) and derivatives")
    _add_levels(p)
    p.add_argument("--method", choices=("quadrature", "flow"), default="quadrature")
    p.set_defaults(func=cmd_integrals)

    p = sub.add_parser("pf-check", parents=[common], help="Picard-Fuchs residual and flow agreement")
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_pf_check)

    p = sub.add_parser("ratio-check", parents=[common], help="properties of w = I2'/I0'")
    _add_levels(p)
    p.set_defaults(func=cmd_ratio_check)

    p = sub.add_parser("poly-verify", parents=[common], help="exact polynomial identities")
    p.add_argument("--resultant", nargs=2, metavar=("P", "Q"), help="compute Res(P, Q) instead")
    p.add_argument("--var", default="x")
    p.set_defaults(func=cmd_poly_verify)

    p = sub.add_parser("j-eval", parents=[common], help="J(h) and f(h) for one parameter point")
    _add_levels(p)
    _add_params(p)
    p.add_argument("--method", choices=("flow", "quadrature"), default="flow")
    p.set_defaults(func=cmd_j_eval)

    p = sub.add_parser("count-zeros", parents=[common], help="zeros of J in (-4, 0)")
    _add_params(p)
    p.add_argument("--delta1", type=float, default=1e-3)
    p.add_argument("--delta2", type=float, default=1e-6)
    p.set_defaults(func=cmd_count_zeros)

    p = sub.add_parser("ect", parents=[common], help="Wronskian determinants Delta_1..Delta_4")
    _add_levels(p)
    p.set_defaults(func=cmd_ect)

    p = sub.add_parser("find-three", parents=[common], help="parameters with three zeros of J")
    p.add_argument("--targets", type=_floats, default=[-3.98, -3.95, -3.9])
    p.add_argument("--window", type=float)
    p.set_defaults(func=cmd_find_three)

    p = sub.add_parser("scan", parents=[common], help="seeded scan of zero counts")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=20240531)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", parents=[common], help="limit cycles of the perturbed system")
    p.add_argument("--eps", type=_floats)
    p.add_argument("--mu", type=_floats)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--n-section", type=int, default=48)
    p.add_argument("--window", type=float, nargs=2)
    p.add_argument("--orbit-csv", help="also dump one orbit as CSV")
    p.add_argument("--orbit-level", type=float, default=-2.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("acceptance", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", help="comma-separated check keys, e.g. C1,C3")
    p.add_argument("--skip", help="comma-separated check keys to leave out")
    p.set_defaults(func=cmd_acceptance)

    p = sub.add_parser("report", parents=[common], help="merge JSON artifacts into one report")
    p.add_argument("artifacts", nargs="*")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
        text = render_csv(out) if args.format == "csv" else render_json(out)
    except (UsageError, geo.DomainError, ValueError, KeyError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        path = d / f"{out.command}.{args.format}"
        path.write_text(text)
        print(path)
    else:
        sys.stdout.write(text)
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())
