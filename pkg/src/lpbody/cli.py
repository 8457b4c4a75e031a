"""Command-line front end.

Subcommands::

    lpbody body {eval,volume,tabulate} SPEC
    lpbody transform {iCp,ip,ic,radon} SPEC
    lpbody multipliers {J,C+,Rc}
    lpbody verify {NAME,all}

``SPEC`` is a path to a JSON body spec or the JSON text itself.  Exit
codes: 0 success, 1 a check failed, 2 usage or spec error, 3 numeric
failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from lpbody import __version__
from lpbody import transforms as T
from lpbody import verify as V
from lpbody.geometry import PlanarConvexBody, SpecError, StarBody, volume
from lpbody.harmonics import multiplier_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

NAMED_PLANAR = {
    "disk": PlanarConvexBody.disk,
    "segment": PlanarConvexBody.segment,
    "square": PlanarConvexBody.square,
    "triangle": PlanarConvexBody.triangle,
}


class UsageError(Exception):
    pass


def _load_json(text):
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"not a file and not valid JSON: {text!r} ({exc})") from None


def parse_planar(text):
    if text in NAMED_PLANAR:
        return NAMED_PLANAR[text]()
    return PlanarConvexBody.from_spec(_load_json(text))


def parse_body(text, n=2):
    if text == "ball":
        return StarBody.ball(n)
    return StarBody.from_spec(_load_json(text))


def parse_floats(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a list of numbers, got {text!r}") from None


def run_config(args):
    """Everything that determines the output, recorded in every file."""
    keys = ("command", "action", "spec", "n", "p", "C", "resolution", "grid", "seed", "tol",
            "kmax", "lmax", "numeric", "p_list", "u", "format")
    cfg = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return cfg


def _clean(x):
    return V._jsonable(x)


def emit(args, payload, timing=None):
    """Write ``payload`` (plus config and version) and a timestamp sidecar."""
    fmt = args.format
    if fmt == "json":
        doc = {"version": __version__, "config": run_config(args), "result": _clean(payload)}
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        if not isinstance(payload, str):
            raise UsageError("csv output is only available for multiplier tables")
        text = f"# lpbody {__version__} {json.dumps(run_config(args), sort_keys=True)}\n" + payload
    else:
        text = payload if isinstance(payload, str) else _plot_text(args, payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        side = {"timestamp": datetime.now(timezone.utc).isoformat(), "timing": timing or {}}
        with open(args.out + ".time.json", "w") as fh:
            json.dump(_clean(side), fh, sort_keys=True, indent=2)
    else:
        sys.stdout.write(text)


def _plot_text(args, payload):
    cols = payload["columns"]
    head = [f"# {payload['title']}", f"# lpbody {__version__} {json.dumps(run_config(args), sort_keys=True)}",
            "# " + " ".join(cols)]
    rows = zip(*[payload["data"][c] for c in cols])
    return "\n".join(head + [" ".join(f"{v:.17g}" for v in r) for r in rows]) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_body(args):
    K = parse_body(args.spec, args.n)
    if args.action == "eval":
        if args.u is None:
            raise UsageError("eval needs --u")
        u = np.asarray(parse_floats(args.u))
        if u.size != 2 * K.n:
            raise UsageError(f"--u needs {2 * K.n} real coordinates")
        return {"radial": float(K.radial(u.view(complex)[None])[0])}, EXIT_OK
    if args.action == "volume":
        return {"volume": volume(K)}, EXIT_OK
    res = args.resolution or T._resolution(K.n, None)
    return K.tabulate(res).to_spec(), EXIT_OK


def cmd_transform(args):
    K = parse_body(args.spec, args.n)
    kw = {"resolution": args.resolution, "grid": args.grid}
    if args.action == "iCp":
        if args.p is None:
            raise UsageError("iCp needs --p")
        out = T.complex_lp_intersection_body(parse_planar(args.C), args.p, K, **kw)
    elif args.action == "ip":
        if args.p is None:
            raise UsageError("ip needs --p")
        out = T.real_lp_intersection_body(args.p, K, **kw)
    elif args.action == "ic":
        out = T.complex_intersection_body(K, **kw)
    else:
        out = T.radon_body(K, **kw)
    prov = dict(out.provenance)
    timing = {"seconds": prov.pop("wall_time", None)}
    return {"body": out.to_spec(), "provenance": prov}, EXIT_OK, timing


def cmd_multipliers(args):
    kind = args.action
    if kind == "J":
        if args.p is None:
            raise UsageError("J needs --p")
        kernel = ("J", parse_planar(args.C), args.p)
    elif kind == "C+":
        if args.p is None:
            raise UsageError("C+ needs --p")
        kernel = ("cosine", args.p)
    else:
        kernel = ("radon",)
    table = multiplier_table(kernel, args.n, args.kmax, args.lmax, numeric=args.numeric,
                             resolution=args.resolution)
    if args.format == "csv":
        return table.to_csv(), EXIT_OK
    rows = [{"k": k, "l": l, "closed": c, "numeric": num, "error": err}
            for (k, l), c, num, err in table.rows()]
    return {"kernel": table.tag, "n": table.n, "rows": rows}, EXIT_OK


def _suite(args):
    n, seed = args.n, args.seed
    kw = {"resolution": args.resolution, "grid": args.grid}
    p = args.p
    C = parse_planar(args.C) if args.C else None
    tol = args.tol
    extra = {} if tol is None else {"tol": tol}
    base = V.default_suite(n, args.resolution, args.grid, seed)
    D, S, Tr = PlanarConvexBody.disk(), PlanarConvexBody.square(), PlanarConvexBody.triangle()
    B = StarBody.ball(n)
    P4 = StarBody.closed_form(n, "power_sum", q=4.0)
    override = {}
    if p is not None or C is not None or tol is not None or args.p_list is not None:
        plist = tuple(args.p_list) if args.p_list else (-1.9, -1.99, -1.999)
        override = {
            "constancy": lambda: V.check_constancy_J(C or S, p or -0.5, n, **kw, **extra),
            "contravariance": lambda: V.check_contravariance(C or S, p or 0.5, P4,
                                                             V.well_conditioned_matrix(n, seed), **kw, **extra),
            "reduction": lambda: V.check_kernel_reduction(p or 0.5, V.random_body(n, seed), **kw, **extra),
            "limit": lambda: V.check_limit_theoremA(C or D, B, p_list=plist, **kw, **extra),
            "ratio": lambda: V.check_ratio_theoremC(C or D, p or 1.0, P4, **kw, **extra),
            "inequality": lambda: V.check_inequality_theoremD(C or S, p or 0.5, V.random_body(n, seed),
                                                              **kw, **extra),
            "busemann": lambda: V.check_busemann_theoremE(C or S, p or 0.5, V.random_body(n, seed),
                                                          **kw, **extra),
            "representation": lambda: V.check_representation_pm1(C or S, B, **kw, **extra),
            "levi": lambda: V.check_levi(P4, p or -1.5, samples=50, C=C, seed=seed,
                                         resolution=args.resolution, **extra),
            "laplacian": lambda: V.check_laplacian_identity(B, p or -1.5, resolution=args.resolution, **extra),
            "moments": lambda: V.check_moment_lemmas(B, triples=100, seed=seed, **extra),
            "counterexample": lambda: V.counterexample_ellipsoids(C or Tr, p or 0.5, n=n),
        }
    return {**base, **override}


def cmd_verify(args):
    suite = _suite(args)
    names = list(suite) if args.action == "all" else [args.action]
    for name in names:
        if name not in suite:
            raise UsageError(f"unknown check {name!r}; choose from {', '.join(suite)} or all")
    reports, timing, code = [], {}, EXIT_OK
    for name in names:
        try:
            r = suite[name]()
        except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError) as exc:
            reports.append({"name": name, "passed": False, "error": f"numeric failure: {exc}"})
            code = max(code, EXIT_NUMERIC)
            continue
        except ValueError as exc:
            reports.append({"name": name, "passed": False, "error": str(exc)})
            code = max(code, EXIT_USAGE)
            continue
        d = r.to_dict()
        timing[name] = d.pop("wall_time")
        reports.append(d)
        print(r.row(), file=sys.stderr)
        if not r.passed:
            code = max(code, EXIT_FAIL)
    if args.format == "plot-data":
        if len(names) != 1 or names[0] not in PLOTS or "error" in reports[0]:
            raise UsageError(f"plot-data is available for {', '.join(PLOTS)}")
        return PLOTS[names[0]](args, reports[0]), code, timing
    return {"reports": reports, "all_passed": code == EXIT_OK}, code, timing


def _plot_limit(args, rep):
    d = rep["details"]
    return {"title": "sup distance of the normalized L_p bodies to the p -> -2 limit",
            "columns": ["p", "distance"],
            "data": {"p": rep["params"]["p_list"], "distance": d["distances"]}}


def _plot_counterexample(args, rep):
    C = parse_planar(args.C) if args.C else PlanarConvexBody.triangle()
    p = args.p if args.p is not None else 0.5
    item = V.solve_ellipsoid(args.n, p, rep["params"]["j_list"][-1])
    theta, rho = V.ellipsoid_slice(C, p, item)
    lim = V.limit_profile(C, p, args.n).radial(np.exp(1j * theta))
    return {"title": f"radial function on the complex line C e_1: slice of I_(C,p) E_j (j={item.j}) "
                     "and the limit profile",
            "columns": ["theta", "slice", "limit"],
            "data": {"theta": theta.tolist(), "slice": rho.tolist(), "limit": lim.tolist()}}


PLOTS = {"limit": _plot_limit, "counterexample": _plot_counterexample}


# ---------------------------------------------------------------------------
# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="complex dimension")
    common.add_argument("--p", type=float, help="exponent p")
    common.add_argument("--C", help="planar convex body: disk, segment, square, triangle, JSON or path")
    common.add_argument("--resolution", type=int, help="integration nodes per circle factor")
    common.add_argument("--grid", type=int, help="output grid resolution")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, help="override the check tolerance")
    common.add_argument("--out", help="output file (a .time.json sidecar holds timestamps)")
    common.add_argument("--format", choices=("json", "csv", "plot-data"), default="json")

    ap = argparse.ArgumentParser(prog="lpbody", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"lpbody {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("body", parents=[common], help="evaluate, measure or tabulate a star body")
    b.add_argument("action", choices=("eval", "volume", "tabulate"))
    b.add_argument("spec")
    b.add_argument("--u", help="point as 2n real coordinates (Re z1, Im z1, ...)")

    t = sub.add_parser("transform", parents=[common], help="apply a body map")
    t.add_argument("action", choices=("iCp", "ip", "ic", "radon"))
    t.add_argument("spec")

    m = sub.add_parser("multipliers", parents=[common], help="multiplier table of a kernel")
    m.add_argument("action", choices=("J", "C+", "Rc"))
    m.add_argument("--kmax", type=int, default=3)
    m.add_argument("--lmax", type=int, default=3)
    m.add_argument("--no-numeric", dest="numeric", action="store_false")

    v = sub.add_parser("verify", parents=[common], help="run numerical checks")
    v.add_argument("action", metavar="check", help="check name or 'all'")
    v.add_argument("--p-list", dest="p_list", type=parse_floats_arg, help="p values for the limit check, e.g. --p-list=-1.9,-1.99")
    return ap


def parse_floats_arg(text):
    try:
        return parse_floats(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _validate(args):
    if args.tol is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    for name in ("resolution", "grid"):
        val = getattr(args, name)
        if val is not None and val < 4:
            raise UsageError(f"--{name} must be at least 4")
    if args.p is not None and args.p == 0:
        raise UsageError("p = 0 is excluded")


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {"body": cmd_body, "transform": cmd_transform,
                "multipliers": cmd_multipliers, "verify": cmd_verify}
    t0 = time.perf_counter()
    try:
        _validate(args)
        out = handlers[args.command](args)
    except (UsageError, SpecError) as exc:
        print(f"lpbody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"lpbody: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"lpbody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload, code = out[0], out[1]
    timing = out[2] if len(out) > 2 else {}
    timing = {**timing, "total_seconds": time.perf_counter() - t0}
    try:
        emit(args, payload, timing)
    except UsageError as exc:
        print(f"lpbody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
