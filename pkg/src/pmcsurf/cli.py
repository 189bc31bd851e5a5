"""Command-line front end: ``pmcsurf {elliptic,profile,verify,moduli}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or domain error.
CSV numbers are written with 17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import moduli
from .elliptic import DomainError, amplitude, complete_K, sn_cn_dn
from .surfaces import SurfaceParams, family_from_tag, frame_data
from .verify import GridSpec, _json_default, verify_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PROFILE_COLUMNS = ("u", "alpha", "sin2alpha", "re_mu", "im_mu", "re_a", "im_a",
                   "re_c", "im_c", "metric", "K")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: SurfaceParams | None
    grid: GridSpec | None
    fmt: str
    output: str | None


def _num(x) -> str:
    return f"{float(x):.17g}"


def _csv(header, rows, preamble=()) -> str:
    buf = io.StringIO()
    for line in preamble:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(x) if isinstance(x, (float, int, np.floating, np.integer))
                    and not isinstance(x, bool) else x for x in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, default=_json_default, indent=2) + "\n"


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="hirakawa",
                        help="boundary-plus | boundary-minus | general | hirakawa")
    common.add_argument("--p", type=float, default=None, help="constant p of the general family")
    common.add_argument("--b", type=float, default=1.0, help="|H| = 2b")
    common.add_argument("--t", type=float, default=0.0, help="associated-family phase in [0, pi]")
    common.add_argument("--n", type=int, default=400, help="grid points")
    common.add_argument("--h", type=float, default=None, help="FD step (default u_max * 1e-4)")
    common.add_argument("--delta", type=float, default=1e-3, help="grid trim fraction")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")

    ap = _Parser(prog="pmcsurf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    el = sub.add_parser("elliptic", parents=[common], help="tabulate am, sn, cn, dn")
    el.add_argument("--k", type=float, required=True, help="elliptic modulus")
    el.add_argument("--x-min", type=float, default=0.0)
    el.add_argument("--x-max", type=float, default=1.0)

    sub.add_parser("profile", parents=[common], help="frame data over the trimmed grid")
    sub.add_parser("verify", parents=[common], help="structure-equation residual report")

    mo = sub.add_parser("moduli", parents=[common], help="moduli catalog and limit tables")
    act = mo.add_mutually_exclusive_group(required=True)
    act.add_argument("--limit", choices=("zero", "quarter-low", "quarter-high"))
    act.add_argument("--assoc", action="store_true")
    act.add_argument("--strata", action="store_true")
    act.add_argument("--noniso", action="store_true")
    mo.add_argument("--ambient", default="ch2")
    mo.add_argument("--p-seq", default=None, help="comma-separated p values")
    mo.add_argument("--t-list", default="0,0.78539816339744828,1.5707963267948966,3.1415926535897931")
    mo.add_argument("--q", type=float, default=None, help="second p for --noniso")
    return ap


def _config(args) -> RunConfig:
    if args.n < 1:
        raise UsageError("--n must be positive")
    grid, params = None, None
    if args.subcommand != "elliptic":
        grid = GridSpec(n=args.n, delta=args.delta, h=args.h)
    if args.subcommand in ("profile", "verify"):
        params = SurfaceParams(args.b, args.t, family_from_tag(args.family, args.p))
        grid.step(params)  # validates h against the domain
    default_fmt = "json" if args.subcommand == "verify" else "csv"
    return RunConfig(args.subcommand, params, grid, args.format or default_fmt, args.output)


def cmd_elliptic(args, cfg: RunConfig):
    k = args.k
    if not (0.0 <= k <= 1.0):
        raise DomainError(f"elliptic modulus must lie in [0, 1], got {k!r}")
    x = np.linspace(args.x_min, args.x_max, args.n)
    K = complete_K(k) if k < 1.0 else math.inf
    am = np.atleast_1d(amplitude(x, k))
    sn, cn, dn = sn_cn_dn(x, k)
    if cfg.fmt == "json":
        rows = [dict(x=a, am=b, sn=c, cn=d, dn=e) for a, b, c, d, e in zip(x, am, sn, cn, dn)]
        return _json({"k": k, "K": K if math.isfinite(K) else None, "rows": rows}), EXIT_OK
    return _csv(("x", "am", "sn", "cn", "dn"), zip(x, am, sn, cn, dn),
                preamble=[f"# K={_num(K)}"]), EXIT_OK


def cmd_profile(args, cfg: RunConfig):
    u = cfg.grid.points(cfg.params)
    f = frame_data(cfg.params, u)
    cols = (f.u, f.alpha, f.sin2_alpha, f.mu.real, f.mu.imag, f.a.real, f.a.imag,
            f.c.real, f.c.imag, f.metric, f.gauss_K)
    if cfg.fmt == "json":
        return _json({name: np.asarray(c).tolist() for name, c in zip(PROFILE_COLUMNS, cols)}), EXIT_OK
    return _csv(PROFILE_COLUMNS, zip(*cols)), EXIT_OK


def cmd_verify(args, cfg: RunConfig):
    report = verify_all(cfg.params, cfg.grid)
    code = EXIT_OK if report.passed else EXIT_FAIL
    if cfg.fmt == "csv":
        rows = [(c.name, c.kind, c.max_residual, c.at_u, c.order if c.order is not None else "",
                 str(c.passed).lower()) for c in report.checks]
        return _csv(("name", "kind", "max_residual", "at_u", "order", "pass"), rows), code
    return _json(report.to_dict()), code


def _default_p_seq(limit):
    j = np.arange(1, 7)
    if limit == "zero":
        return 10.0 ** -j
    return 0.25 - 10.0 ** -j if limit == "quarter-low" else 0.25 + 10.0 ** -j


def cmd_moduli(args, cfg: RunConfig):
    fmt = cfg.fmt
    if args.strata:
        strata = moduli.describe_moduli(args.ambient)
        rows = [s.to_dict() for s in strata]
        if fmt == "json":
            return _json({"ambient": args.ambient.upper(), "strata": rows,
                          "disjoint": moduli.ranges_disjoint(strata)}), EXIT_OK
        keys = list(rows[0])
        return _csv(keys, ([str(r[k]) if r[k] is not None else "" for k in keys] for r in rows)), EXIT_OK

    if args.limit:
        ps = _floats(args.p_seq) if args.p_seq else _default_p_seq(args.limit)
        if args.limit == "zero":
            table = moduli.limit_p_to_zero(args.b, args.t, ps)
        else:
            side = "low" if args.limit == "quarter-low" else "high"
            table = moduli.limit_p_to_quarter(args.b, args.t, side, ps)
        if fmt == "json":
            return _json(table.to_dict()), EXIT_OK
        return table.to_csv(), EXIT_OK

    if args.assoc:
        if args.p is None:
            raise UsageError("--assoc needs --p")
        rep = moduli.associated_family_check(args.b, args.p, _floats(args.t_list), cfg.grid)
        d = rep.to_dict()
        code = EXIT_OK if rep.passed else EXIT_FAIL
        if fmt == "json":
            return _json(d), code
        rows = [(k, v, rep.tolerance, str(v <= rep.tolerance).lower()) for k, v in rep.deviations.items()]
        rows.append(("phase_ratio", rep.phase_error, rep.phase_tolerance,
                     str(rep.phase_error <= rep.phase_tolerance).lower()))
        return _csv(("quantity", "max_deviation", "tolerance", "pass"), rows), code

    # --noniso
    if args.p is None or args.q is None:
        raise UsageError("--noniso needs --p and --q")
    rep = moduli.non_isometry_check(args.b, args.p, args.q)
    code = EXIT_OK if rep.passed else EXIT_FAIL
    if fmt == "json":
        return _json(rep.to_dict()), code
    return _csv(("p", "q", "gap", "threshold", "pass"),
                [(rep.p, rep.q, rep.gap, rep.threshold, str(rep.passed).lower())]), code


COMMANDS = {"elliptic": cmd_elliptic, "profile": cmd_profile,
            "verify": cmd_verify, "moduli": cmd_moduli}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        text, code = COMMANDS[args.subcommand](args, cfg)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"pmcsurf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
