"""``farey-bq`` command line front end.

Exit codes: 0 success, 1 usage error or unreadable input, 2 numerical or
degenerate input (e.g. a reducible representation where one is not allowed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import analysis, farey
from .geometry import GeometryError, ReducibleError, Representation, classify, fricke_kappa, representation_from_traces

VERDICT_GRAY = {"Yes": 255, "Inconclusive": 128, "No": 0}
MAX_SCAN_SIDE = 4096
MAX_SCAN_DEPTH = 16


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- argument helpers ---------------------------------------------------------


def _floats(text, n):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {len(vals)}")
    return vals


def _traces_arg(text):
    v = _floats(text, 6)
    return complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5])


def _complex_arg(text):
    v = _floats(text, 2)
    return complex(v[0], v[1])


def _range_arg(text):
    lo, hi = _floats(text, 2)
    return lo, hi


def _size_arg(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 64x64, got {text!r}")
    return w, h


def load_rep(args):
    if args.rep and args.traces:
        raise UsageError("give exactly one of --rep and --traces")
    if args.traces:
        return representation_from_traces(*args.traces)
    if args.rep:
        try:
            with open(args.rep) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read representation from {args.rep}: {exc}")
        try:
            return Representation.from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GeometryError):
                raise
            raise UsageError(f"bad representation file {args.rep}: {exc}")
    raise UsageError("this command needs --rep FILE or --traces x_re,x_im,y_re,y_im,z_re,z_im")


def _require_irreducible(rep):
    if not rep.is_irreducible():
        raise ReducibleError(f"reducible representation (kappa = {_c(rep.kappa)})")


def _c(z):
    return [z.real, z.imag]


def _emit(args, text, binary=False):
    if args.out:
        mode = "wb" if binary else "w"
        with open(args.out, mode, **({} if binary else {"newline": ""})) as fh:
            fh.write(text)
    elif binary:
        sys.stdout.buffer.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _fmt(args, default, allowed):
    fmt = args.format or default
    if fmt not in allowed:
        raise UsageError(f"{args.command} supports --format {'|'.join(allowed)}")
    return fmt


# -- commands -------------------------------------------------------------------


def cmd_info(args):
    _fmt(args, "json", ("json",))
    rep = load_rep(args)
    x, y, z = rep.traces()
    out = {
        "traces": {"x": _c(x), "y": _c(y), "z": _c(z)},
        "kappa": _c(rep.kappa),
        "kappa_fricke": _c(fricke_kappa(x, y, z)),
        "irreducible": rep.is_irreducible(),
        "reducible": not rep.is_irreducible(),
        "classes": {name: classify(M).value for name, M in (("a", rep.A), ("b", rep.B), ("ab", rep.A @ rep.B))},
    }
    _emit(args, _json_text(out))


def cmd_words(args):
    fmt = _fmt(args, "csv", ("csv", "json"))
    rows = farey.word_table(args.max_level if args.max_level is not None else 3)
    if fmt == "json":
        _emit(args, _json_text([dict(zip(farey.WORD_TABLE_HEADER, r)) for r in rows]))
    else:
        _emit(args, analysis.to_csv(farey.WORD_TABLE_HEADER, rows))


def cmd_bq(args):
    _fmt(args, "json", ("json",))
    rep = load_rep(args)
    v = analysis.bq_decide(rep, args.depth if args.depth is not None else 10, args.margin)
    _emit(args, _json_text(v.to_json()))


def cmd_theta(args):
    fmt = _fmt(args, "csv", ("csv", "json"))
    rep = load_rep(args)
    _require_irreducible(rep)
    n = args.max_level if args.max_level is not None else 10
    scan = analysis.theta_scan(rep, n)
    sep = analysis.separation_scan(rep, n)
    if fmt == "json":
        out = {
            "levels": [
                {"level": r.level, "max_theta": r.max_theta, "edges": r.edges, "failures": r.failures,
                 "argmax": str(r.argmax) if r.argmax else None}
                for r in scan
            ],
            "separation": [{"level": k, "all": ok, "edges": n_e, "failures": f} for k, ok, n_e, f in sep.per_level],
            "n_star": sep.n_star,
        }
        _emit(args, _json_text(out))
    else:
        _emit(args, analysis.theta_scan_csv(scan))


def cmd_ps(args):
    fmt = _fmt(args, "json", ("json", "csv"))
    rep = load_rep(args)
    _require_irreducible(rep)
    est = analysis.ps_margin(rep, max_level=args.max_level if args.max_level is not None else 6, power_window=args.window)
    if fmt == "csv":
        _emit(args, analysis.to_csv(("m", "c", "samples", "stable_cap"), [(est.m, est.c, est.samples, est.stable_cap)]))
    else:
        out = {
            "base_point": {"z": _c(est.base_point.z), "t": est.base_point.t},
            "m": est.m,
            "c": est.c,
            "samples": est.samples,
            "stable_cap": est.stable_cap,
        }
        _emit(args, _json_text(out))


def cmd_bi(args):
    fmt = _fmt(args, "json", ("json", "csv"))
    rep = load_rep(args)
    _require_irreducible(rep)
    rpt = analysis.bi_scan(rep, args.max_level if args.max_level is not None else 8)
    if fmt == "csv":
        rows = [(k, getattr(rpt, "diam" + k), getattr(rpt, "count" + k)) for k in "PQR"]
        _emit(args, analysis.to_csv(("axis", "diameter", "count"), rows))
    else:
        out = {
            "diameters": rpt.diameters(),
            "counts": {"P": rpt.countP, "Q": rpt.countQ, "R": rpt.countR},
            "max_dist_residual": rpt.max_dist_residual,
            "max_angle_residual": rpt.max_angle_residual,
            "skipped": [{"slope": str(s), "basis": b, "word": str(w)} for s, b, w in rpt.skipped],
        }
        _emit(args, _json_text(out))


# -- parameter-space scan ----------------------------------------------------------


def pixel_centers(re_range, im_range, width, height):
    """Row-major grid of pixel centers; row 0 is the top (largest imaginary part)."""
    (r0, r1), (i0, i1) = re_range, im_range
    dx, dy = (r1 - r0) / width, (i1 - i0) / height
    return [[complex(r0 + (c + 0.5) * dx, i1 - (r + 0.5) * dy) for c in range(width)] for r in range(height)]


def _scan_row(job):
    x, y, zs, depth, margin = job
    out = []
    for z in zs:
        v = analysis.bq_decide(representation_from_traces(x, y, z), depth, margin)
        level = v.max_level if v.kind is analysis.Verdict.YES else v.depth
        out.append((v.kind.value, level))
    return out


def _workers():
    env = os.environ.get("FAREY_BQ_THREADS")
    n = os.cpu_count() or 1
    if env:
        try:
            n = max(1, min(n, int(env)))
        except ValueError:
            raise UsageError(f"FAREY_BQ_THREADS must be an integer, got {env!r}")
    return n


def scan_slice(x, y, re_range, im_range, width, height, depth, margin=analysis.DEFAULT_MARGIN, workers=1):
    """Verdict grid ``[[(kind, level), ...], ...]`` of ``bq_decide`` over z, plus the pixel centers."""
    if width < 1 or height < 1 or width > MAX_SCAN_SIDE or height > MAX_SCAN_SIDE:
        raise UsageError(f"grid must be between 1x1 and {MAX_SCAN_SIDE}x{MAX_SCAN_SIDE}")
    if not re_range[1] > re_range[0] or not im_range[1] > im_range[0]:
        raise UsageError("degenerate grid: ranges must be increasing")
    if not 1 <= depth <= MAX_SCAN_DEPTH:
        raise UsageError(f"depth must be in 1..{MAX_SCAN_DEPTH}")
    centers = pixel_centers(re_range, im_range, width, height)
    jobs = [(x, y, row, depth, margin) for row in centers]
    if workers > 1 and height > 1:
        with ProcessPoolExecutor(max_workers=min(workers, height)) as pool:
            rows = list(pool.map(_scan_row, jobs))  # map keeps row order
    else:
        rows = [_scan_row(j) for j in jobs]
    return centers, rows


def scan_pgm(rows):
    h, w = len(rows), len(rows[0])
    body = bytes(VERDICT_GRAY[kind] for row in rows for kind, _ in row)
    return f"P5\n{w} {h}\n255\n".encode("ascii") + body


def scan_csv(centers, rows):
    out = []
    for r, (crow, vrow) in enumerate(zip(centers, rows)):
        for c, (z, (kind, level)) in enumerate(zip(crow, vrow)):
            out.append((r, c, z, kind, level, VERDICT_GRAY[kind]))
    return analysis.to_csv(("row", "col", "z_re", "z_im", "verdict", "level", "gray"), out)


def cmd_scan(args):
    fmt = _fmt(args, "pgm", ("pgm", "csv"))
    w, h = args.size
    centers, rows = scan_slice(args.x, args.y, args.re_range, args.im_range, w, h,
                               args.depth if args.depth is not None else 8, args.margin, _workers())
    csv_text = scan_csv(centers, rows)
    if fmt == "csv":
        _emit(args, csv_text)
        return
    if not args.out:
        raise UsageError("scan --format pgm needs --out PATH (the CSV twin goes next to it)")
    with open(args.out, "wb") as fh:
        fh.write(scan_pgm(rows))
    twin = os.path.splitext(args.out)[0] + ".csv"
    with open(twin, "w", newline="") as fh:
        fh.write(csv_text)


COMMANDS = {
    "info": cmd_info,
    "words": cmd_words,
    "bq": cmd_bq,
    "theta": cmd_theta,
    "ps": cmd_ps,
    "bi": cmd_bi,
    "scan": cmd_scan,
}


def build_parser():
    p = _Parser(prog="farey-bq", description="Bowditch Q-conditions and primitive stability on the Farey tree.")
    p.add_argument("command", choices=sorted(COMMANDS))
    src = p.add_argument_group("representation")
    src.add_argument("--rep", metavar="FILE", help="representation JSON (matrices or traces)")
    src.add_argument("--traces", type=_traces_arg, metavar="x_re,x_im,y_re,y_im,z_re,z_im")
    p.add_argument("--max-level", type=int, help="deepest Farey level to enumerate")
    p.add_argument("--depth", type=int, help="search depth for bq / scan")
    p.add_argument("--margin", type=float, default=analysis.DEFAULT_MARGIN)
    p.add_argument("--window", type=int, default=4, help="ps: axis window in powers of the word")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("csv", "json", "pgm"))
    sc = p.add_argument_group("scan")
    sc.add_argument("--x", type=_complex_arg, default=complex(3), metavar="re,im", help="fixed tr a")
    sc.add_argument("--y", type=_complex_arg, default=complex(3), metavar="re,im", help="fixed tr b")
    sc.add_argument("--re-range", type=_range_arg, default=(2.5, 6.0), metavar="lo,hi")
    sc.add_argument("--im-range", type=_range_arg, default=(-1.0, 1.0), metavar="lo,hi")
    sc.add_argument("--size", type=_size_arg, default=(64, 64), metavar="WxH")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    try:
        if args.margin <= 0:
            raise UsageError("--margin must be positive")
        for name in ("max_level", "depth"):
            val = getattr(args, name)
            if val is not None and val < 0:
                raise UsageError(f"--{name.replace('_', '-')} must be nonnegative")
        if args.window < 0:
            raise UsageError("--window must be nonnegative")
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"farey-bq: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"farey-bq: {exc}", file=sys.stderr)
        return 1
    except (GeometryError, ValueError, ArithmeticError) as exc:
        print(f"farey-bq: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
