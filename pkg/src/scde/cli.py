"""Command-line front end: thresholds, GEXIT curves, coupled runs, bounds,
and table regeneration, all as plain CSV with a reproducibility manifest.

Every run emits a comment header of `# key=value` lines (flags, grid,
tolerances, seed, version); identical manifests reproduce identical output
bit-for-bit with the parallel schedule.  Exit codes: 0 success, 2 invalid
flags, 3 channel-family range failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import __version__
from .density import (DegreeError, DegreePair, FamilyRangeError, GridSpec,
                      battacharyya, entropy, make_family)
from .uncoupled import (DeConfig, FixedEntropyUndefined, area_threshold,
                        bp_threshold, gexit_curve)
from .coupled import (CIRCULAR, CoupledParams, ONE_SIDED_FORCED,
                      ONE_SIDED_FREE, TWO_SIDED, coupled_bp_threshold,
                      coupled_gexit_curve, design_rate)
from .bounds import (admissibility_report, area_threshold_bounds,
                     bp_upper_bound, continuity_constants, f_bound,
                     map_upper_gap, negativity_interval,
                     universal_continuity_bound)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAMILY = 3

PAPER_AREA_DDS = [(5, 6), (4, 5), (3, 4), (4, 6), (3, 5), (3, 6), (3, 7),
                  (3, 8), (3, 9)]
PAPER_BOUNDS_DDS = [(3, 4), (6, 8), (9, 12), (12, 16), (3, 6), (4, 8),
                    (5, 10), (6, 12), (3, 12), (4, 16), (5, 20), (6, 24),
                    (7, 28)]

_BOUNDARY_NAMES = {
    "two-sided": TWO_SIDED, "two_sided": TWO_SIDED,
    "one-sided-forced": ONE_SIDED_FORCED, "one_sided_forced": ONE_SIDED_FORCED,
    "one-sided-free": ONE_SIDED_FREE, "one_sided_free": ONE_SIDED_FREE,
    "circular": CIRCULAR,
}


class _CliError(Exception):
    def __init__(self, msg, code=EXIT_USAGE):
        super().__init__(msg)
        self.code = code


def _parse_dd(s: str) -> DegreePair:
    try:
        l, r = (int(t) for t in s.split(","))
    except ValueError:
        raise _CliError(f"--dd expects L,R integers, got {s!r}")
    try:
        return DegreePair(l, r)
    except DegreeError as e:
        raise _CliError(str(e))


def _parse_schedule(s: str):
    if s == "parallel":
        return "parallel", None
    if s.startswith("random:"):
        try:
            return ("random", int(s.split(":", 1)[1])), int(s.split(":", 1)[1])
        except ValueError:
            raise _CliError("--schedule random:SEED needs an integer seed")
    raise _CliError(f"unknown schedule {s!r} (want parallel|random:SEED)")


def _common_flags(p: argparse.ArgumentParser, channel=True):
    p.add_argument("--dd", required=True, help="degree pair L,R (e.g. 3,6)")
    if channel:
        p.add_argument("--channel", required=True,
                       choices=["bec", "bsc", "bawgnc"])
    p.add_argument("--grid-bins", type=int, default=4096)
    p.add_argument("--grid-range", type=float, default=30.0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--out", default=None, help="CSV output file (default stdout)")
    p.add_argument("--dat", default=None,
                   help="optional gnuplot-style space-separated mirror file")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker cap (default $COUPLED_DE_JOBS or 1)")


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return max(1, args.jobs)
    env = os.environ.get("COUPLED_DE_JOBS")
    return max(1, int(env)) if env else 1


def _grid(args) -> GridSpec:
    try:
        return GridSpec(args.grid_range, args.grid_bins)
    except ValueError as e:
        raise _CliError(str(e))


def _cfg(args) -> DeConfig:
    return DeConfig(max_iter=args.max_iter, bisect_tol=args.tol)


def _manifest(args, extra=None) -> list[str]:
    items = {
        "version": __version__,
        "command": args.cmd,
        "dd": getattr(args, "dd", ""),
        "channel": getattr(args, "channel", ""),
        "grid_bins": getattr(args, "grid_bins", ""),
        "grid_range": getattr(args, "grid_range", ""),
        "tol": getattr(args, "tol", ""),
        "max_iter": getattr(args, "max_iter", ""),
        "seed": "",
        "jobs": _jobs(args) if hasattr(args, "jobs") else "",
    }
    if extra:
        items.update(extra)
    return [f"# {k}={v}" for k, v in items.items() if v != ""]


def _emit(args, header: list[str], rows: list[str]):
    lines = header + rows
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "dat", None):
        with open(args.dat, "w") as f:
            for line in rows[1:]:
                f.write(line.replace(",", " ") + "\n")


def cmd_threshold(args):
    dd = _parse_dd(args.dd)
    grid = _grid(args)
    fam = make_family(args.channel, grid)
    cfg = _cfg(args)
    det: dict = {}
    t0 = time.perf_counter()
    h = bp_threshold(dd, fam, cfg, details=det)
    dt = time.perf_counter() - t0
    _emit(args, _manifest(args),
          ["dd,channel,h_bp,iterations,runtime_s",
           f"\"({dd.l},{dd.r})\",{args.channel},{h:.6f},{det['iterations']},{dt:.2f}"])


def cmd_area(args):
    dd = _parse_dd(args.dd)
    fam = make_family(args.channel, _grid(args))
    cfg = _cfg(args)
    det: dict = {}
    t0 = time.perf_counter()
    h = area_threshold(dd, fam, cfg, details=det)
    dt = time.perf_counter() - t0
    _emit(args, _manifest(args),
          ["dd,channel,h_area,iterations,runtime_s",
           f"\"({dd.l},{dd.r})\",{args.channel},{h:.6f},{det['iterations']},{dt:.2f}"])


def cmd_gexit(args):
    dd = _parse_dd(args.dd)
    fam = make_family(args.channel, _grid(args))
    cfg = _cfg(args)
    lo, hi = args.x_min, args.x_max
    if not (0.0 < lo < hi < 1.0):
        raise _CliError("need 0 < --x-min < --x-max < 1")
    xs = [lo + (hi - lo) * i / (args.points - 1) for i in range(args.points)]
    points, skipped = gexit_curve(dd, fam, xs, cfg)
    rows = ["h_channel,h_fp,gexit"]
    rows += [f"{p.channel_entropy:.6f},{p.fp_entropy:.6f},{p.gexit:.6f}"
             for p in points]
    extra = {"points": args.points, "skipped_targets": len(skipped)}
    _emit(args, _manifest(args, extra), rows)


def cmd_coupled(args):
    dd = _parse_dd(args.dd)
    fam = make_family(args.channel, _grid(args))
    cfg = _cfg(args)
    schedule, seed = _parse_schedule(args.schedule)
    try:
        boundary = _BOUNDARY_NAMES[args.boundary]
    except KeyError:
        raise _CliError(f"unknown boundary {args.boundary!r}")
    p = CoupledParams(dd, args.L, args.w, boundary)
    det: dict = {}
    t0 = time.perf_counter()
    h = coupled_bp_threshold(p, fam, cfg, schedule, details=det)
    dt = time.perf_counter() - t0
    extra = {"L": args.L, "w": args.w, "schedule": args.schedule,
             "boundary": args.boundary}
    if seed is not None:
        extra["seed"] = seed
    _emit(args, _manifest(args, extra),
          ["dd,channel,L,w,h_bp_coupled,probes,runtime_s",
           f"\"({dd.l},{dd.r})\",{args.channel},{args.L},{args.w},"
           f"{h:.6f},{det['probes']},{dt:.2f}"])


def cmd_coupled_gexit(args):
    dd = _parse_dd(args.dd)
    fam = make_family(args.channel, _grid(args))
    cfg = _cfg(args)
    p = CoupledParams(dd, args.L, args.w)
    lo, hi = args.h_min, args.h_max
    if not (0.0 < lo < hi < 1.0):
        raise _CliError("need 0 < --h-min < --h-max < 1")
    hs = [lo + (hi - lo) * i / (args.points - 1) for i in range(args.points)]
    points, skipped = coupled_gexit_curve(p, fam, hs, cfg)
    rows = ["h_channel,h_fp_avg,gexit"]
    rows += [f"{q.channel_entropy:.6f},{q.fp_entropy:.6f},{q.gexit:.6f}"
             for q in points]
    extra = {"L": args.L, "w": args.w, "points": args.points,
             "skipped_targets": len(skipped)}
    _emit(args, _manifest(args, extra), rows)


def cmd_design_rate(args):
    dd = _parse_dd(args.dd)
    try:
        p = CoupledParams(dd, args.L, args.w)
        rate = design_rate(p)
    except ValueError as e:
        raise _CliError(str(e))
    _emit(args, _manifest(args, {"L": args.L, "w": args.w}),
          ["dd,L,w,design_rate",
           f"\"({dd.l},{dd.r})\",{args.L},{args.w},{rate:.9f}"])


def cmd_bounds(args):
    dd = _parse_dd(args.dd)
    cc = continuity_constants(dd)
    ub = universal_continuity_bound(dd)
    interval, reason = negativity_interval(dd)
    adm = admissibility_report(dd, args.w)
    lo_a, hi_a = area_threshold_bounds(dd)
    rows = ["quantity,value"]
    rows += [
        f"x_tilde,{cc.x_tilde:.6f}",
        f"batta_tilde,{cc.batta_tilde:.6f}",
        f"h_tilde_bec,{cc.h_tilde_bec:.6f}",
        f"h_tilde_bsc,{cc.h_tilde_bsc:.6f}",
        f"x_bar,{ub.x_bar:.6f}",
        f"h_bar,{ub.h_bar:.6f}",
        f"bp_upper_bound,{bp_upper_bound(dd):.6f}",
        f"area_threshold_lower,{lo_a:.6f}",
        f"area_threshold_upper,{hi_a:.6f}",
        f"negativity_interval,"
        + (f"\"[{interval[0]:.6f},{interval[1]:.6f}]\"" if interval
           else f"\"empty ({reason})\""),
        f"f_bound,{f_bound(dd.l, dd.r, args.w):.6f}",
        f"map_upper_gap,{map_upper_gap(dd, args.w, args.L):.6f}",
    ]
    rows += [f"admissible_{k},{adm[k]}" for k in
             ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "all")]
    _emit(args, _manifest(args, {"L": args.L, "w": args.w,
                                 "note": adm["notes"]}), rows)


def _dd_list(args, default):
    if args.paper_dds or not args.dds:
        return list(default)
    out = []
    for tok in args.dds.split(";"):
        dd = _parse_dd(tok)
        out.append((dd.l, dd.r))
    return out


def cmd_tables(args):
    if args.table == "bounds":
        dds = _dd_list(args, PAPER_BOUNDS_DDS)
        rows = ["dd,x_tilde,l_over_r,h_tilde_bec,h_tilde_bsc,h_bar"]
        for l, r in dds:
            dd = DegreePair(l, r)
            cc = continuity_constants(dd)
            ub = universal_continuity_bound(dd)
            rows.append(f"\"({l},{r})\",{cc.x_tilde:.4f},{l/r:.4f},"
                        f"{cc.h_tilde_bec:.4f},{cc.h_tilde_bsc:.4f},{ub.h_bar:.4f}")
        _emit(args, _manifest(args, {"table": "bounds"}), rows)
        return
    # area table: density DE per (dd, channel) -- minutes per entry
    dds = _dd_list(args, PAPER_AREA_DDS)
    channels = args.channels.split(",")
    grid = _grid(args)
    cfg = _cfg(args)
    jobs = _jobs(args)

    def one(task):
        (l, r), ch = task
        dd = DegreePair(l, r)
        return f"\"({l},{r})\",{ch},{area_threshold(dd, make_family(ch, grid), cfg):.4f}"

    tasks = [((l, r), ch) for l, r in dds for ch in channels]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            out_rows = list(ex.map(one, tasks))
    else:
        out_rows = [one(t) for t in tasks]
    _emit(args, _manifest(args, {"table": "area"}),
          ["dd,channel,h_area"] + out_rows)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scde",
        description="Density-evolution thresholds, GEXIT curves, and bounds "
                    "for regular and spatially coupled LDPC ensembles")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("threshold", help="BP threshold of an (l,r) ensemble")
    _common_flags(p)
    p.set_defaults(fn=cmd_threshold)

    p = sub.add_parser("area", help="area threshold (MAP surrogate)")
    _common_flags(p)
    p.set_defaults(fn=cmd_area)

    p = sub.add_parser("gexit", help="GEXIT curve via fixed-entropy DE")
    _common_flags(p)
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--x-min", type=float, default=0.05)
    p.add_argument("--x-max", type=float, default=0.95)
    p.set_defaults(fn=cmd_gexit)

    p = sub.add_parser("coupled", help="coupled (l,r,L,w) BP threshold")
    _common_flags(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--schedule", default="parallel")
    p.add_argument("--boundary", default="two-sided")
    p.set_defaults(fn=cmd_coupled)

    p = sub.add_parser("coupled-gexit", help="coupled GEXIT curve")
    _common_flags(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--points", type=int, default=15)
    p.add_argument("--h-min", type=float, default=0.3)
    p.add_argument("--h-max", type=float, default=0.9)
    p.set_defaults(fn=cmd_coupled_gexit)

    p = sub.add_parser("design-rate", help="design rate of (l,r,L,w)")
    _common_flags(p, channel=False)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.set_defaults(fn=cmd_design_rate)

    p = sub.add_parser("bounds", help="closed-form bounds report for (l,r)")
    _common_flags(p, channel=False)
    p.add_argument("--L", type=int, default=100)
    p.add_argument("--w", type=int, default=3)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("tables", help="regenerate the bounds/area tables")
    p.add_argument("--table", choices=["bounds", "area"], default="bounds")
    p.add_argument("--dds", default=None, help='semicolon list, e.g. "3,4;3,6"')
    p.add_argument("--paper-dds", action="store_true")
    p.add_argument("--channels", default="bec,bsc,bawgnc")
    p.add_argument("--grid-bins", type=int, default=4096)
    p.add_argument("--grid-range", type=float, default=30.0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--out", default=None)
    p.add_argument("--dat", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=cmd_tables)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        args.fn(args)
    except _CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (FamilyRangeError, FixedEntropyUndefined) as e:
        print(f"family range error: {e}", file=sys.stderr)
        return EXIT_FAMILY
    except DegreeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
