"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 numeric
error. Every CSV carries a ``run_id`` column and records the seed in a
header comment.
"""
import argparse
import csv
import datetime
import math
import os
import sys

import numpy as np

from . import bounds as B
from . import validation as V
from .errors import AwtError, NumericError, ValidationError
from .fieldio import read_awtf, write_awtf, write_field_csv, write_pgm
from .geometry import NEAR_CRITICAL_REL, extract_level_set, extract_ridge, near_critical_levels
from .mc import run_id
from .spectral import WhiteBandlimited, load_density_csv, synthesize_paths
from .transform import awt_forward, log_scales
from .wavelets import Klauder, Morse, load_custom_csv

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(AwtError):
    pass


def _kv(text, what):
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        k, sep, v = item.partition("=")
        if not sep:
            raise InputError(f"{what}: expected key=value, got {item!r}")
        params[k.strip()] = v.strip()
    return name.strip().lower(), params


def _floats(params, allowed, what):
    unknown = set(params) - set(allowed)
    if unknown:
        raise InputError(f"{what}: unknown keys {sorted(unknown)}")
    try:
        return {k: float(v) for k, v in params.items()}
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from None


def parse_wavelet(text):
    """``morse:b1=2,b2=1``, ``klauder:alpha=1,beta=0,gamma=1`` or ``custom:file=path``."""
    name, p = _kv(text, "--wavelet")
    if name == "morse":
        v = _floats(p, ("b1", "b2", "a"), "--wavelet morse")
        return Morse(v.get("b1", 2.0), v.get("b2", 1.0), v.get("a", 1.0))
    if name == "klauder":
        v = _floats(p, ("alpha", "beta", "gamma"), "--wavelet klauder")
        return Klauder(v.get("alpha", 1.0), v.get("beta", 0.0), v.get("gamma", 1.0))
    if name == "custom":
        if set(p) != {"file"}:
            raise InputError("--wavelet custom needs exactly file=...")
        return load_custom_csv(p["file"])
    raise InputError(f"--wavelet: unknown family {name!r}")


def parse_spectrum(text, dt):
    """``white:var=1`` (sampled white noise at the signal's ``dt``),
    ``white:cutoff=...,level=...`` or ``density:file=...``."""
    name, p = _kv(text, "--spectrum")
    if name == "white":
        v = _floats(p, ("var", "cutoff", "level"), "--spectrum white")
        if "var" in v:
            if len(v) > 1:
                raise InputError("--spectrum white: var excludes cutoff/level")
            return WhiteBandlimited.for_sampling(v["var"], dt)
        if set(v) != {"cutoff", "level"}:
            raise InputError("--spectrum white needs cutoff and level (or var)")
        return WhiteBandlimited(v["cutoff"], v["level"])
    if name == "density":
        if set(p) != {"file"}:
            raise InputError("--spectrum density needs exactly file=...")
        return load_density_csv(p["file"])
    raise InputError(f"--spectrum: unknown kind {name!r}")


def parse_scales(text):
    """``log:min,max,n`` or ``lin:min,max,n`` in time units."""
    kind, _, rest = text.partition(":")
    parts = rest.split(",")
    if kind not in ("log", "lin") or len(parts) != 3:
        raise InputError("--scales expects log:min,max,n or lin:min,max,n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"--scales: {exc}") from None
    if not (0 < lo < hi) or n < 1:
        raise InputError("--scales needs 0 < min < max and n >= 1")
    return log_scales(lo, hi, n) if kind == "log" else np.linspace(lo, hi, n)


def _float_list(text, what):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers") from None


def read_signal_csv(path):
    """Read ``t,y`` rows with uniform ``t``; returns ``(t0, dt, y)``."""
    t, y = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "y"]:
            raise ValidationError(f"{path}:1: expected header t,y")
        for lineno, row in enumerate(reader, start=2):
            if not row or row[0].startswith("#"):
                continue
            try:
                a, b = (float(v) for v in row)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: expected two numbers") from None
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValidationError(f"{path}:{lineno}: non-finite value")
            t.append(a)
            y.append(b)
    if len(t) < 8:
        raise ValidationError(f"{path}: need at least 8 samples")
    t = np.array(t)
    d = np.diff(t)
    dt = float(np.median(d))
    bad = np.flatnonzero(np.abs(d - dt) > 1e-6 * abs(dt))
    if not dt > 0 or bad.size:
        line = int(bad[0]) + 3 if bad.size else 2
        raise ValidationError(f"{path}:{line}: time column is not uniformly spaced")
    return float(t[0]), float(dt), np.array(y)


class Output:
    """Shared output conventions: directory, header comments, run id."""

    def __init__(self, args, config):
        self.dir = args.out
        os.makedirs(self.dir, exist_ok=True)
        self.run_id = run_id(config)
        self.header = []
        if not args.reproducible:
            self.header.append(f"created={datetime.datetime.now(datetime.timezone.utc).isoformat()}")
        self.header.append(f"seed={args.seed}")
        self.header.append(f"run_id={self.run_id}")
        self.header += [f"{k}={config[k]}" for k in sorted(config) if k != "seed"]

    def path(self, name):
        return os.path.join(self.dir, name)

    def write_csv(self, name, header, rows):
        with open(self.path(name), "w", newline="") as fh:
            for line in self.header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(header) + ["run_id"])
            for row in rows:
                w.writerow([_cell(v) for v in row] + [self.run_id])
        return self.path(name)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _config(args, keys):
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def cmd_scalogram(args):
    spec = parse_wavelet(args.wavelet)
    if args.signal == "zero":
        t0, dt, y = 0.0, 1.0 / args.fs, np.zeros(args.n_t)
    elif args.signal == "chirp":
        t, y = V.chirp(args.fs, args.duration)
        t0, dt = 0.0, 1.0 / args.fs
    else:
        t0, dt, y = read_signal_csv(args.signal)
    if args.noise_var > 0:
        F = parse_spectrum(args.spectrum or f"white:var={args.noise_var}", dt)
        y = y + synthesize_paths(F, y.size, dt, 1, args.seed)[0]
    scales = parse_scales(args.scales) if args.scales else log_scales(2 * dt, y.size * dt / 8, 64)
    W = awt_forward(y, dt, spec, scales, t0=t0, coi=args.coi)
    out = Output(args, _config(args, ("signal", "wavelet", "spectrum", "scales", "seed",
                                      "noise_var", "fs", "n_t", "duration")))
    formats = set(args.format.split(","))
    if not formats <= {"csv", "awtf", "pgm"}:
        raise InputError(f"--format: unknown entries {sorted(formats - {'csv', 'awtf', 'pgm'})}")
    if "awtf" in formats:
        write_awtf(out.path("field.awtf"), W)
    if "csv" in formats:
        write_field_csv(out.path("field.csv"), W, out.header, out.run_id)
    if "pgm" in formats:
        write_pgm(out.path("field.pgm"), np.abs(W.values), db=args.db)
    if args.ridge:
        r = extract_ridge(np.abs(W.values), W.grid)
        out.write_csv("ridge.csv", ("t", "s_f", "boundary_flag"),
                      zip(r.times, r.s_f, r.is_boundary.astype(int)))
    return EXIT_OK


def cmd_contour(args):
    W = read_awtf(args.field)
    mag = np.abs(W.values)
    if args.levels:
        levels = _float_list(args.levels, "--levels")
    else:
        levels = tuple(float(v) for v in np.quantile(mag, _float_list(args.quantiles, "--quantiles")))
    out = Output(args, _config(args, ("field", "levels", "quantiles")))
    near, mins = near_critical_levels(W, levels)
    rows, reg = [], []
    for k, c in enumerate(levels):
        cs = extract_level_set(mag, W.grid, c)
        for pid, poly in enumerate(cs.polylines):
            rows += [(pid, vid, float(t), float(s), k, float(c)) for vid, (t, s) in enumerate(poly)]
        reg.append((k, float(c), len(cs), sum(cs.closed), float(mins[k]), int(near[k])))
    out.write_csv("contours.csv", ("polyline_id", "vertex_id", "t", "s", "level_id", "level"), rows)
    out.write_csv("regularity.csv", ("level_id", "level", "n_polylines", "n_closed",
                                     "min_grad_norm", "near_critical"), reg)
    print(f"near-critical threshold {NEAR_CRITICAL_REL:g} x max gradient; "
          f"{int(near.sum())}/{len(levels)} levels flagged", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args):
    qs = _float_list(args.q, "--q")
    eps = _float_list(args.eps, "--eps")
    kinds = ("magnitude", "phase", "ridge") if args.kind == "all" else (args.kind,)
    reports = []
    for q in qs:
        for e in eps:
            if "magnitude" in kinds:
                reports.append(B.BoundReport("magnitude", e, (q,), B.magnitude_concentration_bound(q, e)))
            if "phase" in kinds and e < math.pi / 2:
                reports.append(B.BoundReport("phase", e, (q,), B.phase_concentration_bound(q, e)))
            if "ridge" in kinds and e <= 1:
                q2 = q if args.q2 is None else args.q2
                reports.append(B.BoundReport("ridge", e, (q, q2), B.ridge_misid_bound(q, q2, e),
                                             delta=args.delta))
    out = Output(args, _config(args, ("kind", "q", "q2", "eps", "delta")))
    out.write_csv("bounds.csv", B.BOUND_CSV_HEADER, _bound_rows(reports))
    return EXIT_OK


def _bound_rows(reports):
    for r in reports:
        q = tuple(r.q_values) + (None,)
        yield (r.kind, float(r.epsilon), r.delta, float(q[0]),
               None if q[1] is None else float(q[1]), float(r.bound), r.empirical, r.n_paths)


def cmd_validate(args):
    kw = {"n_paths": args.paths, "seed": args.seed, "threads": args.threads}
    if args.q is not None:
        if args.kind not in ("pdf-mag", "pdf-phase", "bounds"):
            raise InputError("--q applies to pdf-mag, pdf-phase and bounds")
        kw["qs"] = _float_list(args.q, "--q")
    if args.eps is not None:
        if args.kind != "bounds":
            raise InputError("--eps applies to bounds")
        kw["eps_grid"] = _float_list(args.eps, "--eps")
    if args.reps is not None:
        if args.kind != "independence":
            raise InputError("--reps applies to independence")
        kw["reps"] = args.reps
    kind = args.kind
    if kind == "bounds" and args.bound_kind == "ridge":
        kind = "ridge"
    rep = V.KINDS[kind](**kw)
    out = Output(args, dict(_config(args, ("kind", "bound_kind", "paths", "seed", "q", "eps", "reps"))))
    rows = _bound_rows(rep.rows) if kind in ("bounds", "ridge") else rep.rows
    out.write_csv(f"validate-{kind}.csv", rep.header, rows)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--reproducible", action="store_true",
                        help="omit the timestamp header line")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="awtstat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scalogram", parents=[common], help="transform a signal")
    s.add_argument("--signal", required=True, help="CSV file with t,y columns, 'zero' or 'chirp'")
    s.add_argument("--fs", type=float, default=200.0, help="sampling rate for zero/chirp")
    s.add_argument("--n-t", type=int, default=2000, help="length of the zero signal")
    s.add_argument("--duration", type=float, default=10.0, help="chirp length in seconds")
    s.add_argument("--noise-var", type=float, default=0.0, help="add white noise of this variance")
    s.add_argument("--wavelet", default="morse:b1=2,b2=1")
    s.add_argument("--spectrum", default=None)
    s.add_argument("--scales", default=None)
    s.add_argument("--format", default="awtf,csv", help="comma list of csv, awtf, pgm")
    s.add_argument("--db", action="store_true", help="dB mapping for the PGM")
    s.add_argument("--coi", action="store_true")
    s.add_argument("--ridge", action="store_true", help="also write ridge.csv")
    s.set_defaults(func=cmd_scalogram)

    c = sub.add_parser("contour", parents=[common], help="level sets of a stored field")
    c.add_argument("field", help="AWTF file")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--levels")
    g.add_argument("--quantiles", default="0.5,0.9,0.99")
    c.set_defaults(func=cmd_contour)

    b = sub.add_parser("bounds", parents=[common], help="tabulate the bounds")
    b.add_argument("--kind", choices=("magnitude", "phase", "ridge", "all"), default="all")
    b.add_argument("--q", default="4,16,64")
    b.add_argument("--q2", type=float, default=None, help="competing-scale SNR for ridge")
    b.add_argument("--eps", default=",".join(str(e) for e in V.EPS_GRID))
    b.add_argument("--delta", type=float, default=None)
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("validate", parents=[common], help="Monte Carlo validation")
    v.add_argument("kind", choices=tuple(V.KINDS))
    v.add_argument("--kind", dest="bound_kind", choices=("concentration", "ridge"),
                   default="concentration", help="for 'bounds': which bound to check")
    v.add_argument("--paths", type=int, default=10_000)
    v.add_argument("--q", default=None)
    v.add_argument("--eps", default=None)
    v.add_argument("--reps", type=int, default=None)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (AwtError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
