"""
Command-line front end.

Every subcommand writes one JSON report (stdout or ``--output``) that embeds
the tool version, the full configuration, the seed and sha256 hashes of the
input files.  The series-producing subcommands can also write CSV.

Exit codes: 0 success, 1 invalid input, 2 a verification failed.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from importlib import resources

from . import __version__
from .errors import ResonanceError, ValidationError, VerificationFailure

TOOL = "pa-resonances"
SCHEMA = "pa-resonances/report/v1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


# inputs --------------------------------------------------------------------------

def resolve(path):
    """A path as given, else the bundled data file of that name."""
    if os.path.exists(path):
        return path
    bundled = resources.files("pa_resonances") / "data" / os.path.basename(path)
    if bundled.is_file():
        return str(bundled)
    raise ValidationError(f"no such file: {path}")


def sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class Inputs:
    """Loaded origami/automorphism plus the hashes of every file read."""

    def __init__(self):
        self.hashes = {}

    def read(self, path):
        real = resolve(path)
        self.hashes[os.path.basename(real)] = sha256(real)
        with open(real) as fh:
            return real, fh.read()

    def origami(self, args):
        from .surface import parse_origami

        if args.fixture:
            return self._fixture(args)[0]
        if not args.origami:
            raise ValidationError("give --origami or --fixture")
        return parse_origami(self.read(args.origami)[1])

    def automorphism(self, args):
        from .automorphism import parse_matrix, search_automorphism, synthesize
        from .surface import parse_origami

        if args.fixture:
            o, a, anchor = self._fixture(args)
        else:
            if not (args.origami and args.matrix):
                raise ValidationError("give --fixture, or --origami with --matrix")
            o = parse_origami(self.read(args.origami)[1])
            a = parse_matrix(args.matrix)
            anchor = None if args.anchor is None else args.anchor - 1
        return synthesize(o, a, anchor) if anchor is not None else search_automorphism(o, a)

    def _fixture(self, args):
        from .automorphism import parse_fixture

        real, text = self.read(args.fixture)
        base = os.path.dirname(real)
        o, a, anchor = parse_fixture(text, base)
        for line in text.splitlines():
            key, _, val = line.split("#", 1)[0].partition("=")
            if key.strip().lower() == "origami":
                self.read(os.path.join(base, val.strip()))
        return o, a, anchor


# output --------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return _jsonable(x.item())
    return x


def render(report):
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# subcommands ---------------------------------------------------------------------

def cmd_info(args, inp):
    from .surface import cone_data

    o = inp.origami(args)
    prof = cone_data(o)
    d = prof.to_dict()
    d["n_squares"] = o.n_squares
    d["h"] = [x + 1 for x in o.h]
    d["v"] = [x + 1 for x in o.v]
    return d, True


def cmd_homology(args, inp):
    from .homology import homology_action, poly_to_str, xi_roots

    t = inp.automorphism(args)
    h = homology_action(t)
    d = h.to_dict()
    d["chi_xi_str"] = poly_to_str(h.chi_xi)
    d["lambda"] = t.expansion
    d["anchor"] = t.anchor + 1
    d["xi"] = [{"re": r.real, "im": r.imag, "mult": m, "abs": abs(r)} for r, m in xi_roots(h)]
    d["lefschetz_numbers"] = {str(n): h.lefschetz_number(n) for n in range(1, args.n_max + 1)}
    return d, True


def cmd_spectrum(args, inp):
    from collections import Counter

    from .homology import homology_action, xi_roots
    from .resonances import enumerate_spectrum, extended_additions

    t = inp.automorphism(args)
    h = homology_action(t)
    spec = enumerate_spectrum(xi_roots(h), t.expansion, t.eps_h, t.eps_v, args.cutoff)
    if args.extended:
        from .surface import perm_cycles

        sing = set(t.origami.singular_vertices)
        cycles = [len(c) for c in perm_cycles(t.vertex_image) if c[0] in sing]
        spec = extended_additions(spec, cycles, args.j_max, args.k_h, args.k_v)
    d = spec.to_dict()
    d["multiplicities"] = dict(Counter({f"{e.value.real:.12g}{e.value.imag:+.12g}j": e.multiplicity
                                        for e in spec.entries}))
    return d, True


def cmd_trace_check(args, inp):
    from .fixedpoints import flat_trace
    from .homology import homology_action

    t = inp.automorphism(args)
    h = homology_action(t)
    rows = [flat_trace(t, n, h, method=args.method) for n in range(1, args.n_max + 1)]
    ok = all(r.residual < args.tol for r in rows)
    if args.csv:
        write_csv(args.csv, ["n", "lhs", "rhs_closed", "rhs_truncated", "residual", "fixed_points", "index_sum"],
                  [(r.n, r.lhs, r.rhs_closed, r.rhs_truncated, r.residual, r.fixed_point_count, r.index_sum)
                   for r in rows])
    return {"rows": [r.to_dict() for r in rows], "tolerance": args.tol, "passed": ok}, ok


def cmd_fixed_points(args, inp):
    from .fixedpoints import enumerate_fixed_points, flat_trace_lhs

    t = inp.automorphism(args)
    recs = enumerate_fixed_points(t, args.n, args.method, args.index_method)
    return {"n": args.n, "count": len(recs), "index_sum": sum(r.index for r in recs),
            "flat_trace": flat_trace_lhs(t, recs, args.n), "points": [r.to_dict() for r in recs]}, True


def cmd_correlate(args, inp):
    from .analysis import CorrelationPoint, correlation, decay_exponent, leaf_correlation, random_observable
    from .homology import homology_action, xi_roots

    t = inp.automorphism(args)
    o = t.origami
    f = random_observable(o, args.bumps, args.seed)
    g = random_observable(o, args.bumps, args.seed + 1)
    series = []
    for n in range(0, args.n_max + 1):
        if args.method == "leaf":
            c = leaf_correlation(t, f, g, n, args.grid)
            noise = abs(c - leaf_correlation(t, f, g, n, args.grid // 2))
        else:
            c = correlation(t, f, g, n, args.grid)
            noise = abs(c - correlation(t, f, g, n, args.grid // 2))
        series.append(CorrelationPoint(n, c, noise))
    if args.csv:
        write_csv(args.csv, ["n", "value", "noise"], [(c.n, c.value, c.noise) for c in series])
    xi = xi_roots(homology_action(t))
    predicted = math.log(abs(xi[0][0]) / t.expansion) if xi else None
    d = {"series": [{"n": c.n, "value": c.value, "noise": c.noise} for c in series],
         "predicted_slope": predicted}
    lo, hi = args.window if args.window else (1, args.n_max)
    try:
        fit = decay_exponent(series, (lo, hi))
        d["fit"] = fit.to_dict()
    except ResonanceError as exc:
        d["fit"] = None
        d["fit_error"] = str(exc)
    return d, True


def cmd_birkhoff(args, inp):
    from .analysis import obstruction_exponent, random_observable

    t = inp.automorphism(args)
    o = t.origami
    f = random_observable(o, args.bumps, args.seed, mean_zero=not args.with_mean)
    fit = obstruction_exponent(o, t, f, args.n_max, args.samples, args.seed, n_min=args.n_min)
    if args.csv:
        write_csv(args.csv, ["n_log_lambda", "log_max_abs"], list(zip(fit.abscissae, fit.values)))
    return {"fit": fit.to_dict(), "observable_integral": f.integral()}, True


def cmd_coboundary(args, inp):
    from .analysis import coboundary_report, random_observable
    from .dynamics import stable_direction

    t = inp.automorphism(args)
    o = t.origami
    g = random_observable(o, args.bumps, args.seed, mean_zero=False)
    f = g.derivative(stable_direction(t.matrix))
    ns = tuple(range(args.n_min, args.n_max + 1))
    rep = coboundary_report(o, t, f, ns, args.samples, args.seed, reference=lambda p: -g(p),
                            residual_pairs=args.pairs, residual_n=args.residual_n)
    if args.csv:
        write_csv(args.csv, ["n", "sup_difference"], list(zip(ns[1:], rep.sup_differences)))
    return rep.to_dict(), True


# wiring ---------------------------------------------------------------------------

def _surface_args(p, automorphism=True):
    p.add_argument("--origami", help="origami file (n=, h=, v= lines)")
    p.add_argument("--fixture", help="automorphism fixture (origami=, A=, anchor=)")
    if automorphism:
        p.add_argument("--matrix", help='derivative matrix, row major, e.g. "2 1 1 1"')
        p.add_argument("--anchor", type=int, help="anchor square (1-indexed); searched when omitted")
    p.add_argument("--output", help="write the JSON report here instead of stdout")


def build_parser():
    ap = _Parser(prog=TOOL, description="Resonances of linear pseudo-Anosov maps on origamis.")
    ap.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("info", help="genus, cone angles and Gauss-Bonnet check")
    _surface_args(p, automorphism=False)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("homology", help="action on relative homology and its factors")
    _surface_args(p)
    p.add_argument("--n-max", type=int, default=5)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("spectrum", help="resonances above a cutoff")
    _surface_args(p)
    p.add_argument("--cutoff", type=float, default=1e-3)
    p.add_argument("--extended", action="store_true", help="add the singularity eigenvalues")
    p.add_argument("--j-max", type=int, default=1)
    p.add_argument("--k-h", type=int, help="horizontal regularity bound (unbounded when omitted)")
    p.add_argument("--k-v", type=int, help="vertical regularity bound (unbounded when omitted)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("trace-check", help="fixed-point flat trace against the resonance sum")
    _surface_args(p)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--method", choices=["synthesize", "compose"], default="synthesize")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_trace_check)

    p = sub.add_parser("fixed-points", help="fixed points of T^n with indices")
    _surface_args(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--method", choices=["synthesize", "compose"], default="synthesize")
    p.add_argument("--index-method", choices=["model", "pointwise"], default="model")
    p.set_defaults(func=cmd_fixed_points)

    p = sub.add_parser("correlate", help="correlation series of random mean-zero bumps")
    _surface_args(p)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--grid", type=int, default=256, help="mesh per square (grid) or leaves per bump (leaf)")
    p.add_argument("--method", choices=["grid", "leaf"], default="grid")
    p.add_argument("--bumps", type=int, default=6)
    p.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("birkhoff", help="obstruction exponent of weighted Birkhoff integrals")
    _surface_args(p)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=7)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--bumps", type=int, default=6)
    p.add_argument("--with-mean", action="store_true", help="keep a nonzero integral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_birkhoff)

    p = sub.add_parser("coboundary", help="solve f = L_E F for f the derivative of random bumps")
    _surface_args(p)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--residual-n", type=int)
    p.add_argument("--bumps", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_coboundary)
    return ap


def run(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    inp = Inputs()
    try:
        result, ok = args.func(args, inp)
    except (ValidationError, OSError) as exc:
        sys.stderr.write(f"{TOOL} {args.command}: {exc}\n")
        return 1
    except VerificationFailure as exc:
        sys.stderr.write(f"{TOOL} {args.command}: verification failed: {exc}\n")
        return 2
    report = {
        "schema": SCHEMA,
        "tool": TOOL,
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "seed": getattr(args, "seed", None),
        "inputs": dict(sorted(inp.hashes.items())),
        "result": result,
    }
    text = render(report)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        sys.stderr.write(f"{TOOL} {args.command}: verification failed\n")
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
