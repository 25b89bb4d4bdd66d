"""Command-line front end.

Exit codes: 0 success, 1 invalid input or flags, 2 an identity residual
above tolerance, 3 a point left of the abscissa or a convergence failure.
All numbers go to stdout as JSON or CSV with 17 significant digits; messages
go to stderr.
"""

import argparse
import logging
import os
import re
import sys
from pathlib import Path

from . import __version__
from ._numerics import THREADS_ENV, dumps, fmt_float
from .algebra import HighestWeight
from .errors import ConvergenceError, DivergenceError, InputError, TorzetaError
from .identities import SUITES, run_suite, summarize
from .spectrum import dump_spectrum, generate_synthetic, load_spectrum, parse_density
from .torsion import fit_volume, torsion_series
from .trace import (gaussian_transform_residual, heat_geometric, identity_term_quadrature,
                    resolvent_closed_form, resolvent_identity_residual)
from .zeta import (ZetaKind, log_ruelle_rep_chars, log_ruelle_rep_selberg, ruelle_modulus_negated,
                   selberg_modulus_negated)

log = logging.getLogger("torzeta")

EXIT_OK, EXIT_INPUT, EXIT_RESIDUAL, EXIT_DIVERGENCE = 0, 1, 2, 3

_COMPLEX_RE = re.compile(r"^\s*([+-]?[0-9.]+(?:[eE][+-]?\d+)?)?(?:([+-])([0-9.]*(?:[eE][+-]?\d+)?)i)?\s*$")


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_complex(text):
    """``a``, ``a+bi`` or ``a-bi``."""
    m = _COMPLEX_RE.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}; use a, a+bi or a-bi")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_part = 0.0
    if m.group(2):
        im_part = float(m.group(3) or "1")
        if m.group(2) == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def parse_weight(text):
    try:
        m, n = (int(x) for x in text.split(","))
        return HighestWeight.of((m, n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight {text!r}; expected M,N with nonnegative integers")


def parse_floats(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty number list")
    return vals


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or 1)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    spec_args = argparse.ArgumentParser(add_help=False)
    spec_args.add_argument("--spectrum", required=True, help="spectrum file (.json or .csv)")
    spec_args.add_argument("--cutoff", type=float, help="completeness radius for CSV input")
    spec_args.add_argument("--growth-constant", type=float, help="override C_g")
    spec_args.add_argument("--abscissa", type=float, help="certified growth exponent replacing 2")

    p = _Parser(prog="torzeta", description="Twisted Ruelle/Selberg zeta functions and torsion ratios "
                                            "from a truncated length spectrum.")
    p.add_argument("--version", action="version", version=f"torzeta {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a synthetic spectrum")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--systole", type=float, required=True)
    g.add_argument("--cutoff", type=float, required=True)
    g.add_argument("--density", type=parse_density, required=True,
                   help="poisson-linear:RATE or capped-exp:C,MAX")
    g.add_argument("--volume", type=float)
    g.add_argument("--out", help="output file (default stdout)")

    i = sub.add_parser("info", parents=[common], help="summarise a spectrum")
    i.add_argument("spectrum_file")
    i.add_argument("--cutoff", type=float)
    i.add_argument("--growth-constant", type=float)

    z = sub.add_parser("zeta", parents=[common, spec_args], help="evaluate a zeta function")
    z.add_argument("--kind", choices=("ruelle", "selberg", "selberg-sym", "ruelle-rep"), required=True)
    kw = z.add_mutually_exclusive_group(required=True)
    kw.add_argument("--k", type=int)
    kw.add_argument("--weight", type=parse_weight)
    z.add_argument("--s", type=parse_complex, required=True)
    z.add_argument("--vol", type=float)
    z.add_argument("--negated", action="store_true", help="modulus at -s via the functional equation")
    z.add_argument("--route", choices=("direct", "chars", "selberg"), default="direct",
                   help="evaluation route for ruelle-rep")

    d = sub.add_parser("identities", parents=[common, spec_args], help="run identity suites")
    d.add_argument("--suite", choices=SUITES + ("all",), required=True)
    d.add_argument("--tol", type=float, required=True)
    d.add_argument("--samples", type=_positive_int, default=1000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--vol", type=float)

    t = sub.add_parser("torsion", parents=[common, spec_args], help="torsion-ratio table")
    t.add_argument("--vol", type=float, required=True)
    t.add_argument("--parity", choices=("even", "odd"), required=True)
    t.add_argument("--max-m", type=int, required=True)
    t.add_argument("--max-tail", type=float)
    t.add_argument("--out")

    f = sub.add_parser("fit", parents=[common, spec_args], help="recover the volume from torsion growth")
    f.add_argument("--vol", type=float, required=True)
    f.add_argument("--m-min", type=int, required=True)
    f.add_argument("--m-max", type=int, required=True)
    f.add_argument("--parity", choices=("even", "odd", "both"), default="both")

    c = sub.add_parser("trace-check", parents=[common, spec_args], help="trace-formula residual report")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--grid", type=parse_floats, default=[0.1, 1.0, 10.0], help="heat times t1,t2,...")
    c.add_argument("--s", type=float, default=3.0)
    c.add_argument("--s0", type=float, default=4.0)
    c.add_argument("--vol", type=float)
    c.add_argument("--tol", type=float, default=1e-6)
    return p


# -- helpers -----------------------------------------------------------------

def _load(args, volume=None):
    return load_spectrum(args.spectrum, cutoff=args.cutoff, growth_constant=args.growth_constant,
                         volume=volume)


def _zkw(args):
    return {"abscissa": args.abscissa, "threads": args.threads}


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if v is None:
        return ""
    text = str(v)
    return f'"{text}"' if "," in text else text


def _cplx(z):
    return [float(z.real), float(z.imag)]


# -- commands ----------------------------------------------------------------

def cmd_gen(args, out):
    spec = generate_synthetic(args.seed, args.systole, args.cutoff, args.density, volume=args.volume)
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    text = dump_spectrum(spec, fmt)
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %d classes to %s", len(spec), args.out)
    else:
        out.write(text)
    return EXIT_OK


def cmd_info(args, out):
    spec = load_spectrum(args.spectrum_file, cutoff=args.cutoff, growth_constant=args.growth_constant)
    rec = {
        "classes": len(spec),
        "total_multiplicity": int(spec.total_multiplicity),
        "systole": spec.systole,
        "cutoff": spec.cutoff,
        "growth_constant": spec.growth_constant,
        "certified_growth_constant": spec.growth_constant_for(2.0) if len(spec) else 0.0,
        "volume": spec.volume,
    }
    _emit_record(args, out, rec)
    return EXIT_OK


def _emit_record(args, out, rec):
    if args.format == "csv":
        out.write(_csv(list(rec), [list(rec.values())]))
    else:
        out.write(dumps(rec) + "\n")


def cmd_zeta(args, out):
    spec = _load(args, volume=args.vol)
    kw = _zkw(args)
    if args.kind == "ruelle-rep":
        if args.weight is None:
            args.weight = HighestWeight.of(args.k)
        if args.negated:
            raise InputError("--negated is available for ruelle and selberg only")
        if args.route == "chars":
            bv = log_ruelle_rep_chars(spec, args.weight, args.s, **kw)
        elif args.route == "selberg":
            bv = log_ruelle_rep_selberg(spec, args.weight, args.s, **kw)
        else:
            bv = ZetaKind("ruelle-rep", weight=args.weight).evaluate(spec, args.s, **kw)
        label = {"weight": [args.weight.m, args.weight.n], "route": args.route}
    else:
        if args.k is None:
            raise InputError(f"--kind {args.kind} needs --k")
        if args.negated:
            fn = {"ruelle": ruelle_modulus_negated, "selberg": selberg_modulus_negated}.get(args.kind)
            if fn is None:
                raise InputError("--negated is available for ruelle and selberg only")
            bv = fn(spec, args.vol, args.k, args.s, **kw)
        else:
            bv = ZetaKind(args.kind, k=args.k).evaluate(spec, args.s, **kw)
        label = {"k": args.k}
    rec = {"kind": args.kind + ("-modulus-negated" if args.negated else "")}
    rec.update(label)
    rec.update({"s": _cplx(args.s), "value": _cplx(bv.value), "tail_bound": bv.tail_bound,
                "abscissa": bv.abscissa})
    if args.format == "csv":
        flat = {k: v for k, v in rec.items() if not isinstance(v, list)}
        for key in ("weight", "s", "value"):
            if key in rec:
                a, b = rec[key]
                flat[key + ("_m" if key == "weight" else "_re")] = a
                flat[key + ("_n" if key == "weight" else "_im")] = b
        out.write(_csv(list(flat), [list(flat.values())]))
    else:
        out.write(dumps(rec) + "\n")
    return EXIT_OK


def cmd_identities(args, out):
    spec = _load(args, volume=args.vol)
    results = run_suite(args.suite, spec, args.tol, samples=args.samples, seed=args.seed,
                        vol=args.vol, abscissa=args.abscissa, threads=args.threads)
    summary = summarize(results)
    if args.format == "csv":
        rows = [(r.suite, r.case, r.residual, r.allowance, r.tol, r.passed) for r in results]
        out.write(_csv(("suite", "case", "residual", "allowance", "tol", "pass"), rows))
    else:
        doc = {"suite": args.suite, "tol": args.tol, "summary": summary,
               "cases": [r.as_record() for r in results]}
        out.write(dumps(doc, indent=1) + "\n")
    if summary["failed"]:
        log.error("%d of %d cases above tolerance", summary["failed"], summary["cases"])
        return EXIT_RESIDUAL
    return EXIT_OK


TORSION_HEADER = ("M", "parity", "remainder", "cumulative_minus_base", "tail_bound")


def cmd_torsion(args, out):
    spec = _load(args)
    series = torsion_series(spec, args.vol, args.parity, args.max_m, max_tail=args.max_tail, **_zkw(args))
    rows = [(r.M, series.parity, r.remainder, r.cumulative, r.tail_bound) for r in series.rows]
    if args.format == "json":
        text = dumps([dict(zip(TORSION_HEADER, row)) for row in rows], indent=1) + "\n"
    else:
        text = _csv(TORSION_HEADER, rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_fit(args, out):
    spec = _load(args)
    fit = fit_volume(spec, args.vol, args.m_min, args.m_max, args.parity, **_zkw(args))
    rec = fit.as_record()
    if args.format == "csv":
        rec = dict(rec)
        lo, hi = rec.pop("M_range")
        rec["M_min"], rec["M_max"] = lo, hi
        out.write(_csv(list(rec), [list(rec.values())]))
    else:
        out.write(dumps(rec, indent=1) + "\n")
    return EXIT_OK


def cmd_trace_check(args, out):
    spec = _load(args, volume=args.vol)
    vol = spec.volume if spec.volume is not None else 1.0
    records = []
    for t in args.grid:
        h = heat_geometric(spec, args.k, t, vol)
        quad = identity_term_quadrature(args.k, t, vol)
        records.append({"identity": "identity-term", "t": t, "identity_term": h.identity_term,
                        "hyperbolic_term": h.hyperbolic_term, "total": h.total,
                        "truncation_bound": h.truncation_bound,
                        "residual": abs(h.identity_term - quad)})
    if len(spec):
        for s in (args.s, args.s0):
            records.append({"identity": "gaussian-transform", "length": spec.systole, "s": s,
                            "residual": gaussian_transform_residual(spec.systole, s)})
    closed, closed_tail = resolvent_closed_form(spec, args.k, args.s, args.s0, abscissa=args.abscissa,
                                                threads=args.threads)
    records.append({"identity": "resolvent", "s": args.s, "s0": args.s0, "closed_form": closed,
                    "closed_form_tail": closed_tail,
                    "residual": resolvent_identity_residual(spec, args.k, args.s, args.s0)})
    for r in records:
        r["tol"] = args.tol
        r["pass"] = bool(r["residual"] <= args.tol)
    if args.format == "csv":
        rows = [(r["identity"], r.get("t", r.get("s")), r["residual"], r["tol"], r["pass"]) for r in records]
        out.write(_csv(("identity", "parameter", "residual", "tol", "pass"), rows))
    else:
        out.write(dumps({"k": args.k, "vol": vol, "records": records}, indent=1) + "\n")
    return EXIT_OK if all(r["pass"] for r in records) else EXIT_RESIDUAL


COMMANDS = {
    "gen": cmd_gen,
    "info": cmd_info,
    "zeta": cmd_zeta,
    "identities": cmd_identities,
    "torsion": cmd_torsion,
    "fit": cmd_fit,
    "trace-check": cmd_trace_check,
}


class _TextSink:
    """Accept text or byte streams."""

    def __init__(self, stream):
        self.stream = stream

    def write(self, text):
        try:
            self.stream.write(text)
        except TypeError:
            self.stream.write(text.encode())


def run(argv=None, stdout=None, stderr=None):
    stdout = _TextSink(stdout or sys.stdout)
    stderr = _TextSink(stderr or sys.stderr)
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("torzeta: %(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.propagate = False
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            # --help and --version
            return int(exc.code or 0)
        log.setLevel(logging.INFO if args.verbose else logging.WARNING)
        if args.threads is None and os.environ.get(THREADS_ENV):
            log.info("threads from %s", THREADS_ENV)
        return COMMANDS[args.command](args, stdout)
    except (DivergenceError, ConvergenceError) as exc:
        stderr.write(f"torzeta: error: {exc}\n")
        return EXIT_DIVERGENCE
    except (InputError, OSError, ValueError) as exc:
        stderr.write(f"torzeta: error: {exc}\n")
        return EXIT_INPUT
    except TorzetaError as exc:
        stderr.write(f"torzeta: error: {exc}\n")
        return EXIT_INPUT
    finally:
        log.removeHandler(handler)


def main():
    sys.exit(run(sys.argv[1:]))
