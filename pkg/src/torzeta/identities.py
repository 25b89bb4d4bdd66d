"""Identity suites: per-case residuals checked against tolerance plus tails.

Each suite returns a list of :class:`CaseResult`. A case passes when
``residual <= allowance + tol``, where ``allowance`` collects the rigorous
truncation bounds of the quantities compared (zero for exact identities).
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import algebra, trace
from .zeta import (log_ruelle_rep_chars, log_ruelle_rep_direct, log_ruelle_rep_selberg,
                   ruelle_selberg_check)
from .errors import InputError

SUITES = ("ruelle-selberg", "decomposition", "kostant", "trace")

RS_KS = tuple(range(-4, 5))
RS_S = (3.5, 4.0, 4 + 2j)
SYM_MAX = 6
REP_MAX = 3
KOSTANT_MAX = 8
KOSTANT_LENGTH = (0.1, 10.0)
CASIMIR_MAX = 50
GAUSS_S = (0.5, 1.0, 2.0, 3.0, 10.0)
GAUSS_L = (0.5, 1.0, 2.0, 5.0)
RESOLVENT_KS = (0, 2, 5)


@dataclass(frozen=True)
class CaseResult:
    suite: str
    case: str
    residual: float
    allowance: float
    tol: float

    @property
    def passed(self):
        return bool(self.residual <= self.allowance + self.tol)

    def as_record(self):
        rec = asdict(self)
        rec["pass"] = self.passed
        return rec


def _s_label(s):
    s = complex(s)
    return f"{s.real:g}" if s.imag == 0 else f"{s.real:g}{s.imag:+g}i"


def ruelle_selberg_suite(spec, tol, *, ks=RS_KS, s_values=RS_S, **kw):
    out = []
    for k in ks:
        for s in s_values:
            r, tail = ruelle_selberg_check(spec, k, s, **kw)
            out.append(CaseResult("ruelle-selberg", f"k={k} s={_s_label(s)}", r, tail, tol))
    return out


def decomposition_weights(sym_max=SYM_MAX, rep_max=REP_MAX):
    ws = [(m, 0) for m in range(sym_max + 1)]
    ws += [(m, n) for m in range(rep_max + 1) for n in range(1, rep_max + 1)]
    return ws


def route_values(spec, w, s, **kw):
    """Routes A (traces), B (character shifts) and C (Selberg factors)."""
    return (log_ruelle_rep_direct(spec, w, s, **kw),
            log_ruelle_rep_chars(spec, w, s, **kw),
            log_ruelle_rep_selberg(spec, w, s, **kw))


def decomposition_suite(spec, tol, *, weights=None, margin=1.5, imag_parts=(0.0, 1.0), **kw):
    """Three-route agreement at ``Re s = a + (m+n)/2 + margin``.

    ``a`` is the abscissa in force (2 unless overridden).
    """
    a = 2.0 if kw.get("abscissa") is None else float(kw["abscissa"])
    out = []
    for w in weights or decomposition_weights():
        w = algebra.HighestWeight.of(w)
        for im in imag_parts:
            s = complex(a + (w.m + w.n) / 2.0 + margin, im)
            A, B, C = route_values(spec, w, s, **kw)
            r = max(abs(A.value - B.value), abs(A.value - C.value), abs(B.value - C.value))
            tails = A.tail_bound + B.tail_bound + C.tail_bound
            out.append(CaseResult("decomposition", f"w=({w.m},{w.n}) s={_s_label(s)}", r, tails, tol))
    return out


def kostant_samples(n, seed, max_weight=KOSTANT_MAX, length_range=KOSTANT_LENGTH):
    rng = np.random.default_rng(seed)
    m = rng.integers(0, max_weight + 1, size=n)
    k = rng.integers(0, max_weight + 1, size=n)
    ln = rng.uniform(*length_range, size=n)
    th = rng.uniform(0.0, 2 * math.pi, size=n)
    return [(int(a), int(b), float(c), float(d)) for a, b, c, d in zip(m, k, ln, th)]


def casimir_mismatches(max_weight=CASIMIR_MAX):
    """(m, n, q, lam) data violating lam^2 + c(sigma_q) = casimir(m, n); empty when exact."""
    bad = []
    for m in range(max_weight + 1):
        for n in range(max_weight + 1):
            target = algebra.casimir((m, n))
            for d in algebra.weyl_data((m, n)):
                if d.lam * d.lam + algebra.c_const(d.q) != target:
                    bad.append((m, n, d.q, d.lam))
    return bad


def kostant_suite(spec, tol, *, samples=1000, seed=0, **kw):
    """Relative Kostant residuals on random samples, then the exact Casimir check.

    The spectrum is not used; the suite takes it for a uniform signature.
    """
    out = []
    for m, n, ln, th in kostant_samples(samples, seed):
        r = algebra.kostant_residual((m, n), ln, th, relative=True)
        out.append(CaseResult("kostant", f"w=({m},{n}) l={ln:.17g} theta={th:.17g}", r, 0.0, tol))
    bad = casimir_mismatches()
    out.append(CaseResult("kostant", f"casimir (m,n)<=({CASIMIR_MAX},{CASIMIR_MAX})",
                          float(len(bad)), 0.0, 0.0))
    return out


def trace_suite(spec, tol, *, vol=None, s=3.0, s0=4.0, ks=RESOLVENT_KS, **kw):
    out = []
    for sv in GAUSS_S:
        for ln in GAUSS_L:
            r = trace.gaussian_transform_residual(ln, sv)
            out.append(CaseResult("trace", f"gaussian l={ln:g} s={sv:g}", r, 0.0, tol))
    for k in ks:
        r = trace.resolvent_identity_residual(spec, k, s, s0)
        out.append(CaseResult("trace", f"resolvent k={k} s={s:g} s0={s0:g}", r, 0.0, tol))
    v = 1.0 if vol is None else vol
    for k in range(7):
        for t in (0.1, 1.0, 10.0):
            closed = trace.identity_term(k, t, v)
            r = abs(closed - trace.identity_term_quadrature(k, t, v))
            out.append(CaseResult("trace", f"identity k={k} t={t:g}", r, 0.0, tol * max(1.0, abs(closed))))
    return out


_RUNNERS = {
    "ruelle-selberg": ruelle_selberg_suite,
    "decomposition": decomposition_suite,
    "kostant": kostant_suite,
    "trace": trace_suite,
}


def run_suite(name, spec, tol, *, samples=1000, seed=0, vol=None, abscissa=None, threads=None):
    """Run one suite or ``all``; returns the combined case list."""
    if name == "all":
        names = SUITES
    elif name in _RUNNERS:
        names = (name,)
    else:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    if not tol >= 0:
        raise InputError(f"tolerance must be nonnegative, got {tol!r}")
    zkw = {"abscissa": abscissa, "threads": threads}
    out = []
    for nm in names:
        if nm == "kostant":
            out += kostant_suite(spec, tol, samples=samples, seed=seed)
        elif nm == "trace":
            out += trace_suite(spec, tol, vol=vol if vol is not None else spec.volume)
        else:
            out += _RUNNERS[nm](spec, tol, **zkw)
    return out


def summarize(results):
    failed = [r for r in results if not r.passed]
    worst = max((r.residual - r.allowance for r in results), default=0.0)
    return {"cases": len(results), "failed": len(failed), "worst_excess": worst}


__all__ = ["CaseResult", "SUITES", "run_suite", "summarize", "route_values", "casimir_mismatches",
           "kostant_samples"]
