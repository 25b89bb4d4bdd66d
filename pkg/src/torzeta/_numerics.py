"""Shared numerical plumbing: deterministic reductions, threading, quadrature, formatting."""

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import integrate

from .errors import InputError, QuadratureError

# Fixed reduction shape. Never derive this from the thread count.
CHUNK = 8192

THREADS_ENV = "TORZETA_THREADS"


def resolve_threads(threads=None):
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(raw)
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise InputError(f"thread count must be >= 1, got {threads}")
    return threads


def chunked_map(fn, n, threads=None):
    """Evaluate ``fn(start, stop)`` over fixed ``CHUNK``-sized slices of ``range(n)``.

    Returns the concatenation in slice order. Because slice boundaries do not
    depend on ``threads``, every element is produced by identical code on
    identical input regardless of how many workers run.
    """
    bounds = [(i, min(i + CHUNK, n)) for i in range(0, n, CHUNK)]
    if not bounds:
        return fn(0, 0)
    threads = resolve_threads(threads)
    if threads == 1 or len(bounds) == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    return np.concatenate(parts)


def exact_sum(values):
    """Correctly rounded sum of a real or complex array (order independent)."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))
    return math.fsum(values.tolist())


def integrate_half_line(f, center, *, rtol=1e-12, upper_peak=None, max_segments=400):
    """Integrate ``f`` over (0, inf) by dyadic segments around ``center``.

    ``center`` should sit at (or below) the leftmost interior peak; segments
    double outward in both directions. Upward doubling continues at least past
    ``4 * upper_peak`` so later peaks are not skipped. Returns ``(value, abserr)``.
    """
    if not center > 0:
        raise InputError("quadrature center must be positive")
    upper_peak = center if upper_peak is None else max(upper_peak, center)

    def piece(a, b, epsabs):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info = integrate.quad(f, a, b, epsabs=epsabs, epsrel=rtol,
                                            limit=200, full_output=1)[:3]
        if err > max(epsabs, rtol * abs(val)) * 10 and err > 1e-300:
            raise QuadratureError(
                f"quadrature did not converge on [{a:.6g}, {b:.6g}]: estimate {val:.6g} +/- {err:.3g}")
        return val, err

    ref, _ = piece(center / 2, 2 * center, 0.0)
    floor = abs(ref) * rtol * 1e-3
    total, toterr = ref, 0.0

    a, b = 2 * center, 4 * center
    quiet = 0
    for _ in range(max_segments):
        val, err = piece(a, b, floor)
        total += val
        toterr += err
        quiet = quiet + 1 if abs(val) <= floor else 0
        if b >= 4 * upper_peak and quiet >= 2:
            break
        a, b = b, 2 * b
    else:
        raise QuadratureError("upper tail did not decay within the segment budget")

    a, b = center / 4, center / 2
    quiet = 0
    for _ in range(max_segments):
        val, err = piece(a, b, floor)
        total += val
        toterr += err
        quiet = quiet + 1 if abs(val) <= floor else 0
        if quiet >= 2:
            break
        a, b = a / 2, a
    else:
        raise QuadratureError("lower tail did not decay within the segment budget")
    val, err = piece(0.0, a, floor)
    return total + val, toterr + err


# -- canonical text output ---------------------------------------------------

def fmt_float(x):
    """17 significant digits; stable across runs and platforms."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "NaN" if math.isnan(x) else ("Infinity" if x > 0 else "-Infinity")
    if x == 0.0:
        return "0" if math.copysign(1.0, x) > 0 else "-0"
    return format(x, ".17g")


def dumps(obj, indent=None, _level=0):
    """Canonical JSON writer with fixed float formatting (key order preserved)."""
    import json

    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
