"""Geodesic length spectra.

A closed hyperbolic 3-manifold enters every computation only through its
primitive closed geodesics: the length ``l0`` and the holonomy angle ``theta0``
of the rotation about the axis, grouped with a multiplicity. A
:class:`LengthSpectrum` holds these triples up to an explicit completeness
radius ``cutoff``; all downstream tail bounds condition on the spectrum being
complete up to that radius and on the counting bound
``counting(x) <= growth_constant * exp(2 x)``.
"""

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Optional

import numpy as np

from ._numerics import dumps, fmt_float
from .errors import InputError, SpectrumError

TWO_PI = 2.0 * math.pi
ANGLE_SNAP = 1e-12
DEFAULT_GROWTH_CONSTANT = 10.0
GROWTH_EXPONENT = 2.0
CSV_HEADER = ("length", "theta", "multiplicity")


def reduce_angle(theta):
    """Reduce into [0, 2pi); values within ANGLE_SNAP of 2pi snap to 0."""
    r = np.mod(theta, TWO_PI)
    r = np.where(r >= TWO_PI - ANGLE_SNAP, 0.0, r)
    if np.ndim(r) == 0:
        return float(r)
    return r


@dataclass(frozen=True)
class GeodesicClass:
    length: float
    holonomy: float = 0.0
    multiplicity: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise SpectrumError(f"nonpositive length {self.length!r}")
        if not (0.0 <= self.holonomy < TWO_PI):
            raise SpectrumError(f"holonomy {self.holonomy!r} out of range [0, 2pi)")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise SpectrumError(f"multiplicity must be a positive integer, got {self.multiplicity!r}")


class ClassTerm(NamedTuple):
    """One conjugacy class ``gamma0**power`` of a primitive class."""

    length: float
    holonomy: float
    power: int
    weight: float


class ClassTable(NamedTuple):
    """Column form of an :func:`iterate_classes` stream (same order)."""

    length: np.ndarray
    holonomy: np.ndarray
    power: np.ndarray
    weight: np.ndarray
    primitive_length: np.ndarray

    def __len__(self):
        return self.length.shape[0]


@dataclass(frozen=True)
class LengthSpectrum:
    entries: tuple
    cutoff: float
    systole: Optional[float] = None
    growth_constant: float = DEFAULT_GROWTH_CONSTANT
    volume: Optional[float] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not (math.isfinite(self.cutoff) and self.cutoff > 0):
            raise SpectrumError(f"cutoff must be positive, got {self.cutoff!r}")
        if not self.growth_constant > 0:
            raise SpectrumError(f"growth_constant must be positive, got {self.growth_constant!r}")
        if self.volume is not None and not self.volume >= 0:
            raise SpectrumError(f"volume must be nonnegative, got {self.volume!r}")
        prev = None
        for e in entries:
            key = (e.length, e.holonomy)
            if prev is not None and key < prev:
                raise SpectrumError("entries must be sorted ascending by (length, holonomy)")
            prev = key
            if e.length > self.cutoff:
                raise SpectrumError(f"entry length {e.length!r} beyond cutoff {self.cutoff!r}")
        smin = entries[0].length if entries else None
        if self.systole is None:
            object.__setattr__(self, "systole", smin)
        elif smin is None or not math.isclose(self.systole, smin, rel_tol=1e-12, abs_tol=0.0):
            raise SpectrumError(f"declared systole {self.systole!r} disagrees with minimum length {smin!r}")
        else:
            object.__setattr__(self, "systole", smin)
        worst = self.growth_constant_for(GROWTH_EXPONENT)
        if worst > self.growth_constant:
            x = self._growth_argmax(GROWTH_EXPONENT)
            raise SpectrumError(
                f"growth bound violated at x={x:.17g}: counting {self.counting(x)} exceeds "
                f"growth_constant*exp(2x) = {self.growth_constant * math.exp(2 * x):.6g}")

    @classmethod
    def build(cls, entries, cutoff, growth_constant=DEFAULT_GROWTH_CONSTANT, volume=None, systole=None):
        """Sort and validate ``entries`` (GeodesicClass or (length, theta[, mult]) tuples)."""
        classes = [e if isinstance(e, GeodesicClass) else GeodesicClass(*e) for e in entries]
        classes.sort(key=lambda e: (e.length, e.holonomy, e.multiplicity))
        return cls(tuple(classes), float(cutoff), systole, float(growth_constant), volume)

    # -- column views -------------------------------------------------------

    @cached_property
    def lengths(self):
        return np.array([e.length for e in self.entries], dtype=float)

    @cached_property
    def holonomies(self):
        return np.array([e.holonomy for e in self.entries], dtype=float)

    @cached_property
    def multiplicities(self):
        return np.array([e.multiplicity for e in self.entries], dtype=float)

    @cached_property
    def _cumulative(self):
        return np.cumsum(self.multiplicities)

    @property
    def total_multiplicity(self):
        return int(self.multiplicities.sum()) if self.entries else 0

    def __len__(self):
        return len(self.entries)

    def counting(self, x):
        if not self.entries:
            return 0
        i = int(np.searchsorted(self.lengths, x, side="right"))
        return int(self._cumulative[i - 1]) if i else 0

    def growth_constant_for(self, exponent):
        """Smallest C with counting(x) <= C exp(exponent x) on the known range."""
        if not self.entries:
            return 0.0
        return float(np.max(self._cumulative * np.exp(-exponent * self.lengths)))

    def _growth_argmax(self, exponent):
        return float(self.lengths[np.argmax(self._cumulative * np.exp(-exponent * self.lengths))])

    def truncate(self, cutoff):
        """The same manifold data declared complete only up to a smaller radius."""
        if cutoff > self.cutoff:
            raise InputError("cannot extend a spectrum beyond its completeness radius")
        keep = [e for e in self.entries if e.length <= cutoff]
        return LengthSpectrum(tuple(keep), float(cutoff), None, self.growth_constant, self.volume)

    def with_volume(self, volume):
        return LengthSpectrum(self.entries, self.cutoff, self.systole, self.growth_constant, volume)

    # -- conjugacy classes --------------------------------------------------

    def max_powers(self, length_limit):
        """Largest n with n * l0 <= length_limit, per primitive row."""
        lens = self.lengths
        if not len(lens):
            return np.zeros(0, dtype=np.int64)
        n = np.floor(length_limit / lens).astype(np.int64)
        n = np.where((n + 1) * lens <= length_limit, n + 1, n)
        n = np.where(n * lens > length_limit, n - 1, n)
        return np.maximum(n, 0)

    def class_table(self, length_limit):
        """All (primitive, power) classes with n*l0 <= length_limit, sorted.

        The order is ascending (length, power, holonomy); a table for a smaller
        limit is always a prefix of one for a larger limit, so the largest
        table built so far is cached and sliced.
        """
        cached = self._cache.get("table")
        if cached is not None and cached[0] >= length_limit:
            table = cached[1]
            stop = int(np.searchsorted(table.length, length_limit, side="right"))
            return ClassTable(*(col[:stop] for col in table))
        nmax = self.max_powers(length_limit)
        total = int(nmax.sum())
        idx = np.repeat(np.arange(len(nmax)), nmax)
        starts = np.repeat(np.cumsum(nmax) - nmax, nmax)
        power = (np.arange(total) - starts + 1).astype(np.int64)
        l0 = self.lengths[idx]
        length = power * l0
        hol = reduce_angle(power * self.holonomies[idx]) if total else np.zeros(0)
        weight = self.multiplicities[idx]
        order = np.lexsort((hol, power, length))
        table = ClassTable(length[order], np.asarray(hol)[order], power[order], weight[order], l0[order])
        self._cache["table"] = (length_limit, table)
        return table


def iterate_classes(spec: LengthSpectrum, length_limit: float) -> Iterator[ClassTerm]:
    """Yield every conjugacy class of length <= ``length_limit`` in summation order."""
    t = spec.class_table(length_limit)
    for i in range(len(t)):
        yield ClassTerm(float(t.length[i]), float(t.holonomy[i]), int(t.power[i]), float(t.weight[i]))


def counting_function(spec: LengthSpectrum, x: float) -> int:
    if x > spec.cutoff:
        raise InputError(f"x={x!r} is beyond completeness radius {spec.cutoff!r}")
    if x < 0:
        raise InputError(f"x={x!r} must be nonnegative")
    return spec.counting(x)


# -- I/O ---------------------------------------------------------------------

def _parse_float(raw, what, line):
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise SpectrumError(f"cannot parse {what} {raw!r}", line) from None
    if not math.isfinite(v):
        raise SpectrumError(f"non-finite {what} {raw!r}", line)
    return v


def _make_class(length, theta, mult, line):
    if length <= 0:
        raise SpectrumError("nonpositive length", line)
    if not 0.0 <= theta < TWO_PI:
        raise SpectrumError(f"holonomy {theta!r} out of range [0, 2pi)", line)
    if mult != int(mult) or mult < 1:
        raise SpectrumError(f"multiplicity {mult!r} is not a positive integer", line)
    return GeodesicClass(length, theta, int(mult))


def _check_cutoff(classes, cutoff, where):
    for e, line in zip(classes, where):
        if e.length > cutoff:
            raise SpectrumError(f"entry length {e.length!r} beyond cutoff {cutoff!r}", line)


def _read_csv(text, cutoff, growth_constant, volume):
    if cutoff is None:
        raise SpectrumError("CSV input needs an explicit cutoff (completeness radius)")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SpectrumError("empty CSV (missing header)", 1) from None
    header = tuple(h.strip() for h in header)
    if header not in (CSV_HEADER, CSV_HEADER[:2]):
        raise SpectrumError(f"bad CSV header {','.join(header)!r}; expected {','.join(CSV_HEADER)!r}", 1)
    classes, lines = [], []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) not in (2, 3) or len(row) > len(header):
            raise SpectrumError(f"expected {len(header)} fields, got {len(row)}", line)
        length = _parse_float(row[0], "length", line)
        theta = _parse_float(row[1], "theta", line)
        mult = _parse_float(row[2], "multiplicity", line) if len(row) == 3 and row[2].strip() else 1
        classes.append(_make_class(length, theta, mult, line))
        lines.append(line)
    _check_cutoff(classes, cutoff, lines)
    return LengthSpectrum.build(classes, cutoff, growth_constant, volume)


def _read_json(text, cutoff, growth_constant, volume):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpectrumError(f"JSON parse error: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or "entries" not in doc:
        raise SpectrumError("JSON manifest must be an object with an 'entries' array")
    cut = doc.get("cutoff", cutoff)
    if cutoff is not None:
        cut = cutoff
    if cut is None:
        raise SpectrumError("JSON manifest is missing 'cutoff'")
    cut = _parse_float(cut, "cutoff", None)
    gc = doc.get("growth_constant", DEFAULT_GROWTH_CONSTANT) if growth_constant is None else growth_constant
    vol = doc.get("volume") if volume is None else volume
    classes = []
    for i, item in enumerate(doc["entries"]):
        where = f"entry {i}"
        if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
            raise SpectrumError(f"{where}: expected [length, theta, multiplicity]")
        length = _parse_float(item[0], "length", None)
        theta = _parse_float(item[1], "theta", None)
        mult = item[2] if len(item) == 3 else 1
        try:
            classes.append(_make_class(length, theta, mult, None))
        except SpectrumError as exc:
            raise SpectrumError(f"{where}: {exc}") from None
        if length > cut:
            raise SpectrumError(f"{where}: length {length!r} beyond cutoff {cut!r}")
    spec = LengthSpectrum.build(classes, cut, gc, vol)
    declared = doc.get("systole")
    if declared is not None and classes and not math.isclose(declared, spec.systole, rel_tol=1e-12):
        raise SpectrumError(f"declared systole {declared!r} disagrees with minimum length {spec.systole!r}")
    return spec


def load_spectrum(source, format=None, *, cutoff=None, growth_constant=None, volume=None):
    """Parse a CSV or JSON manifest from a path, text, bytes or a file object.

    ``format`` defaults to the path suffix, else JSON when the text starts with
    ``{``. CSV files carry no cutoff, so ``cutoff`` is then required.
    """
    path = None
    if isinstance(source, os.PathLike):
        source = os.fspath(source)
    if hasattr(source, "read"):
        data = source.read()
    elif isinstance(source, bytes):
        data = source
    elif isinstance(source, str) and "\n" not in source and not source.lstrip().startswith("{"):
        path = source
        with open(path, "rb") as fh:
            data = fh.read()
    else:
        data = source
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if format is None:
        if path is not None and path.lower().endswith(".csv"):
            format = "csv"
        elif path is not None and path.lower().endswith(".json"):
            format = "json"
        else:
            format = "json" if text.lstrip().startswith("{") else "csv"
    format = format.lower()
    gc = DEFAULT_GROWTH_CONSTANT if growth_constant is None and format == "csv" else growth_constant
    if format == "csv":
        return _read_csv(text, cutoff, gc, volume)
    if format == "json":
        return _read_json(text, cutoff, gc, volume)
    raise InputError(f"unknown spectrum format {format!r}")


def dump_spectrum(spec: LengthSpectrum, format="json") -> str:
    """Bit-stable serialisation (17 significant digits)."""
    if format == "csv":
        lines = [",".join(CSV_HEADER)]
        lines += [f"{fmt_float(e.length)},{fmt_float(e.holonomy)},{e.multiplicity}" for e in spec.entries]
        return "\n".join(lines) + "\n"
    if format != "json":
        raise InputError(f"unknown spectrum format {format!r}")
    doc = {
        "cutoff": float(spec.cutoff),
        "systole": None if spec.systole is None else float(spec.systole),
        "growth_constant": float(spec.growth_constant),
        "volume": None if spec.volume is None else float(spec.volume),
        "entries": [[float(e.length), float(e.holonomy), int(e.multiplicity)] for e in spec.entries],
    }
    if doc["volume"] is None:
        del doc["volume"]
    if doc["systole"] is None:
        del doc["systole"]
    return dumps(doc) + "\n"


# -- synthetic spectra -------------------------------------------------------

@dataclass(frozen=True)
class PoissonLinear:
    """Counting grows linearly: Poisson process with ``rate`` classes per unit length."""

    rate: float

    def expected_count(self, systole, cutoff):
        return 1.0 + self.rate * (cutoff - systole)


@dataclass(frozen=True)
class CappedExponential:
    """Intensity ``c exp(c (x - systole))``; refuses to build more than ``max_count`` classes."""

    c: float
    max_count: int

    def expected_count(self, systole, cutoff):
        return math.exp(self.c * (cutoff - systole))


def parse_density(text):
    """``poisson-linear:RATE`` or ``capped-exp:C,MAX``."""
    name, _, args = text.partition(":")
    try:
        if name == "poisson-linear":
            return PoissonLinear(float(args))
        if name in ("capped-exp", "capped-exponential"):
            c, mx = args.split(",")
            return CappedExponential(float(c), int(float(mx)))
    except ValueError:
        pass
    raise InputError(f"bad density profile {text!r}; expected poisson-linear:RATE or capped-exp:C,MAX")


def generate_synthetic(seed, systole, cutoff, density, volume=None):
    """Deterministic synthetic spectrum with the shortest geodesic exactly at ``systole``.

    Holonomies are i.i.d. uniform on [0, 2pi). The reported growth constant is
    the smallest one certified on [systole, cutoff] (rounded up by 1e-9
    relative), so the counting invariant holds by construction.
    """
    if not 0 < systole < cutoff:
        raise InputError(f"need 0 < systole < cutoff, got systole={systole!r}, cutoff={cutoff!r}")
    rng = np.random.default_rng(seed)
    span = cutoff - systole
    if isinstance(density, PoissonLinear):
        if not density.rate > 0:
            raise InputError("poisson-linear rate must be positive")
        n = int(rng.poisson(density.rate * span))
        extra = systole + span * rng.random(n)
    elif isinstance(density, CappedExponential):
        c = density.c
        if not 0 < c <= GROWTH_EXPONENT:
            raise InputError(f"capped-exp rate c must lie in (0, 2], got {c!r}")
        expected = density.expected_count(systole, cutoff)
        if expected > density.max_count:
            limit = systole + math.log(density.max_count) / c
            raise InputError(
                f"capped-exp profile expects {expected:.4g} classes > max_count {density.max_count}; "
                f"use cutoff <= {limit:.4g}")
        n = int(rng.poisson(expected - 1.0))
        if n + 1 > density.max_count:
            limit = systole + math.log(density.max_count) / c
            raise InputError(f"sampled {n + 1} classes > max_count {density.max_count}; use cutoff <= {limit:.4g}")
        u = rng.random(n)
        extra = systole + np.log1p(u * np.expm1(c * span)) / c
    else:
        raise InputError(f"unknown density profile {density!r}")
    lengths = np.concatenate([[systole], np.clip(extra, systole, cutoff)])
    thetas = reduce_angle(TWO_PI * rng.random(lengths.shape[0]))
    thetas = np.atleast_1d(thetas)
    classes = [GeodesicClass(float(l), float(t), 1) for l, t in zip(lengths, thetas)]
    probe = LengthSpectrum.build(classes, cutoff, growth_constant=1e300)
    cg = probe.growth_constant_for(GROWTH_EXPONENT) * (1 + 1e-9)
    return LengthSpectrum(probe.entries, float(cutoff), None, cg, volume)
