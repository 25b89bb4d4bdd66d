"""Torsion ratios for symmetric powers and volume recovery.

For the family ``tau_M = Sym^M`` the torsion relative to a fixed base
(``tau_4`` for even ``M = 2m``, ``tau_3`` for odd ``M = 2m + 1``) is

    -log(T(tau_2m)   / T(tau_4)) = (vol/pi)(m(m+1) - 6) - sum_{k=3}^{m} log|R(k,     sigma_2k)|
    -log(T(tau_2m+1) / T(tau_3)) = (vol/pi)(m(m+2) - 3) - sum_{k=2}^{m} log|R(k+1/2, sigma_2k+1)|

where the volume polynomial comes from the functional equation of the twisted
Ruelle function and the remainders converge absolutely. The base torsions
themselves need zeta values inside the critical strip and are not computed.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConvergenceError, FitError, InputError
from .zeta import log_ruelle, required_cutoff

PARITIES = ("even", "odd")
BASE_INDEX = {"even": 4, "odd": 3}
FIRST_K = {"even": 3, "odd": 2}


@dataclass(frozen=True)
class TorsionRow:
    m: int
    M: int
    remainder: float
    cumulative: float
    tail_bound: float


@dataclass(frozen=True)
class TorsionSeries:
    parity: str
    base_index: int
    vol: float
    rows: Tuple[TorsionRow, ...]

    def polynomial(self, m):
        return volume_polynomial(self.parity, self.vol, m)


def _check_parity(parity):
    if parity not in PARITIES:
        raise InputError(f"parity must be 'even' or 'odd', got {parity!r}")


def _poly_int(parity, m):
    return m * (m + 1) - 6 if parity == "even" else m * (m + 2) - 3


def volume_polynomial(parity, vol, m):
    """Exact rational value of the volume part, built from the double vol/pi."""
    return Fraction(vol / math.pi) * _poly_int(parity, m)


def remainder_argument(parity, k):
    """(character index, real argument) of the k-th remainder factor."""
    if parity == "even":
        return 2 * k, float(k)
    return 2 * k + 1, k + 0.5


def remainder_term(spec, parity, k, **kw):
    """log |R(s_k, sigma_{q_k})| with its tail bound."""
    q, s = remainder_argument(parity, k)
    bv = log_ruelle(spec, q, s, **kw)
    return bv.value.real, bv.tail_bound


def torsion_series(spec, vol, parity, m_max, *, max_tail=None, **kw) -> TorsionSeries:
    """Rows for m = first..m_max of the chosen family.

    Cumulative values are the correctly rounded exact sum of the volume
    polynomial and the negated remainders, so consecutive rows satisfy the
    bookkeeping identity exactly before the final rounding. ``max_tail``
    turns an oversized truncation bound into a :class:`ConvergenceError`
    naming the cutoff that would meet it.
    """
    _check_parity(parity)
    if vol is None:
        vol = spec.volume
    if vol is None:
        raise InputError("torsion ratios require a volume")
    first = FIRST_K[parity]
    if m_max < first:
        raise InputError(f"{parity} family starts at m={first}, got m_max={m_max}")
    rows = []
    acc = Fraction(0)
    tails = 0.0
    for m in range(first, m_max + 1):
        r, tail = remainder_term(spec, parity, m, **kw)
        if max_tail is not None and tail > max_tail:
            q, s = remainder_argument(parity, m)
            need = required_cutoff(spec, s, max_tail, abscissa=kw.get("abscissa"))
            raise ConvergenceError(
                f"tail bound {tail:.3g} at k={m} (s={s}) exceeds {max_tail:.3g}; "
                f"cutoff R >= {need:.4g} required", required_cutoff=need)
        acc += Fraction(r)
        tails += tail
        cum = float(volume_polynomial(parity, vol, m) - acc)
        M = 2 * m if parity == "even" else 2 * m + 1
        rows.append(TorsionRow(m, M, r, cum, tails))
    return TorsionSeries(parity, BASE_INDEX[parity], float(vol), tuple(rows))


def torsion_ratio_even(spec, vol, m, **kw) -> TorsionRow:
    if m < 3:
        raise InputError(f"even family needs m >= 3, got {m}")
    return torsion_series(spec, vol, "even", m, **kw).rows[-1]


def torsion_ratio_odd(spec, vol, m, **kw) -> TorsionRow:
    if m < 2:
        raise InputError(f"odd family needs m >= 2, got {m}")
    return torsion_series(spec, vol, "odd", m, **kw).rows[-1]


@dataclass(frozen=True)
class RemainderBound:
    sum_abs: float
    bound: float
    passed: bool
    allowance: float
    constant: float


def remainder_bound(spec, m_max, parity="even", **kw) -> RemainderBound:
    """Check sum |log|R(...)|| <= (1 - e^{-delta})^{-1} |log R(s_first, sigma_0)|.

    ``s_first`` is 3 for the even family and 5/2 for the odd one. The
    allowance adds the truncation bounds of every evaluated series.
    """
    _check_parity(parity)
    if not len(spec):
        return RemainderBound(0.0, 0.0, True, 0.0, 0.0)
    first = FIRST_K[parity]
    c1 = 1.0 / -math.expm1(-spec.systole)
    parts, tails = [], []
    for k in range(first, m_max + 1):
        r, t = remainder_term(spec, parity, k, **kw)
        parts.append(abs(r))
        tails.append(t)
    base = log_ruelle(spec, 0, remainder_argument(parity, first)[1], **kw)
    bound = c1 * abs(base.value.real)
    allowance = math.fsum(tails) + c1 * base.tail_bound
    total = math.fsum(parts)
    return RemainderBound(total, bound, total <= bound + allowance, allowance, c1)


@dataclass(frozen=True)
class VolumeFit:
    slope: float
    linear: float
    intercept: float
    recovered_volume: float
    injected_volume: float
    rel_error: float
    max_abs_residual: float
    max_residual_over_M: float
    index_range: Tuple[int, int]
    n_points: int
    slope_m2_only: float
    odd_offset: Optional[float] = None
    points: List[Tuple[int, float]] = field(default_factory=list, repr=False, compare=False)

    def as_record(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "linear": self.linear,
            "recovered_volume": self.recovered_volume,
            "injected_volume": self.injected_volume,
            "rel_error": self.rel_error,
            "M_range": list(self.index_range),
            "n_points": self.n_points,
            "max_abs_residual": self.max_abs_residual,
            "max_residual_over_M": self.max_residual_over_M,
            "slope_m2_only": self.slope_m2_only,
            "recovered_volume_m2_only": 4 * math.pi * self.slope_m2_only,
        }


def torsion_points(spec, vol, M_min, M_max, parity_mix="both", **kw):
    """[(M, parity, -log torsion ratio)] for symmetric-power indices M in [M_min, M_max]."""
    if parity_mix not in ("even", "odd", "both"):
        raise InputError(f"parity must be even, odd or both, got {parity_mix!r}")
    fams = PARITIES if parity_mix == "both" else (parity_mix,)
    pts = []
    for par in fams:
        m_hi = M_max // 2 if par == "even" else (M_max - 1) // 2
        if m_hi < FIRST_K[par]:
            continue
        series = torsion_series(spec, vol, par, m_hi, **kw)
        pts += [(row.M, par, row.cumulative) for row in series.rows if M_min <= row.M <= M_max]
    pts.sort()
    return pts


def fit_volume(spec, vol_injected, M_min, M_max, parity_mix="both", **kw) -> VolumeFit:
    """Least-squares volume recovery from the M^2 coefficient.

    Design columns are M^2, M and one intercept per parity present (the two
    families are normalised by different, unknown base torsions). The
    recovered volume is ``4 pi`` times the M^2 coefficient. The slope of a
    fit against M^2 alone is reported as a diagnostic; it absorbs the O(M)
    term and is biased at small M.
    """
    if vol_injected is None:
        vol_injected = spec.volume
    if vol_injected is None:
        raise InputError("volume fit requires an injected volume")
    pts = torsion_points(spec, vol_injected, M_min, M_max, parity_mix, **kw)
    if len(pts) < 8:
        raise FitError(f"M range [{M_min}, {M_max}] gives {len(pts)} indices; need at least 8")
    M = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[2] for p in pts], dtype=float)
    odd = np.array([p[1] == "odd" for p in pts], dtype=float)
    cols = [M ** 2, M]
    has_both = 0 < odd.sum() < len(pts)
    cols += [1.0 - odd, odd] if has_both else [np.ones_like(M)]
    X = np.column_stack(cols)
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise FitError("degenerate design matrix; widen the M range")
    resid = y - X @ coef
    X2 = np.column_stack([M ** 2, np.ones_like(M)])
    coef2 = np.linalg.lstsq(X2, y, rcond=None)[0]
    slope = float(coef[0])
    recovered = 4 * math.pi * slope
    rel = abs(recovered - vol_injected) / vol_injected if vol_injected else float("nan")
    return VolumeFit(
        slope=slope,
        linear=float(coef[1]),
        intercept=float(coef[2]),
        recovered_volume=recovered,
        injected_volume=float(vol_injected),
        rel_error=rel,
        max_abs_residual=float(np.abs(resid).max()),
        max_residual_over_M=float((np.abs(resid) / M).max()),
        index_range=(int(M.min()), int(M.max())),
        n_points=len(pts),
        slope_m2_only=float(coef2[0]),
        odd_offset=float(coef[3] - coef[2]) if has_both else None,
        points=[(int(p[0]), float(p[2])) for p in pts],
    )
