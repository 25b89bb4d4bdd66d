"""Twisted Ruelle and Selberg zeta functions as Dirichlet series.

Every evaluator works at the level of logarithms:

    log R(s, sigma_k) = - sum_gamma  w * e^{i k theta} / n          * e^{-s l}
    log Z(s, sigma_k) = - sum_gamma  w * e^{i k theta} e^{-l} / (det * n) * e^{-s l}

where ``gamma`` runs over all (primitive, power) classes of the spectrum,
``n`` is the power, ``w`` the multiplicity and ``det = adjoint_det(l, theta)``.
Terms are summed in :func:`~torzeta.spectrum.iterate_classes` order with a
correctly rounded sum, so results do not depend on the thread count.

Tail bounds
-----------
Each term is bounded by ``w * amp(l) / n * exp(-sigma l)``, with ``sigma``
the effective decay rate (``Re s`` for Ruelle, ``Re s + 1`` for Selberg,
``Re s - (m+n)/2`` for a representation) and ``amp`` nonincreasing. Two pieces
are reported:

* primitives beyond the cutoff ``R`` (all their powers), by Stieltjes
  integration against ``counting(x) <= C exp(a x)``:
  ``amp(R) * (sigma C e^{-(sigma-a)R} / (sigma-a) - N(R) e^{-sigma R}) / (1 - e^{-sigma R})``;
* powers of known primitives beyond the summation limit, as a geometric tail.

Powers of known primitives are summed up to ``max(R, log(1e18) / sigma)``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import algebra
from ._numerics import chunked_map, exact_sum
from .algebra import HighestWeight
from .errors import DivergenceError, InputError
from .spectrum import GROWTH_EXPONENT, LengthSpectrum

POWER_EPS = 1e-18
_LOG_POWER_EPS = -math.log(POWER_EPS)


@dataclass(frozen=True)
class BoundedValue:
    value: complex
    tail_bound: float
    abscissa: float

    def __post_init__(self):
        if not (self.tail_bound >= 0 and math.isfinite(self.tail_bound)):
            raise ValueError(f"tail bound must be finite and nonnegative, got {self.tail_bound!r}")


class ZetaKind(NamedTuple):
    """``ruelle``, ``selberg`` or ``selberg-sym`` with ``k``; ``ruelle-rep`` with ``weight``."""

    tag: str
    k: Optional[int] = None
    weight: Optional[HighestWeight] = None

    def evaluate(self, spec, s, **kw):
        if self.tag == "ruelle":
            return log_ruelle(spec, self.k, s, **kw)
        if self.tag == "selberg":
            return log_selberg(spec, self.k, s, **kw)
        if self.tag == "selberg-sym":
            return log_selberg_sym(spec, self.k, s, **kw)
        if self.tag == "ruelle-rep":
            return log_ruelle_rep_direct(spec, self.weight, s, **kw)
        raise InputError(f"unknown zeta kind {self.tag!r}")


def _growth(spec, abscissa):
    """(exponent a, constant C) of the counting bound in force."""
    if abscissa is None:
        return GROWTH_EXPONENT, spec.growth_constant
    a = float(abscissa)
    if a < 0:
        raise InputError(f"abscissa override must be nonnegative, got {a!r}")
    return a, spec.growth_constant_for(a)


def _unknown_tail(spec, sigma, a, C, amp_R):
    R = spec.cutoff
    gap = sigma - a
    stieltjes = sigma * C * math.exp(-gap * R) / gap - spec.total_multiplicity * math.exp(-sigma * R)
    return max(amp_R * stieltjes, 0.0) / -math.expm1(-sigma * R)


def _power_tail(spec, sigma, limit, amp):
    if not len(spec):
        return 0.0
    l0 = spec.lengths
    n1 = spec.max_powers(limit) + 1
    l1 = n1 * l0
    vals = spec.multiplicities * amp(l1) / n1 * np.exp(-sigma * l1) / -np.expm1(-sigma * l0)
    return exact_sum(vals)


def _series(spec, s, coeff, *, decay_offset, amp, shift, abscissa, threads, label, k=None):
    """Shared Dirichlet-series evaluator.

    ``coeff(length, theta)`` is the class coefficient; its modulus is at most
    ``amp(length) * exp(decay_offset * length)``. ``shift`` moves the abscissa
    in ``s`` (the representation case).
    """
    s = complex(s)
    a, C = _growth(spec, abscissa)
    bound = a + shift
    if not s.real > bound:
        raise DivergenceError(
            f"{label}: Re(s)={s.real:.17g} is not right of the abscissa {bound:.17g}"
            + (f" (k={k})" if k is not None else ""), s=s, abscissa=bound, k=k)
    sigma = s.real - decay_offset
    limit = max(spec.cutoff, _LOG_POWER_EPS / sigma)
    table = spec.class_table(limit)

    def block(i, j):
        ln = table.length[i:j]
        return table.weight[i:j] / table.power[i:j] * coeff(ln, table.holonomy[i:j]) * np.exp(-s * ln)

    terms = chunked_map(block, len(table), threads)
    value = -exact_sum(terms) if len(terms) else 0j
    tail = _unknown_tail(spec, sigma, a, C, amp(spec.cutoff)) + _power_tail(spec, sigma, limit, amp)
    return BoundedValue(complex(value), float(tail), float(bound))


def _one(_):
    return 1.0


def _selberg_amp(length):
    return 1.0 / np.expm1(-np.asarray(length, dtype=float)) ** 2


def log_ruelle(spec: LengthSpectrum, k: int, s, *, abscissa=None, threads=None) -> BoundedValue:
    """log R(s, sigma_k)."""
    return _series(spec, s, lambda ln, th: algebra.character(k, th),
                   decay_offset=0.0, amp=_one, shift=0.0, abscissa=abscissa, threads=threads,
                   label="log_ruelle", k=k)


def log_selberg(spec: LengthSpectrum, k: int, s, *, abscissa=None, threads=None) -> BoundedValue:
    """log Z(s, sigma_k)."""
    return _series(spec, s, lambda ln, th: algebra.lefschetz_L(k, ln, th),
                   decay_offset=-1.0, amp=_selberg_amp, shift=0.0, abscissa=abscissa, threads=threads,
                   label="log_selberg", k=k)


def log_selberg_sym(spec, k, s, **kw) -> BoundedValue:
    """log S(s, sigma_k) = log Z(s, sigma_k) + log Z(s, sigma_{-k})."""
    a = log_selberg(spec, k, s, **kw)
    if k == 0:
        return BoundedValue(2 * a.value, 2 * a.tail_bound, a.abscissa)
    b = log_selberg(spec, -k, s, **kw)
    return BoundedValue(a.value + b.value, a.tail_bound + b.tail_bound, a.abscissa)


def dlog_selberg_sym(spec, k, s, *, abscissa=None, threads=None) -> BoundedValue:
    """d/ds log S(s, sigma_k) = sum w * l0 * L_sym(k) * e^{-s l}.

    The factor ``l0 <= l`` is absorbed as ``l e^{-l/2} <= 2/e``, so the tail
    is computed at decay rate ``Re s + 1/2``.
    """
    def coeff(ln, th):
        return algebra.lefschetz_sym(k, ln, th).astype(complex)

    def amp(ln):
        return (4.0 / math.e) * _selberg_amp(ln)

    s = complex(s)
    a, C = _growth(spec, abscissa)
    if not s.real > a:
        raise DivergenceError(f"dlog_selberg_sym: Re(s)={s.real!r} is not right of {a!r}", s=s, abscissa=a, k=k)
    sigma = s.real + 0.5
    limit = max(spec.cutoff, _LOG_POWER_EPS / sigma)
    table = spec.class_table(limit)

    def block(i, j):
        ln = table.length[i:j]
        return table.weight[i:j] * table.primitive_length[i:j] * coeff(ln, table.holonomy[i:j]) * np.exp(-s * ln)

    terms = chunked_map(block, len(table), threads)
    value = exact_sum(terms) if len(terms) else 0j
    tail = _unknown_tail(spec, sigma, a, C, amp(spec.cutoff)) + _power_tail(spec, sigma, limit, amp)
    return BoundedValue(complex(value), float(tail), float(a))


def log_ruelle_rep_direct(spec, w, s, *, abscissa=None, threads=None) -> BoundedValue:
    """log R_tau(s) from the traces tr tau(gamma) (route A)."""
    w = HighestWeight.of(w)
    c2 = (w.m + w.n) / 2.0
    dim = float(w.dim)
    return _series(spec, s, lambda ln, th: algebra.char_tau(w, ln, th),
                   decay_offset=c2, amp=lambda ln: dim, shift=c2, abscissa=abscissa, threads=threads,
                   label=f"log_ruelle_rep{tuple(w)}")


def _combine(parts, abscissa):
    value = complex(math.fsum(c * p.value.real for c, p in parts), math.fsum(c * p.value.imag for c, p in parts))
    tail = math.fsum(p.tail_bound for _, p in parts)
    return BoundedValue(value, tail, abscissa)


def _check_outer(s, bound, a, label):
    s = complex(s)
    if not s.real > bound:
        raise DivergenceError(f"{label}: Re(s)={s.real:.17g} is not right of the abscissa {bound:.17g}",
                              s=s, abscissa=bound)
    return s


def log_ruelle_rep_chars(spec, m, s, *, abscissa=None, threads=None) -> BoundedValue:
    """log R_tau(s) as a sum of shifted twisted Ruelle functions (route B).

    ``m`` is a symmetric-power index or a full highest weight ``(m, n)``.
    """
    w = HighestWeight.of(m)
    a, _ = _growth(spec, abscissa)
    bound = a + (w.m + w.n) / 2.0
    s = _check_outer(s, bound, a, f"log_ruelle_rep_chars{tuple(w)}")
    parts = [(1, log_ruelle(spec, q, s - float(shift), abscissa=abscissa, threads=threads))
             for q, shift in algebra.rep_restriction(w)]
    return _combine(parts, bound)


def log_ruelle_rep_selberg(spec, w, s, *, abscissa=None, threads=None) -> BoundedValue:
    """log R_tau(s) as a signed sum of shifted twisted Selberg functions (route C)."""
    w = HighestWeight.of(w)
    a, _ = _growth(spec, abscissa)
    data = algebra.weyl_data(w)
    bound = a + max(abs(float(d.lam)) for d in data)
    s = _check_outer(s, bound, a, f"log_ruelle_rep_selberg{tuple(w)}")
    parts = [(d.sign, log_selberg(spec, d.q, s - float(d.lam), abscissa=abscissa, threads=threads))
             for d in data]
    return _combine(parts, bound)


def ruelle_selberg_check(spec, k, s, **kw):
    """(residual, tail allowance) of R(s,k) = Z(s+1,k) Z(s-1,k) / (Z(s,k+2) Z(s,k-2)) at log level."""
    s = complex(s)
    a, _ = _growth(spec, kw.get("abscissa"))
    _check_outer(s, a + 1.0, a, "ruelle_selberg_residual")
    lr = log_ruelle(spec, k, s, **kw)
    zs = [(1, log_selberg(spec, k, s + 1, **kw)), (1, log_selberg(spec, k, s - 1, **kw)),
          (-1, log_selberg(spec, k + 2, s, **kw)), (-1, log_selberg(spec, k - 2, s, **kw))]
    rhs = _combine(zs, a + 1.0)
    return abs(lr.value - rhs.value), lr.tail_bound + rhs.tail_bound


def ruelle_selberg_residual(spec, k, s, **kw) -> float:
    return ruelle_selberg_check(spec, k, s, **kw)[0]


# -- functional-equation moduli ---------------------------------------------

def _volume(spec, vol):
    if vol is None:
        vol = spec.volume
    if vol is None:
        raise InputError("functional-equation evaluation requires volume")
    if vol < 0:
        raise InputError(f"volume must be nonnegative, got {vol!r}")
    return float(vol)


def _real_arg(s):
    s = complex(s)
    if s.imag != 0:
        raise InputError(f"modulus relations need real s, got {s!r}")
    return s.real


def _modulus(log_factor, series):
    value = math.exp(log_factor + series.value.real)
    return BoundedValue(complex(value), value * math.expm1(series.tail_bound), series.abscissa)


def ruelle_functional_log_factor(vol, s):
    """log of |R(-s, sigma_k)| / |R(s, sigma_{-k})|, i.e. -4 vol s / pi."""
    return -4.0 * vol * s / math.pi


def selberg_functional_log_factor(vol, k, s):
    """log of |Z(-s, sigma_k)| / |Z(s, sigma_k)|, i.e. 4 pi vol * int_0^s P_k."""
    return 4.0 * math.pi * vol * algebra.plancherel_integral(k, s)


def ruelle_modulus_negated(spec, vol, k, s, **kw) -> BoundedValue:
    """|R(-s, sigma_k)| for real s in the convergence region."""
    vol = _volume(spec, vol)
    s = _real_arg(s)
    return _modulus(ruelle_functional_log_factor(vol, s), log_ruelle(spec, k, s, **kw))


def selberg_modulus_negated(spec, vol, k, s, **kw) -> BoundedValue:
    """|Z(-s, sigma_k)| for real s in the convergence region."""
    vol = _volume(spec, vol)
    s = _real_arg(s)
    return _modulus(selberg_functional_log_factor(vol, k, s), log_selberg(spec, k, s, **kw))


def required_cutoff(spec, s, tol, *, decay_offset=0.0, abscissa=None):
    """Smallest cutoff whose beyond-cutoff tail bound at ``Re s`` is at most ``tol``."""
    a, C = _growth(spec, abscissa)
    sigma = complex(s).real - decay_offset
    gap = sigma - a
    if gap <= 0:
        return math.inf
    if C <= 0:
        return 0.0
    return max(math.log(sigma * C / (gap * tol)) / gap, 0.0)
