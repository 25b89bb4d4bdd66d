"""Geometric side of the trace formula for the operators A(sigma_k).

Only what a length spectrum determines is computed: the identity
contribution (a Gaussian integral of the Plancherel density), the hyperbolic
contribution (a Gaussian-weighted sum over closed geodesics) and the
Laplace-transform identities that tie these to the logarithmic derivative of
the symmetrised Selberg zeta function.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import algebra
from ._numerics import exact_sum, integrate_half_line
from .errors import InputError, QuadratureError
from .spectrum import GROWTH_EXPONENT
from .zeta import dlog_selberg_sym

QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class HeatEvaluation:
    t: float
    identity_term: float
    hyperbolic_term: float
    total: float
    truncation_bound: float = 0.0


def identity_term(k, t, vol):
    """2 vol * int_R e^{-t lam^2} P_k(i lam) d lam in closed form."""
    if not t > 0:
        raise InputError(f"t must be positive, got {t!r}")
    return 2.0 * vol * math.sqrt(math.pi / t) * (k * k / 4.0 + 1.0 / (2.0 * t)) / (4.0 * math.pi ** 2)


def identity_term_quadrature(k, t, vol):
    """Same integral by adaptive quadrature on the real line (independent check)."""
    def f(lam):
        return math.exp(-t * lam * lam) * algebra.plancherel(k, 1j * lam).real

    val, err = integrate.quad(f, -np.inf, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * vol * val


def _heat_limit(t, cutoff):
    # powers of known primitives are kept while e^{-l - l^2/4t} >= 1e-18
    budget = math.log(1e18)
    return max(cutoff, 2.0 * t * (math.sqrt(1.0 + budget / t) - 1.0))


def _heat_tail(spec, t, limit):
    """Bound on the omitted part of the hyperbolic sum.

    Unknown primitives: each contributes at most w g(l0) with
    ``g(x) = 2 amp x e^{-x - x^2/4t} / ((4 pi t)^{1/2} (1 - e^{-x}))``
    (all powers included); then ``sum g <= int_R^inf C e^{2x} |g'(x)| dx``.
    Known primitives: geometric bound on powers beyond ``limit``.
    """
    R = spec.cutoff
    C = spec.growth_constant
    amp = 1.0 / math.expm1(-R) ** 2
    norm = 2.0 * amp / math.sqrt(4.0 * math.pi * t)

    def integrand(x):
        dlog = 1.0 / x - 1.0 - x / (2.0 * t) + math.exp(-x) / math.expm1(-x)
        g_growth = norm * x * math.exp((GROWTH_EXPONENT - 1.0) * x - x * x / (4 * t)) / -math.expm1(-x)
        return C * g_growth * abs(dlog)

    # the integrand peaks at exp((a - 1)^2 t); past double range the bound is vacuous
    if (GROWTH_EXPONENT - 1.0) ** 2 * t > 700.0:
        unknown = math.inf
    else:
        peak = max(R, 2.0 * (GROWTH_EXPONENT - 1.0) * t)
        width = 10.0 * math.sqrt(2.0 * t) + 1.0
        cuts = [R, peak, peak + width]
        unknown = sum(integrate.quad(integrand, a, b, limit=200)[0] for a, b in zip(cuts, cuts[1:]) if b > a)
        unknown += integrate.quad(integrand, cuts[-1], np.inf, limit=200)[0]
    known = 0.0
    if len(spec):
        l0 = spec.lengths
        n1 = spec.max_powers(limit) + 1
        l1 = n1 * l0
        first = spec.multiplicities * l0 * 2.0 / np.expm1(-l1) ** 2 * np.exp(-l1 - l1 * l1 / (4 * t))
        known = exact_sum(first / -np.expm1(-l0)) / math.sqrt(4.0 * math.pi * t)
    return unknown + known


def _hyperbolic_coefficients(spec, k, limit):
    """(lengths, w * l0 * L_sym) over all class terms up to ``limit``."""
    tab = spec.class_table(limit)
    lsym = algebra.lefschetz_L(k, tab.length, tab.holonomy) + algebra.lefschetz_L(-k, tab.length, tab.holonomy)
    lsym = np.asarray(lsym)
    if lsym.size:
        scale = np.abs(lsym).max()
        if np.abs(lsym.imag).max() > 1e-14 * max(scale, 1.0):
            raise AssertionError("symmetrised Lefschetz numbers must be real")
    return tab.length, tab.weight * tab.primitive_length * lsym.real


def heat_geometric(spec, k, t, vol) -> HeatEvaluation:
    """Identity plus hyperbolic contribution to the supertrace of e^{-t A(sigma_k)}."""
    ident = identity_term(k, t, vol)
    limit = _heat_limit(t, spec.cutoff)
    lengths, coef = _hyperbolic_coefficients(spec, k, limit)
    hyper = exact_sum(coef * np.exp(-lengths ** 2 / (4 * t))) / math.sqrt(4 * math.pi * t) if len(coef) else 0.0
    return HeatEvaluation(float(t), ident, hyper, ident + hyper, _heat_tail(spec, t, limit))


def gaussian_transform(length, s):
    """int_0^inf e^{-t s^2} e^{-l^2/4t} (4 pi t)^{-1/2} dt by segmented quadrature."""
    if not (s > 0 and length > 0):
        raise InputError("gaussian_transform needs s > 0 and length > 0")

    def f(t):
        if t <= 0:
            return 0.0
        return math.exp(-t * s * s - length * length / (4 * t)) / math.sqrt(4 * math.pi * t)

    # integrand peaks near the saddle t = l / (2 s)
    return integrate_half_line(f, length / (2 * s), rtol=QUAD_RTOL * 1e-2)


def gaussian_transform_residual(length, s) -> float:
    val, _ = gaussian_transform(length, s)
    return abs(val - math.exp(-s * length) / (2 * s))


def resolvent_hyperbolic_quadrature(spec, k, s, s0):
    """int_0^inf (e^{-t s^2} - e^{-t s0^2}) H(t) dt with H the hyperbolic heat term."""
    lo, hi = min(s, s0), max(s, s0)
    limit = max(spec.cutoff, math.log(1e18) / (lo + 1.0))
    lengths, coef = _hyperbolic_coefficients(spec, k, limit)
    if not len(coef):
        return 0.0, 0.0
    l2 = lengths ** 2

    def f(t):
        if t <= 0:
            return 0.0
        heat = float(np.dot(coef, np.exp(-l2 / (4 * t)))) / math.sqrt(4 * math.pi * t)
        return -math.exp(-t * s * s) * math.expm1(-t * (s0 * s0 - s * s)) * heat

    center = lengths[0] / (2 * hi)
    return integrate_half_line(f, center, rtol=QUAD_RTOL * 1e-2, upper_peak=lengths[-1] / (2 * lo))


def resolvent_identity_residual(spec, k, s, s0, **kw) -> float:
    """|quadrature - ((1/2s) S'/S(s) - (1/2s0) S'/S(s0))| on the hyperbolic part.

    Both sides use the same class terms, so the residual measures quadrature
    and rounding error only.
    """
    if not (s > 0 and s0 > 0):
        raise InputError("resolvent identity needs s, s0 > 0")
    quad, _ = resolvent_hyperbolic_quadrature(spec, k, s, s0)
    lo = min(s, s0)
    limit = max(spec.cutoff, math.log(1e18) / (lo + 1.0))
    lengths, coef = _hyperbolic_coefficients(spec, k, limit)
    if not len(coef):
        return abs(quad)
    closed = (exact_sum(coef * np.exp(-s * lengths)) / (2 * s)
              - exact_sum(coef * np.exp(-s0 * lengths)) / (2 * s0))
    return abs(quad - closed)


def resolvent_closed_form(spec, k, s, s0, **kw):
    """(1/2s) S'/S(s) - (1/2s0) S'/S(s0) from the zeta evaluator, with tail bound."""
    a = dlog_selberg_sym(spec, k, s, **kw)
    b = dlog_selberg_sym(spec, k, s0, **kw)
    value = a.value.real / (2 * s) - b.value.real / (2 * s0)
    return value, a.tail_bound / (2 * s) + b.tail_bound / (2 * s0)


__all__ = [
    "HeatEvaluation", "identity_term", "identity_term_quadrature", "heat_geometric",
    "gaussian_transform", "gaussian_transform_residual", "resolvent_hyperbolic_quadrature",
    "resolvent_identity_residual", "resolvent_closed_form", "QuadratureError",
]
