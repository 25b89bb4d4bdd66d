"""Characters of M, adjoint determinants, Lefschetz weights and Weyl data.

Conventions: ``M`` is the circle ``diag(e^{i theta}, e^{-i theta})``, its
characters are ``sigma_k(theta) = e^{i k theta}`` and ``w sigma_k = sigma_{-k}``.
A class ``m_gamma a_gamma`` is described by ``(length, theta)``. Irreducible
representations of SL(2, C) are labelled by highest weights ``(m, n)`` and
realised as ``Sym^m (x) conj(Sym^n)``.

Everything here is double precision except :func:`casimir`, :func:`c_const`
and the Weyl-datum shifts, which are exact rationals.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np


class HighestWeight(NamedTuple):
    m: int
    n: int

    @classmethod
    def of(cls, w):
        if isinstance(w, cls):
            return w
        if isinstance(w, (int, np.integer)):
            w = (int(w), 0)
        m, n = (int(x) for x in w)
        if m < 0 or n < 0:
            raise ValueError(f"highest weight must be nonnegative, got {(m, n)}")
        return cls(m, n)

    @property
    def dim(self):
        return (self.m + 1) * (self.n + 1)

    def theta_twist(self):
        """Highest weight of tau composed with the Cartan involution."""
        return HighestWeight(self.n, self.m)


@dataclass(frozen=True)
class WeylDatum:
    """``sigma_q (x) e^{(lam - 1) alpha}`` with its Euler-characteristic sign."""

    q: int
    lam: Fraction
    sign: int


def character(k, theta):
    """``e^{i k theta}``; vectorises over ``theta``."""
    kt = k * np.asarray(theta, dtype=float)
    out = np.cos(kt) + 1j * np.sin(kt)
    return complex(out) if out.ndim == 0 else out


def adjoint_det(length, theta):
    """det(Id - Ad(m a) restricted to nbar) = 1 - 2 cos(2 theta) e^{-l} + e^{-2l}.

    Evaluated as ``(1 - e^{-l})^2 + 4 e^{-l} sin^2 theta``, which avoids the
    cancellation of the expanded form for short geodesics.
    """
    length = np.asarray(length, dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = np.expm1(-length) ** 2 + 4.0 * np.exp(-length) * np.sin(theta) ** 2
    return float(out) if out.ndim == 0 else out


def lefschetz_L(k, length, theta):
    out = character(k, theta) * np.exp(-np.asarray(length, dtype=float)) / adjoint_det(length, theta)
    return complex(out) if np.ndim(out) == 0 else out


def lefschetz_sym(k, length, theta):
    """Symmetrised Lefschetz number; real, equals L(k) + L(-k)."""
    theta = np.asarray(theta, dtype=float)
    out = 2.0 * np.cos(k * theta) * np.exp(-np.asarray(length, dtype=float)) / adjoint_det(length, theta)
    return float(out) if np.ndim(out) == 0 else out


def plancherel(k, z):
    return (k * k / 4.0 - z * z) / (4.0 * math.pi ** 2)


def plancherel_integral(k, s):
    """Antiderivative of the Plancherel polynomial from 0 to ``s``."""
    return (k * k * s / 4.0 - s ** 3 / 3.0) / (4.0 * math.pi ** 2)


def c_const(k):
    return Fraction(k * k, 4) - 1


def casimir(w):
    m, n = HighestWeight.of(w)
    return Fraction(m * (m + 2) + n * (n + 2), 2)


def weyl_data(w):
    """The four Weyl data of ``tau_{m,n}``.

    Signs are +1 on the two data with ``|lam| = (m+n)/2 + 1``. That is the
    convention under which ``log R_tau(s) = sum sign * log Z(s - lam, sigma_q)``
    reproduces the direct and character-shift evaluations; see the
    decomposition identity suite.
    """
    m, n = HighestWeight.of(w)
    top = Fraction(m + n, 2) + 1
    return (
        WeylDatum(m - n, top, +1),
        WeylDatum(n - m, -top, +1),
        WeylDatum(-(m + n + 2), Fraction(n - m, 2), -1),
        WeylDatum(m + n + 2, Fraction(m - n, 2), -1),
    )


def sym_power_restriction(m):
    """[(m - 2k, m/2 - k) for k = 0..m]: Sym^m restricted to MA."""
    return [(m - 2 * k, Fraction(m, 2) - k) for k in range(m + 1)]


def rep_restriction(w):
    """Characters and shifts of ``tau_{m,n}`` restricted to MA.

    The conjugate factor contributes ``sigma_{-(n - 2j)}`` with the same real
    shift, so the ``(m, 0)`` case is :func:`sym_power_restriction`.
    """
    m, n = HighestWeight.of(w)
    out = []
    for q1, s1 in sym_power_restriction(m):
        for q2, s2 in sym_power_restriction(n):
            out.append((q1 - q2, s1 + s2))
    return out


def _sym_factor(m, length, theta, sign):
    acc = 0j
    for j in range(m + 1):
        acc = acc + np.exp(sign * 1j * (m - 2 * j) * theta + (m / 2.0 - j) * length)
    return acc


def char_tau(w, length, theta):
    """Trace of ``tau_{m,n}(m_gamma a_gamma)`` as a product of the two weight sums."""
    m, n = HighestWeight.of(w)
    length = np.asarray(length, dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = _sym_factor(m, length, theta, +1) * _sym_factor(n, length, theta, -1)
    return complex(out) if np.ndim(out) == 0 else out


def kostant_sides(w, length, theta):
    """Both sides of the Kostant character identity at ``(length, theta)``.

    Left: ``det(Id - Ad_nbar) * tr tau``. Right: the signed sum of
    ``sigma_q(theta) e^{(lam - 1) length}`` over the Weyl data. Also returns
    the sum of moduli of the right-hand terms as a cancellation-free scale.
    """
    lhs = adjoint_det(length, theta) * char_tau(w, length, theta)
    terms = [d.sign * character(d.q, theta) * math.exp((float(d.lam) - 1.0) * length) for d in weyl_data(w)]
    rhs = math.fsum(t.real for t in terms) + 1j * math.fsum(t.imag for t in terms)
    scale = math.fsum(abs(t) for t in terms)
    return lhs, rhs, scale


def kostant_residual(w, length, theta, relative=False):
    """``|LHS - RHS|``; with ``relative=True`` divided by ``1 + |LHS|``."""
    lhs, rhs, _ = kostant_sides(w, length, theta)
    r = abs(lhs - rhs)
    return r / (1.0 + abs(lhs)) if relative else r
