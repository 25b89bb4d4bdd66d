"""Twisted Ruelle and Selberg zeta functions of closed hyperbolic 3-manifolds,
evaluated from a truncated length spectrum, with torsion ratios for symmetric
powers and volume recovery from their growth."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DivergenceError, FitError, InputError, QuadratureError,
                     SpectrumError, TorzetaError)
from .spectrum import (CappedExponential, GeodesicClass, LengthSpectrum, PoissonLinear, counting_function,
                       dump_spectrum, generate_synthetic, iterate_classes, load_spectrum)
from .algebra import HighestWeight, WeylDatum, adjoint_det, casimir, kostant_residual, weyl_data
from .zeta import (BoundedValue, dlog_selberg_sym, log_ruelle, log_ruelle_rep_chars, log_ruelle_rep_direct,
                   log_ruelle_rep_selberg, log_selberg, log_selberg_sym, ruelle_modulus_negated,
                   ruelle_selberg_residual, selberg_modulus_negated)
from .trace import (HeatEvaluation, gaussian_transform_residual, heat_geometric, identity_term,
                    resolvent_identity_residual)
from .torsion import (TorsionSeries, VolumeFit, fit_volume, remainder_bound, torsion_ratio_even,
                      torsion_ratio_odd, torsion_series)
from .identities import run_suite
