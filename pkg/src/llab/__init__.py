"""Numerical laboratory for the Littlewood conjecture via diagonal flows on
SL(3,R)/SL(3,Z): exact near-solution counts, cusp excursions, escape of mass
and entropy bookkeeping."""
from .counting import count_below, normalized_count, running_min_trace
from .empirical import escape_fraction, observable_average, union_area_bound
from .excursions import (
    all_excursions,
    excursion_for,
    uniqueness_check,
    verify_cover_identity,
    verify_cusp_proposition,
)
from .lattice import LatticeState, apply_flow, systole, tau_lattice
from .realnum import CF, Decimal, InputError, Rational, Surd, littlewood_value, parse_number
from .symbolic import bowen_bound_check, bowen_count, dist, entropy

__version__ = "0.1.0"

__all__ = [
    "CF", "Decimal", "InputError", "LatticeState", "Rational", "Surd",
    "all_excursions", "apply_flow", "bowen_bound_check", "bowen_count", "count_below", "dist",
    "entropy", "escape_fraction", "excursion_for", "littlewood_value", "normalized_count",
    "observable_average", "parse_number", "running_min_trace", "systole", "tau_lattice",
    "union_area_bound", "uniqueness_check", "verify_cover_identity", "verify_cusp_proposition",
]
