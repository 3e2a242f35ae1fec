"""Trace coordinates on the SL(4,C) and SU(3,1) character varieties of the free group of rank two."""

from .classify import (
    Case,
    IsometryType,
    Verdict,
    classify_isometry,
    classify_pair,
    irreducibility,
    reduced_invariants,
)
from .coordinates import (
    CATALOGS,
    SL4_DJOKOVIC_30,
    SL4_PARAMETERS_15,
    SL4_SYMMETRIC_30,
    SU31_22,
    RealCoordinateVector,
    TraceVector,
    compute,
    jacobian_rank,
    real_coords,
)
from .errors import CharVarError, DomainError, InputError
from .matrices import Flavor, GroupElement, H, is_su31, random_loxodromic, random_sl4, random_su31
from .reconstruct import FitConfig, conjugacy_test, find_conjugator, fit_pair, reduced_conjugacy_test
from .words import Word, evaluate

__version__ = "0.1.0"
