"""Dynamics of the family f(z) = lam * tan(z**2).

Forward and inverse iteration, the pole/zero lattice and its regions,
classification of the singular orbit, symbolic coding of the Julia set in
the Cantor regime, and rasters of the dynamical and parameter planes.
"""
from .classify import CycleInfo, CycleKind, ParameterClass, Verdict, classify_parameter, detect_cycle, multiplier
from .inverse import composed_inverse, inverse_branch, pre_pole, preimage_chain
from .lattice import pole, quadrant, region_contains, region_of, strip_interval, zero
from .mapcore import INF, Fate, OrbitRecord, Parameter, PoleError, derivative, evaluate, is_infinite, iterate
from .ppm import IoFailure, default_palette, write_ppm
from .scan import ClassifiedGrid, GridSpec, SeedUndetermined, flood_component, scan_dynamical, scan_parameter
from .symbolic import (
    Itinerary,
    SymbolPair,
    cantor_diagnostics,
    distance_kappa,
    itinerary_of,
    point_from_itinerary,
    shift,
)

__version__ = "0.1.0"

__all__ = [
    "INF", "ClassifiedGrid", "CycleInfo", "CycleKind", "Fate", "GridSpec", "IoFailure", "Itinerary",
    "OrbitRecord", "Parameter", "ParameterClass", "PoleError", "SeedUndetermined", "SymbolPair", "Verdict",
    "cantor_diagnostics", "classify_parameter", "composed_inverse", "default_palette", "derivative",
    "detect_cycle", "distance_kappa", "evaluate", "flood_component", "inverse_branch", "is_infinite",
    "itinerary_of", "iterate", "multiplier", "point_from_itinerary", "pole", "pre_pole", "preimage_chain",
    "quadrant", "region_contains", "region_of", "scan_dynamical", "scan_parameter", "shift",
    "strip_interval", "write_ppm", "zero",
]
