"""anglepack: exact 2D packing of L-shaped pieces.

Solves minimum half-perimeter packings of "angles" (L-shaped pieces made
of two rectangles) with a small finite-domain constraint solver, with or
without piece rotation and mirroring, optionally strengthened by
rectangular or trapezoidal cumulative relaxations.  An independent
exhaustive oracle provides ground truth, and a CLI covers file formats,
rendering and benchmarking.
"""

from .geometry import (
    AnglePiece,
    Layout,
    OrientedPiece,
    Pattern,
    Placement,
    Rect,
    StepProfile,
    ValidationReport,
    cells,
    classify,
    decompose,
    orientations,
    piece_area,
    profiles,
    validate_layout,
)
from .models import Instance, ModelConfig, Outcome, build_model, solve, variable_order
from .oracle import BudgetExceededError, OracleResult, brute_force_optimal

__all__ = [
    "AnglePiece",
    "BudgetExceededError",
    "Instance",
    "Layout",
    "ModelConfig",
    "OracleResult",
    "OrientedPiece",
    "Outcome",
    "Pattern",
    "Placement",
    "Rect",
    "StepProfile",
    "ValidationReport",
    "brute_force_optimal",
    "build_model",
    "cells",
    "classify",
    "decompose",
    "orientations",
    "piece_area",
    "profiles",
    "solve",
    "validate_layout",
    "variable_order",
]

__version__ = "0.1.0"
