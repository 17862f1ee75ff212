"""Exact higher Futaki invariants of toric Fano manifolds via Bott residues."""

__version__ = "0.1.0"

from .errors import ChowObstructError, ConsistencyError, InputError
from .exact_math import AffineForm, QMatrix, affine_eval, bernoulli_plus, det, solve
from .invariants import (
    InvariantReport,
    chow_weight,
    compactified_intersection,
    donaldson_futaki,
    futaki,
    lift_shift_check,
    obstruction_report,
    verify_bl1,
    verify_theorem_main,
)
from .localization import (
    OnePSSpec,
    compute_a,
    compute_b,
    make_sample_plan,
    residue_sum,
    resolve_lambda,
    tangent_weights,
    todd_eval,
)
from .toric_fan import (
    FanoPolytope,
    check_smooth,
    count_lattice_points,
    dual_basis,
    dual_polytope,
    face_fan,
)

__all__ = [
    "AffineForm", "ChowObstructError", "ConsistencyError", "FanoPolytope", "InputError",
    "InvariantReport", "OnePSSpec", "QMatrix", "affine_eval", "bernoulli_plus",
    "check_smooth", "chow_weight", "compactified_intersection", "compute_a", "compute_b",
    "count_lattice_points", "det", "donaldson_futaki", "dual_basis", "dual_polytope",
    "face_fan", "futaki", "lift_shift_check", "make_sample_plan", "obstruction_report",
    "residue_sum", "resolve_lambda", "solve", "tangent_weights", "todd_eval",
    "verify_bl1", "verify_theorem_main",
]
