"""Exact computations with theta filtrations of symmetric-power modules of GL2(F_q)."""
from .gf_core import FieldSpec, field_build
from .weight_algebra import PartialResult, TensorTerm, Weight, WeightSum, decompose
from .exact_modules import RepSpace, theta_filtration, verify_iso1
from .ps_jh import jh_factors, hypercube_vx
from .report import Report

__all__ = [
    "FieldSpec", "field_build", "PartialResult", "TensorTerm", "Weight", "WeightSum", "decompose",
    "RepSpace", "theta_filtration", "verify_iso1", "jh_factors", "hypercube_vx", "Report",
]
__version__ = "0.1.0"
