"""The recursive families, their exact evaluation, and the identity checks."""
from .families import SYMBOLIC_N_CAP, Family, build, check_g, clear_caches, f_kn, g_std, hat_g
from .numeric import EvalPoint, NumericSession, eval_family, safe_points, sample_safe_point
from .verify import (
    IDENTITIES,
    IdentityReport,
    verify,
    verify_all,
    verify_main,
    verify_telescoping,
    verify_thm_2_1,
    verify_thm_2_2,
    verify_thm_2_3,
    verify_transform,
)

__all__ = [
    "SYMBOLIC_N_CAP", "Family", "build", "check_g", "clear_caches", "f_kn", "g_std", "hat_g",
    "EvalPoint", "NumericSession", "eval_family", "safe_points", "sample_safe_point",
    "IDENTITIES", "IdentityReport", "verify", "verify_all", "verify_main", "verify_telescoping",
    "verify_thm_2_1", "verify_thm_2_2", "verify_thm_2_3", "verify_transform",
]
