"""Identity checks over index ranges, symbolic or by exact evaluation.

Every identity is described once as a pair of builders (left side, right
side) in two flavours: symbolic, producing :class:`RationalFunction`
objects, and numeric, producing exact rationals from a
:class:`NumericSession`.  Numeric agreement at many random points is
evidence, not proof, so numeric passes are reported as ``"consistent"``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from ..exact import W, X, Z, PoleError, RationalFunction, rf_sum
from ..exact.polynomial import format_rational
from . import families as fam
from .families import ONE, shift_w
from .numeric import EvalPoint, NumericSession, safe_points

MODES = ("symbolic", "numeric")
DEFAULT_POINTS = 20
MAX_RESAMPLES = 100

IDENTITIES = ("main", "transform", "thm21", "thm22", "thm23", "telescoping")


@dataclass
class IdentityReport:
    identity: str
    n_range: Tuple[int, int]
    mode: str
    verdict: str
    k_range: Optional[Tuple[int, int]] = None
    points: Optional[int] = None
    seed: Optional[int] = None
    witness: Optional[dict] = None
    elapsed_ms: float = 0.0
    checks: int = 0

    @property
    def ok(self) -> bool:
        return self.verdict != "fail"

    def to_json(self, timing: bool = True) -> dict:
        """JSON form; ``timing=False`` nulls ``elapsed_ms`` for reproducible output."""
        return {
            "identity": self.identity,
            "n_range": list(self.n_range),
            "k_range": list(self.k_range) if self.k_range else None,
            "mode": self.mode,
            "points": self.points,
            "seed": self.seed,
            "verdict": self.verdict,
            "witness": self.witness,
            "elapsed_ms": round(self.elapsed_ms, 3) if timing else None,
        }


# -- symbolic sides ---------------------------------------------------------

_TRANSFORM = {"w": ONE - W, "x": -X, "z": -Z}


def _sym_sides(identity: str, n: int, k: Optional[int], cap: Optional[int] = None) -> Tuple[RationalFunction, RationalFunction]:
    if identity == "main":
        return fam.hat_g(n, cap), fam.check_g(n, cap)
    if identity == "transform":
        return fam.g_std(n, cap), fam.hat_g(n, cap).subst_affine(_TRANSFORM)
    if identity == "thm21":
        rhs = fam.g_std(n, cap) - fam.g_std(n - 1, cap).subst_affine(shift_w(Z)).div_linear(W).div_linear(W + X)
        return fam.f_kn(2, n, cap), rhs
    if identity == "thm22":
        rhs = fam.g_std(n - 1, cap).subst_affine(shift_w(X)).div_linear(W).div_linear(W + (n - 1) * Z)
        return fam.f_kn(n - 1, n, cap), rhs
    if identity == "thm23":
        lhs = fam.f_kn(k, n, cap) - fam.f_kn(k + 1, n, cap)
        rhs = (fam.g_std(k, cap).subst_affine(shift_w(X)) * fam.g_std(n - k, cap).subst_affine(shift_w(k * Z))).div_linear(W)
        return lhs, rhs
    if identity == "telescoping":
        lhs = rf_sum(
            fam.g_std(j, cap).subst_affine(shift_w(X)) * fam.g_std(n - j, cap).subst_affine(shift_w(j * Z))
            for j in range(1, n)
        ).div_linear(W)
        return lhs, fam.g_std(n, cap)
    raise ValueError(f"unknown identity {identity!r}")


# -- numeric sides ----------------------------------------------------------


def _num_sides(identity: str, n: int, k: Optional[int], point: EvalPoint, sessions: Dict[str, NumericSession]):
    if identity == "main":
        s = sessions["raw"]
        return s.hat(n, point.w0), s.check(n, point.w0)
    if identity == "transform":
        t = point.transformed()
        return sessions["std"].g(n, t.w0), sessions["raw"].hat(n, point.w0)
    s = sessions["std"]
    t = point.transformed()
    w, x, z = t.w0, t.x0, t.z0
    if identity == "thm21":
        return s.f(2, n, w), s.g(n, w) - s.g(n - 1, w + z) / (w * (w + x))
    if identity == "thm22":
        return s.f(n - 1, n, w), s.g(n - 1, w + x) / (w * (w + (n - 1) * z))
    if identity == "thm23":
        return s.f(k, n, w) - s.f(k + 1, n, w), s.g(k, w + x) * s.g(n - k, w + k * z) / w
    if identity == "telescoping":
        lhs = sum(s.g(j, w + x) * s.g(n - j, w + j * z) for j in range(1, n)) / w
        return lhs, s.g(n, w)
    raise ValueError(f"unknown identity {identity!r}")


def _sessions(point: EvalPoint) -> Dict[str, NumericSession]:
    t = point.transformed()
    return {"raw": NumericSession(point.x0, point.z0), "std": NumericSession(t.x0, t.z0)}


def min_index(identity: str) -> int:
    return {"main": 1, "transform": 1, "thm21": 3, "thm22": 2, "thm23": 3, "telescoping": 3}[identity]


def _cases(identity: str, n_min: int, n_max: int) -> Iterator[Tuple[int, Optional[int]]]:
    for n in range(n_min, n_max + 1):
        if identity == "thm23":
            for k in range(1, n - 1):
                yield n, k
        else:
            yield n, None


def verify(
    identity: str,
    n_max: int,
    mode: str = "symbolic",
    points: int = DEFAULT_POINTS,
    seed: int = 0,
    n_min: Optional[int] = None,
    bound: int = 1000,
    cap: Optional[int] = None,
) -> IdentityReport:
    """Check ``identity`` for every valid index up to ``n_max``.

    ``n_min`` defaults to the smallest index at which the identity is
    defined.  Symbolic mode compares rational functions exactly; numeric
    mode compares exact values at ``points`` seeded safe points per index.
    """
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}; expected one of {IDENTITIES}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    lo = min_index(identity)
    n_min = lo if n_min is None else n_min
    if n_min < lo:
        raise ValueError(f"{identity} needs n >= {lo}")
    if n_max < n_min:
        raise ValueError(f"empty index range {n_min}..{n_max}")
    if points < 1:
        raise ValueError("points must be positive")
    k_range = (1, n_max - 2) if identity == "thm23" else None
    start = time.perf_counter()
    report = IdentityReport(identity, (n_min, n_max), mode, "pass", k_range=k_range)
    if mode == "symbolic":
        limit = fam.SYMBOLIC_N_CAP if cap is None else cap
        if n_max > limit:
            raise fam.DegreeCapError(f"symbolic check refused for n={n_max} > cap {limit}")
        for n, k in _cases(identity, n_min, n_max):
            lhs, rhs = _sym_sides(identity, n, k, limit)
            report.checks += 1
            if not lhs.equals(rhs):
                report.verdict = "fail"
                report.witness = {"n": n, "k": k, "difference": (lhs - rhs).to_json()}
                break
    else:
        report.points, report.seed = points, seed
        report.verdict = "consistent"
        failure = _numeric_run(identity, n_min, n_max, points, seed, bound, report)
        if failure is not None:
            report.verdict = "fail"
            report.witness = failure
    report.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return report


def _numeric_run(identity, n_min, n_max, points, seed, bound, report) -> Optional[dict]:
    stream = safe_points(seed, bound)
    used = 0
    resamples = 0
    while used < points:
        point = next(stream)
        sessions = _sessions(point)
        try:
            for n, k in _cases(identity, n_min, n_max):
                lhs, rhs = _num_sides(identity, n, k, point, sessions)
                report.checks += 1
                if lhs != rhs:
                    return {
                        "n": n,
                        "k": k,
                        "point": point.to_json(),
                        "lhs": format_rational(lhs),
                        "rhs": format_rational(rhs),
                    }
        except PoleError:
            resamples += 1
            if resamples > MAX_RESAMPLES:
                raise
            continue
        used += 1
    return None


def verify_main(n_max: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> IdentityReport:
    return verify("main", n_max, mode, points, seed)


def verify_transform(n_max: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> IdentityReport:
    return verify("transform", n_max, mode, points, seed)


def verify_thm_2_1(n: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> IdentityReport:
    """``F(2, m) == G_m(w) - G_{m-1}(w+z) / (w (w+x))`` for ``3 <= m <= n``."""
    return verify("thm21", n, mode, points, seed)


def verify_thm_2_2(n: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> IdentityReport:
    """``F(m-1, m) == G_{m-1}(w+x) / (w (w+(m-1)z))`` for ``2 <= m <= n``."""
    return verify("thm22", n, mode, points, seed)


def verify_thm_2_3(n: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> IdentityReport:
    """``F(k, m) - F(k+1, m) == G_k(w+x) G_{m-k}(w+kz) / w`` for every ``1 <= k <= m-2``, ``m <= n``."""
    return verify("thm23", n, mode, points, seed)


def verify_telescoping(n: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> IdentityReport:
    """``sum_k G_k(w+x) G_{m-k}(w+kz) / w == G_m(w)`` for ``3 <= m <= n``."""
    return verify("telescoping", n, mode, points, seed)


def verify_all(n_max: int, mode: str = "symbolic", points: int = DEFAULT_POINTS, seed: int = 0) -> List[IdentityReport]:
    return [verify(name, n_max, mode, points, seed) for name in IDENTITIES]
