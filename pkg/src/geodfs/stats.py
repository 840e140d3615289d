"""Monte Carlo aggregation and distribution comparisons for arc counts.

Counts are exact integers throughout; floating point only enters at the
final test statistics.  F and B measured on the same digraph are
dependent, so two-sample tests always compare marginals from batches run
with different seeds, while the paired mean test uses the within-sample
difference ``F - B`` directly.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from . import __version__
from .dfs import ArcCounts, ModelParams, arc_counts, gen_digraph, parse_probability
from .exact.polynomial import format_rational
from .rng import STREAM_VERSION, StreamFactory

COORDS = ("L", "F", "B", "C", "T")
THREADS_ENV = "GEODFS_THREADS"
CSV_HEADER = ["L", "F", "B", "C", "T", "count"]


class ParameterMismatch(ValueError):
    """Joint counts for different ``(n, p)`` cannot be merged."""


class TooFewCellsError(ValueError):
    """Cell merging left fewer than two cells; the test has no degrees of freedom."""


# -- containers ------------------------------------------------------------------


@dataclass
class JointCounts:
    n: int
    p: Fraction
    total_samples: int = 0
    counts: Dict[Tuple[int, int, int, int, int], int] = field(default_factory=dict)
    seed: Optional[int] = None
    start: int = 0

    def add(self, c: ArcCounts, times: int = 1) -> None:
        key = tuple(c)
        self.counts[key] = self.counts.get(key, 0) + times
        self.total_samples += times

    def check(self) -> None:
        if sum(self.counts.values()) != self.total_samples:
            raise ValueError("counts do not sum to total_samples")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.n, self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointCounts):
            return NotImplemented
        return (self.n, self.p, self.total_samples, self.counts) == (
            other.n,
            other.p,
            other.total_samples,
            other.counts,
        )

    # persistence
    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for key in sorted(self.counts):
            writer.writerow([*key, self.counts[key]])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "n": self.n,
            "p": format_rational(self.p),
            "samples": self.total_samples,
            "seed": self.seed,
            "start": self.start,
            "version": f"{__version__}+stream{STREAM_VERSION}",
        }

    def write(self, path: str) -> str:
        """Write ``path`` (CSV) and its sidecar; return the sidecar path."""
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())
        meta = sidecar_path(path)
        with open(meta, "w") as fh:
            json.dump(self.metadata(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return meta

    @classmethod
    def from_csv(cls, text: str, meta: Mapping) -> "JointCounts":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if [h.strip() for h in header] != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        out = cls(int(meta["n"]), parse_probability(meta["p"]), seed=meta.get("seed"), start=int(meta.get("start", 0)))
        for row in reader:
            if not row:
                continue
            *key, count = (int(v) for v in row)
            out.add(ArcCounts(*key), count)
        if "samples" in meta and int(meta["samples"]) != out.total_samples:
            raise ValueError("sidecar sample count disagrees with the CSV")
        return out

    @classmethod
    def read(cls, path: str) -> "JointCounts":
        with open(sidecar_path(path)) as fh:
            meta = json.load(fh)
        with open(path, newline="") as fh:
            return cls.from_csv(fh.read(), meta)


def sidecar_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".meta.json"


@dataclass
class Histogram:
    counts: Dict[Hashable, int]
    total: int

    @classmethod
    def from_counts(cls, counts: Mapping[Hashable, int]) -> "Histogram":
        c = {k: v for k, v in counts.items() if v}
        return cls(c, sum(c.values()))

    def mean(self) -> Fraction:
        return Fraction(sum(k * v for k, v in self.counts.items()), self.total)


@dataclass
class ComparisonReport:
    test: str
    statistic: float
    decision: str
    sample_sizes: Tuple[int, ...]
    dof: Optional[int] = None
    p_value: Optional[float] = None
    z: Optional[float] = None
    significance: Optional[float] = None
    threshold: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    def to_json(self) -> dict:
        out = {
            "test": self.test,
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "z": self.z,
            "significance": self.significance,
            "threshold": self.threshold,
            "decision": self.decision,
            "sample_sizes": list(self.sample_sizes),
        }
        out.update(self.extra)
        return out


# -- Monte Carlo -------------------------------------------------------------------


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def _run_range(n: int, p: Fraction, seed: int, start: int, stop: int, trace=None) -> Dict[tuple, int]:
    params = ModelParams(n, p)
    factory = StreamFactory(seed)
    tally: Dict[tuple, int] = {}
    p_text = format_rational(p)
    for index in range(start, stop):
        g = gen_digraph(params, factory.stream(index))
        c = arc_counts(g.arcs, n)
        tally[c] = tally.get(c, 0) + 1
        if trace is not None:
            trace.write(
                json.dumps(
                    {"seed": seed, "sample_index": index, "n": n, "p": p_text, "counts": c.as_dict()},
                    sort_keys=True,
                )
                + "\n"
            )
    return tally


def _run_range_star(args) -> Dict[tuple, int]:
    return _run_range(*args)


def run_monte_carlo(
    params: ModelParams,
    samples: int,
    seed: int,
    *,
    start: int = 0,
    workers: Optional[int] = None,
    trace=None,
) -> JointCounts:
    """Tally ``(L, F, B, C, T)`` over sample indices ``start .. start+samples-1``.

    Sample ``i`` always uses substream ``i`` of ``seed``, so the result is
    independent of ``workers`` and of how a run is split.  A ``trace`` file
    receives one JSON line per sample and forces a sequential run.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    workers = default_workers() if workers is None else workers
    stop = start + samples
    if workers <= 1 or trace is not None or samples < 2000:
        tally = _run_range(params.n, params.p, seed, start, stop, trace)
    else:
        from concurrent.futures import ProcessPoolExecutor

        step = -(-samples // workers)
        jobs = [(params.n, params.p, seed, s, min(s + step, stop)) for s in range(start, stop, step)]
        tally = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_range_star, jobs):
                for k, v in part.items():
                    tally[k] = tally.get(k, 0) + v
    out = JointCounts(params.n, params.p, seed=seed, start=start)
    for key in sorted(tally):
        out.add(ArcCounts(*key), tally[key])
    return out


def merge_counts(a: JointCounts, b: JointCounts) -> JointCounts:
    if (a.n, a.p) != (b.n, b.p):
        raise ParameterMismatch(f"cannot merge n={a.n}, p={a.p} with n={b.n}, p={b.p}")
    merged = dict(a.counts)
    for k, v in b.counts.items():
        merged[k] = merged.get(k, 0) + v
    if a.total_samples == 0:
        seed, start = b.seed, b.start
    elif b.total_samples == 0:
        seed, start = a.seed, a.start
    else:
        seed = a.seed if a.seed == b.seed else None
        start = min(a.start, b.start)
    return JointCounts(a.n, a.p, a.total_samples + b.total_samples, merged, seed=seed, start=start)


def shift_coordinate(j: JointCounts, coord: str, by: int) -> JointCounts:
    """Copy of ``j`` with ``coord`` increased by ``by`` in every sample (a sensitivity control)."""
    idx = COORDS.index(coord)
    counts = {}
    for key, v in j.counts.items():
        k = list(key)
        k[idx] += by
        counts[tuple(k)] = counts.get(tuple(k), 0) + v
    return JointCounts(j.n, j.p, j.total_samples, counts, seed=j.seed, start=j.start)


# -- projections ------------------------------------------------------------------------


def marginal(j: JointCounts, coord: str) -> Histogram:
    idx = COORDS.index(coord)
    out: Dict[int, int] = {}
    for key, v in j.counts.items():
        out[key[idx]] = out.get(key[idx], 0) + v
    return Histogram(out, j.total_samples)


def project_quad(j: JointCounts, swapped: bool = False) -> Dict[Tuple[int, int, int, int], int]:
    """``(L, F, B+C, T)``, or ``(L, B, F+C, T)`` when ``swapped``."""
    out: Dict[Tuple[int, int, int, int], int] = {}
    for (L, F, B, C, T), v in j.counts.items():
        key = (L, B, F + C, T) if swapped else (L, F, B + C, T)
        out[key] = out.get(key, 0) + v
    return out


# -- special functions ----------------------------------------------------------------

_GAMMA_EPS = 1e-15
_GAMMA_TINY = 1e-300
_GAMMA_MAX_ITER = 10_000


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)``.

    Series for ``P`` when ``x < a + 1``, modified-Lentz continued fraction
    for ``Q`` otherwise.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    log_prefix = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1:
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(_GAMMA_MAX_ITER):
            ap += 1
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _GAMMA_EPS:
                break
        else:
            raise ArithmeticError("incomplete gamma series did not converge")
        return max(0.0, 1.0 - total * math.exp(log_prefix))
    b = x + 1 - a
    c = 1.0 / _GAMMA_TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        if abs(d) < _GAMMA_TINY:
            d = _GAMMA_TINY
        c = b + an / c
        if abs(c) < _GAMMA_TINY:
            c = _GAMMA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return math.exp(log_prefix) * h


def chi2_sf(statistic: float, dof: int) -> float:
    """Upper tail probability of the chi-square distribution."""
    if dof < 1:
        raise ValueError("dof must be positive")
    return gammaincc(dof / 2.0, statistic / 2.0)


# -- tests -------------------------------------------------------------------------------


def paired_mean_test(j: JointCounts, threshold: float = 3.5, min_samples: int = 1000) -> ComparisonReport:
    """z-test of ``E(F - B) = 0`` from the within-sample differences.

    ``z = mean(D) / (sd(D) / sqrt(N))`` with the ``N - 1`` variance.  When
    every difference is identical the variance vanishes: a zero difference
    is an exact pass, any other constant an exact failure.
    """
    N = j.total_samples
    if N < min_samples:
        raise ValueError(f"paired mean test needs at least {min_samples} samples, got {N}")
    s1 = s2 = 0
    for (L, F, B, C, T), v in j.counts.items():
        d = F - B
        s1 += v * d
        s2 += v * d * d
    mean = Fraction(s1, N)
    var = (s2 - Fraction(s1 * s1, N)) / (N - 1)
    if var == 0:
        z = 0.0 if mean == 0 else math.copysign(math.inf, mean)
    else:
        z = float(mean) / math.sqrt(float(var) / N)
    decision = "accept" if abs(z) <= threshold else "reject"
    return ComparisonReport(
        "paired_mean_F_minus_B",
        statistic=z,
        z=z,
        threshold=threshold,
        decision=decision,
        sample_sizes=(N,),
        extra={"mean_difference": float(mean), "sd": math.sqrt(float(var)), "degenerate": var == 0},
    )


def _merge_adjacent(keys, c1, c2, threshold) -> List[Tuple[int, int]]:
    cells: List[Tuple[int, int]] = []
    o1 = o2 = 0
    for k in keys:
        o1 += c1.get(k, 0)
        o2 += c2.get(k, 0)
        if o1 + o2 >= threshold:
            cells.append((o1, o2))
            o1 = o2 = 0
    if o1 or o2:
        if cells:
            a, b = cells.pop()
            cells.append((a + o1, b + o2))
        else:
            cells.append((o1, o2))
    return cells


def _merge_by_count(keys, c1, c2, threshold) -> List[Tuple[int, int]]:
    ordered = sorted(keys, key=lambda k: (-(c1.get(k, 0) + c2.get(k, 0)), k))
    cells: List[Tuple[int, int]] = []
    t1 = t2 = 0
    for k in ordered:
        o1, o2 = c1.get(k, 0), c2.get(k, 0)
        if o1 + o2 >= threshold:
            cells.append((o1, o2))
        else:
            t1 += o1
            t2 += o2
    if t1 or t2:
        if t1 + t2 >= threshold or not cells:
            cells.append((t1, t2))
        else:
            a, b = cells.pop()
            cells.append((a + t1, b + t2))
    return cells


def two_sample_chi_square(
    h1: Histogram,
    h2: Histogram,
    min_cell: int = 5,
    significance: float = 0.001,
    *,
    pooling: str = "adjacent",
    min_total: int = 10_000,
    name: str = "two_sample_chi_square",
) -> ComparisonReport:
    """Homogeneity chi-square between two independent histograms.

    Cells are pooled until both expected counts ``N_i (o1 + o2) / (N1 + N2)``
    reach ``min_cell``.  ``pooling="adjacent"`` walks the sorted support and
    folds a short final run into the previous cell; ``pooling="count"``
    keeps sufficiently populated cells in descending order and pools the
    rest into one tail cell.
    """
    n1, n2 = h1.total, h2.total
    if min(n1, n2) < min_total:
        raise ValueError(f"two-sample chi-square needs totals of at least {min_total}")
    keys = sorted(set(h1.counts) | set(h2.counts))
    threshold = Fraction(min_cell * (n1 + n2), min(n1, n2))
    if pooling == "adjacent":
        cells = _merge_adjacent(keys, h1.counts, h2.counts, threshold)
    elif pooling == "count":
        cells = _merge_by_count(keys, h1.counts, h2.counts, threshold)
    else:
        raise ValueError(f"unknown pooling {pooling!r}")
    if len(cells) < 2:
        raise TooFewCellsError(f"only {len(cells)} cell(s) left after pooling")
    total = n1 + n2
    stat = Fraction(0)
    for o1, o2 in cells:
        pooled = o1 + o2
        e1 = Fraction(n1 * pooled, total)
        e2 = Fraction(n2 * pooled, total)
        stat += (o1 - e1) ** 2 / e1 + (o2 - e2) ** 2 / e2
    statistic = float(stat)
    dof = len(cells) - 1
    p_value = chi2_sf(statistic, dof)
    return ComparisonReport(
        name,
        statistic=statistic,
        dof=dof,
        p_value=p_value,
        significance=significance,
        decision="reject" if p_value < significance else "accept",
        sample_sizes=(n1, n2),
        extra={"cells": len(cells)},
    )


def chi_square_gof(
    hist: Histogram,
    probabilities: Sequence[Fraction],
    significance: float = 0.001,
    name: str = "chi_square_gof",
) -> ComparisonReport:
    """Goodness of fit against cells ``0..m-1`` plus a tail cell ``>= m``.

    ``probabilities`` gives the ``m`` point masses; the tail receives the
    remaining mass and must be positive.
    """
    m = len(probabilities)
    tail_p = 1 - sum(probabilities, Fraction(0))
    if tail_p <= 0:
        raise ValueError("tail probability must be positive")
    observed = [hist.counts.get(k, 0) for k in range(m)]
    observed.append(sum(v for k, v in hist.counts.items() if k >= m))
    probs = list(probabilities) + [tail_p]
    N = hist.total
    stat = Fraction(0)
    for o, q in zip(observed, probs):
        e = N * q
        stat += (o - e) ** 2 / e
    statistic = float(stat)
    dof = len(probs) - 1
    p_value = chi2_sf(statistic, dof)
    return ComparisonReport(
        name,
        statistic=statistic,
        dof=dof,
        p_value=p_value,
        significance=significance,
        decision="reject" if p_value < significance else "accept",
        sample_sizes=(N,),
        extra={"min_expected": float(min(N * q for q in probs))},
    )


def geometric_probabilities(p: Fraction, cells: int = 13) -> List[Fraction]:
    """``(1 - p) p**k`` for ``k = 0 .. cells-1``."""
    p = parse_probability(p)
    return [(1 - p) * p**k for k in range(cells)]


def tv_distance(h1, h2) -> Fraction:
    """Exact total variation distance between two empirical distributions.

    Accepts :class:`Histogram` objects or plain count mappings.
    """
    c1, n1 = _counts_total(h1)
    c2, n2 = _counts_total(h2)
    if n1 <= 0 or n2 <= 0:
        raise ValueError("totals must be positive")
    diff = sum(abs(Fraction(c1.get(k, 0), n1) - Fraction(c2.get(k, 0), n2)) for k in set(c1) | set(c2))
    return diff / 2


def _counts_total(h) -> Tuple[Mapping, int]:
    if isinstance(h, Histogram):
        return h.counts, h.total
    return h, sum(h.values())


def compare_fb(batch_a: JointCounts, batch_b: JointCounts, significance: float = 0.001, min_cell: int = 5) -> List[ComparisonReport]:
    """F marginal of one batch against the B marginal of an independent batch."""
    _same_params(batch_a, batch_b)
    hf, hb = marginal(batch_a, "F"), marginal(batch_b, "B")
    chi = two_sample_chi_square(hf, hb, min_cell, significance, name="chi_square_F_vs_B")
    chi.extra["tv_distance"] = float(tv_distance(hf, hb))
    return [chi]


def compare_ft(batch_a: JointCounts, batch_b: JointCounts, significance: float = 0.001, min_cell: int = 5) -> ComparisonReport:
    """Sensitivity control: F of one batch against T of the other, which differ."""
    _same_params(batch_a, batch_b)
    hf, ht = marginal(batch_a, "F"), marginal(batch_b, "T")
    rep = two_sample_chi_square(hf, ht, min_cell, significance, name="chi_square_F_vs_T_control")
    rep.extra["tv_distance"] = float(tv_distance(hf, ht))
    return rep


def compare_quadruples(batch_a: JointCounts, batch_b: JointCounts, significance: float = 0.001, min_cell: int = 5) -> ComparisonReport:
    """``(L, F, B+C, T)`` of one batch against ``(L, B, F+C, T)`` of an independent batch."""
    _same_params(batch_a, batch_b)
    qa = Histogram.from_counts(project_quad(batch_a, swapped=False))
    qb = Histogram.from_counts(project_quad(batch_b, swapped=True))
    rep = two_sample_chi_square(qa, qb, min_cell, significance, pooling="count", name="chi_square_quadruples")
    rep.extra["tv_distance"] = float(tv_distance(qa, qb))
    return rep


def _same_params(a: JointCounts, b: JointCounts) -> None:
    if (a.n, a.p) != (b.n, b.p):
        raise ParameterMismatch("batches were generated with different (n, p)")
    if a.seed is not None and a.seed == b.seed:
        if a.start < b.start + b.total_samples and b.start < a.start + a.total_samples:
            raise ValueError("two-sample tests need independent batches (disjoint seeds or index ranges)")
