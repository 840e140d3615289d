"""Acceptance criteria, each at its stated size and tolerance.

Every test tags itself with a criterion label through ``record_property``;
``conftest.py`` prints one PASS/FAIL line per criterion after the run.
Run just these with ``pytest tests/test_acceptance.py``.
"""
import math
import subprocess
import sys
import time
from fractions import Fraction
from functools import lru_cache

import pytest

from geodfs.dfs import ModelParams, classify_offline, dfs_classify, gen_digraph, sample_outdegrees
from geodfs.recursion import verify
from geodfs.rng import StreamFactory, sample_stream
from geodfs.stats import (
    Histogram,
    chi_square_gof,
    compare_fb,
    compare_ft,
    compare_quadruples,
    geometric_probabilities,
    paired_mean_test,
    project_quad,
    run_monte_carlo,
    shift_coordinate,
)

pytestmark = pytest.mark.acceptance

HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def batch(n, p, samples, seed):
    return run_monte_carlo(ModelParams(n, p), samples, seed)


def label(record_property, name, detail=""):
    record_property("criterion", name)
    record_property("detail", detail)


def test_symbolic_main_identity(record_property):
    t0 = time.perf_counter()
    rep = verify("main", 8, mode="symbolic")
    elapsed = time.perf_counter() - t0
    label(record_property, "symbolic main identity, n = 1..8", f"verdict {rep.verdict}, {elapsed:.1f} s (limit 120 s)")
    assert rep.verdict == "pass" and rep.checks == 8
    assert elapsed < 120


def test_numeric_main_identity(record_property):
    t0 = time.perf_counter()
    rep = verify("main", 18, mode="numeric", points=20, seed=2024)
    elapsed = time.perf_counter() - t0
    label(record_property, "numeric main identity, n = 1..18, 20 points", f"verdict {rep.verdict}, {rep.checks} exact comparisons, {elapsed:.1f} s (limit 60 s)")
    assert rep.verdict == "consistent" and rep.checks == 18 * 20
    assert elapsed < 60


@pytest.mark.parametrize("identity", ["thm21", "thm22", "thm23", "telescoping"])
def test_auxiliary_identities(identity, record_property):
    sym = verify(identity, 8, mode="symbolic")
    num = verify(identity, 14, mode="numeric", points=20, seed=2024)
    label(
        record_property,
        f"{identity}: symbolic n <= 8, numeric n <= 14",
        f"symbolic {sym.verdict} ({sym.checks} cases), numeric {num.verdict} ({num.checks} comparisons)",
    )
    assert sym.verdict == "pass" and num.verdict == "consistent"
    if identity == "thm23":
        assert sym.checks == sum(n - 2 for n in range(3, 9))


def test_transform_consistency(record_property):
    rep = verify("transform", 6, mode="symbolic")
    label(record_property, "transform consistency, n <= 6", f"verdict {rep.verdict}")
    assert rep.verdict == "pass" and rep.n_range == (1, 6)


def test_oracle_equivalence(record_property):
    params = ModelParams(20, HALF)
    factory = StreamFactory(20240520)
    mismatches = arcs = 0
    for i in range(10_000):
        g = gen_digraph(params, factory.stream(i))
        res = dfs_classify(g)
        offline = classify_offline(g, res.forest)
        arcs += len(offline)
        mismatches += sum(a is not b for a, b in zip(res.classes, offline))
    label(record_property, "online vs offline classification, 10^4 digraphs n = 20", f"{mismatches} mismatches over {arcs} arcs")
    assert mismatches == 0


def test_sampler_fit(record_property):
    lines = []
    decisions = []
    for i, p in enumerate((Fraction(1, 4), HALF, Fraction(3, 4))):
        draws = sample_outdegrees(p, sample_stream(31337, i), 10**6)
        counts = {}
        for d in draws:
            counts[d] = counts.get(d, 0) + 1
        rep = chi_square_gof(Histogram(counts, len(draws)), geometric_probabilities(p, 13), 0.001)
        decisions.append(rep.decision)
        lines.append(f"p={p}: chi2={rep.statistic:.2f} dof={rep.dof} pval={rep.p_value:.3g}")
    label(record_property, "outdegree sampler GOF, 10^6 draws at p = 1/4, 1/2, 3/4", "; ".join(lines))
    assert decisions == ["accept"] * 3


def test_paired_mean(record_property):
    grid = [(5, HALF, 200_000, 501), (9, HALF, 200_000, 502), (9, Fraction(3, 4), 200_000, 503)]
    parts = []
    ok = True
    for n, p, N, seed in grid:
        rep = paired_mean_test(batch(n, p, N, seed), threshold=3.5)
        ok &= rep.decision == "accept"
        parts.append(f"(n={n}, p={p}) z={rep.z:+.3f}")
    control = paired_mean_test(shift_coordinate(batch(9, HALF, 200_000, 502), "F", 1), threshold=3.5)
    parts.append(f"shifted control z={control.z:.1f} {control.decision}")
    label(record_property, "E(F) = E(B) paired test, |z| <= 3.5, plus shifted control", "; ".join(parts))
    assert ok
    assert control.decision == "reject"


def test_f_vs_b_distribution(record_property):
    a, b = batch(9, HALF, 100_000, 901), batch(9, HALF, 100_000, 902)
    (chi,) = compare_fb(a, b, significance=0.001)
    control = compare_ft(a, b, significance=0.001)
    tv = chi.extra["tv_distance"]
    label(
        record_property,
        "F vs B two-sample chi-square and TV < 0.02, n = 9, 10^5 per batch",
        f"chi2={chi.statistic:.2f} dof={chi.dof} pval={chi.p_value:.3g} TV={tv:.4f}; F vs T control pval={control.p_value:.3g} {control.decision}",
    )
    assert chi.decision == "accept"
    assert tv < 0.02
    assert control.decision == "reject"


def _null_tv_scale(a, b):
    """Expected TV between two independent empirical laws of sizes N1, N2 drawn from the same law.

    For a cell of mass q the difference of empirical frequencies is close
    to normal with variance q (1/N1 + 1/N2), so its mean absolute value is
    sqrt(2 q (1/N1 + 1/N2) / pi).  The pooled frequencies stand in for q.
    """
    qa, qb = project_quad(a, False), project_quad(b, True)
    n1, n2 = a.total_samples, b.total_samples
    pooled = {}
    for k in set(qa) | set(qb):
        pooled[k] = (qa.get(k, 0) + qb.get(k, 0)) / (n1 + n2)
    scale = 1 / n1 + 1 / n2
    return 0.5 * sum(math.sqrt(2 * q * scale / math.pi) for q in pooled.values()), len(pooled)


def test_quadruple_distribution(record_property):
    a, b = batch(7, HALF, 100_000, 701), batch(7, HALF, 100_000, 702)
    rep = compare_quadruples(a, b, significance=0.001)
    tv = rep.extra["tv_distance"]
    floor, cells = _null_tv_scale(a, b)
    label(
        record_property,
        "quadruple TV < 0.05 and pooled chi-square, n = 7, 10^5 per batch",
        f"chi2={rep.statistic:.1f} dof={rep.dof} pval={rep.p_value:.3g} {rep.decision}; "
        f"TV={tv:.4f} over {cells} support cells (sampling-noise TV expected near {floor:.4f} even under equality)",
    )
    assert rep.decision == "accept"
    assert tv < 0.05, f"TV {tv:.4f} >= 0.05; same-law noise alone predicts about {floor:.4f} at this sample size"


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "geodfs.cli", *argv], capture_output=True)
    return proc.returncode, proc.stdout


def test_determinism(record_property, tmp_path):
    runs = {
        "simulate": ("simulate", "--n", "9", "--p", "1/2", "--samples", "1000", "--seed", "7"),
        "verify numeric": ("verify", "--identity", "all", "--n-max", "8", "--mode", "numeric", "--seed", "5", "--points", "5"),
        "verify symbolic": ("verify", "--identity", "thm23", "--n-max", "5"),
        "eval": ("eval", "--family", "F", "--n", "4", "--k", "2", "--at", "w=3/2,x=1/3,z=2", "--symbolic"),
    }
    same = {}
    for name, argv in runs.items():
        first, second = _cli(*argv), _cli(*argv)
        same[name] = first == second and first[0] == 0
    for tag, seed in (("a", 11), ("b", 12)):
        out = tmp_path / f"{tag}.csv"
        _cli("simulate", "--n", "5", "--p", "1/2", "--samples", "12000", "--seed", str(seed), "--out", str(out))
    compare = ("compare", "--in", str(tmp_path / "a.csv"), str(tmp_path / "b.csv"))
    same["compare"] = _cli(*compare) == _cli(*compare)
    label(record_property, "seeded commands are byte-identical across runs", ", ".join(f"{k}: {'same' if v else 'DIFFERENT'}" for k, v in same.items()))
    assert all(same.values())
