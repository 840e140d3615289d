"""Random multidigraphs with geometric outdegrees, and DFS arc classification.

Vertices are ``1..n``.  ``Digraph.arcs[v - 1]`` lists the heads of the arcs
leaving ``v`` in generation order; duplicates and self-arcs are allowed.

DFS convention: each new tree is rooted at the smallest-index unvisited
vertex, the arcs of a vertex are examined in stored order, and the search
descends immediately along every tree arc.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .exact.polynomial import as_rational, format_rational
from .rng import WordStream, acceptance_limit

#: Bernoulli trials allowed for one outdegree draw before giving up.
GEOMETRIC_CAP = 1 << 16
#: Largest accepted denominator of ``p`` (draws use 64-bit bounded integers).
MAX_P_DENOMINATOR = 1 << 62


class GeometricCapError(RuntimeError):
    """An outdegree draw needed more than :data:`GEOMETRIC_CAP` trials."""


def parse_probability(p) -> Fraction:
    """Exact ``p`` in ``(0, 1)`` from a Fraction, int or ``"num/den"`` string."""
    value = Fraction(as_rational(p))
    if not 0 < value < 1:
        raise ValueError(f"p must satisfy 0 < p < 1, got {value}")
    if value.denominator > MAX_P_DENOMINATOR:
        raise ValueError("denominator of p is too large")
    return value


@dataclass(frozen=True)
class ModelParams:
    n: int
    p: Fraction

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "p", parse_probability(self.p))

    @property
    def p_text(self) -> str:
        return format_rational(self.p)


class ArcClass(enum.Enum):
    TREE = "T"
    LOOP = "L"
    FORWARD = "F"
    BACK = "B"
    CROSS = "C"


class ArcCounts(NamedTuple):
    L: int = 0
    F: int = 0
    B: int = 0
    C: int = 0
    T: int = 0

    @property
    def total(self) -> int:
        return self.L + self.F + self.B + self.C + self.T

    def as_dict(self) -> dict:
        return self._asdict()


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.arcs) != self.n:
            raise ValueError("need one arc list per vertex")
        for heads in self.arcs:
            for u in heads:
                if not 1 <= u <= self.n:
                    raise ValueError(f"head {u} outside 1..{self.n}")

    @classmethod
    def _trusted(cls, n: int, arcs: Tuple[Tuple[int, ...], ...]) -> "Digraph":
        # Generator output is valid by construction; skip the head scan.
        obj = cls.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "arcs", arcs)
        return obj

    @classmethod
    def from_lists(cls, arcs: Sequence[Sequence[int]]) -> "Digraph":
        return cls(len(arcs), tuple(tuple(int(u) for u in heads) for heads in arcs))

    @property
    def total_arcs(self) -> int:
        return sum(len(h) for h in self.arcs)

    def outdegrees(self) -> List[int]:
        return [len(h) for h in self.arcs]

    def iter_arcs(self):
        """``(tail, head)`` pairs, tails ascending, each tail's arcs in stored order."""
        for v, heads in enumerate(self.arcs, start=1):
            for u in heads:
                yield v, u

    def to_text(self) -> str:
        lines = []
        for v, heads in enumerate(self.arcs, start=1):
            lines.append(f"{v}: {' '.join(map(str, heads))}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Digraph":
        """Parse the fixture format: one line ``v: h1 h2 ...`` per vertex, in order."""
        rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        arcs = []
        for expected, line in enumerate(rows, start=1):
            label, _, rest = line.partition(":")
            if int(label) != expected:
                raise ValueError(f"expected vertex {expected}, found {label.strip()!r}")
            arcs.append([int(tok) for tok in rest.split()])
        return cls.from_lists(arcs)


# -- sampling ------------------------------------------------------------------


def sample_outdegrees(p: Fraction, stream: WordStream, size: int) -> List[int]:
    """``size`` independent draws with ``P(k) = (1-p) p**k``.

    Each draw counts Bernoulli(p) successes before the first failure; a
    trial is the exact comparison ``U < num`` with ``U`` uniform on
    ``0..den-1``.
    """
    p = parse_probability(p)
    return _geometric_runs(p.numerator, p.denominator, stream, size)


def _geometric_runs(a: int, b: int, stream: WordStream, size: int) -> List[int]:
    out: List[int] = []
    if size <= 0:
        return out
    limit = acceptance_limit(b)
    run = 0
    for u in stream:
        if u >= limit:
            continue
        if u % b < a:
            run += 1
            if run > GEOMETRIC_CAP:
                raise GeometricCapError(f"outdegree draw exceeded {GEOMETRIC_CAP} trials")
        else:
            out.append(run)
            if len(out) == size:
                return out
            run = 0
    raise AssertionError("unreachable")


def sample_outdegree(p: Fraction, stream: WordStream) -> int:
    return sample_outdegrees(p, stream, 1)[0]


def uniform_vertices(n: int, stream: WordStream, size: int) -> List[int]:
    """``size`` independent uniform draws from ``1..n``."""
    limit = acceptance_limit(n)
    out: List[int] = []
    if size <= 0:
        return out
    for u in stream:
        if u < limit:
            out.append(u % n + 1)
            if len(out) == size:
                return out
    raise AssertionError("unreachable")


def gen_digraph(params: ModelParams, stream: WordStream) -> Digraph:
    """All ``n`` outdegrees first, then every head uniform on ``1..n``, from one stream."""
    n = params.n
    degrees = _geometric_runs(params.p.numerator, params.p.denominator, stream, n)
    heads = uniform_vertices(n, stream, sum(degrees))
    arcs = []
    pos = 0
    for d in degrees:
        arcs.append(tuple(heads[pos:pos + d]))
        pos += d
    return Digraph._trusted(n, tuple(arcs))


# -- classification ----------------------------------------------------------


@dataclass(frozen=True)
class DfsForest:
    # Index 0 is unused in every per-vertex list.
    parent: Tuple[Optional[int], ...]
    disc: Tuple[int, ...]
    finish: Tuple[int, ...]
    roots: Tuple[int, ...]


@dataclass(frozen=True)
class DfsResult:
    forest: DfsForest
    counts: ArcCounts
    classes: Tuple[ArcClass, ...]  # aligned with Digraph.iter_arcs()


def dfs_classify(g: Digraph) -> DfsResult:
    """Run the DFS with an explicit stack, classifying each arc when examined."""
    n = g.n
    arcs = g.arcs
    disc = [0] * (n + 1)
    finish = [0] * (n + 1)
    parent: List[Optional[int]] = [None] * (n + 1)
    offsets = [0] * (n + 1)
    for v in range(1, n):
        offsets[v + 1] = offsets[v] + len(arcs[v - 1])
    classes: List[Optional[ArcClass]] = [None] * g.total_arcs
    roots = []
    tally = {c: 0 for c in ArcClass}
    clock = 0
    for root in range(1, n + 1):
        if disc[root]:
            continue
        roots.append(root)
        clock += 1
        disc[root] = clock
        stack = [[root, 0]]
        while stack:
            top = stack[-1]
            v, i = top
            heads = arcs[v - 1]
            if i == len(heads):
                clock += 1
                finish[v] = clock
                stack.pop()
                continue
            top[1] = i + 1
            u = heads[i]
            if not disc[u]:
                cls = ArcClass.TREE
                parent[u] = v
                clock += 1
                disc[u] = clock
                stack.append([u, 0])
            elif u == v:
                cls = ArcClass.LOOP
            elif not finish[u]:
                cls = ArcClass.BACK
            elif disc[u] > disc[v]:
                cls = ArcClass.FORWARD
            else:
                cls = ArcClass.CROSS
            classes[offsets[v] + i] = cls
            tally[cls] += 1
    forest = DfsForest(tuple(parent), tuple(disc), tuple(finish), tuple(roots))
    counts = ArcCounts(
        L=tally[ArcClass.LOOP],
        F=tally[ArcClass.FORWARD],
        B=tally[ArcClass.BACK],
        C=tally[ArcClass.CROSS],
        T=tally[ArcClass.TREE],
    )
    return DfsResult(forest, counts, tuple(classes))


def classify_offline(g: Digraph, forest: DfsForest) -> Tuple[ArcClass, ...]:
    """Reclassify every arc from the finished forest alone.

    The tree arc into ``u`` is the first arc ``parent(u) -> u`` in the
    parent's list; every other arc is decided by nesting of the
    ``[disc, finish]`` intervals.
    """
    disc, finish, parent = forest.disc, forest.finish, forest.parent
    out: List[ArcClass] = []
    for v, heads in enumerate(g.arcs, start=1):
        tree_used = set()
        for u in heads:
            if parent[u] == v and u not in tree_used:
                tree_used.add(u)
                out.append(ArcClass.TREE)
            elif u == v:
                out.append(ArcClass.LOOP)
            elif disc[v] < disc[u] and finish[u] < finish[v]:
                out.append(ArcClass.FORWARD)
            elif disc[u] < disc[v] and finish[v] < finish[u]:
                out.append(ArcClass.BACK)
            else:
                out.append(ArcClass.CROSS)
    return tuple(out)


def arc_counts(arcs: Sequence[Sequence[int]], n: int) -> ArcCounts:
    """Counts only; the same traversal as :func:`dfs_classify` without bookkeeping."""
    disc = [0] * (n + 1)
    done = [False] * (n + 1)
    L = F = B = C = T = 0
    clock = 0
    for root in range(1, n + 1):
        if disc[root]:
            continue
        clock += 1
        disc[root] = clock
        stack = [(root, iter(arcs[root - 1]))]
        while stack:
            v, it = stack[-1]
            for u in it:
                if not disc[u]:
                    T += 1
                    clock += 1
                    disc[u] = clock
                    stack.append((u, iter(arcs[u - 1])))
                    break
                if u == v:
                    L += 1
                elif not done[u]:
                    B += 1
                elif disc[u] > disc[v]:
                    F += 1
                else:
                    C += 1
            else:
                done[v] = True
                stack.pop()
    return ArcCounts(L, F, B, C, T)
