"""Model quotient graphs and exact kernels of Q - 4I.

The graph with parameters (l, case) is a chain v1..vl with weight 2 edges,
two weight 2 leaves hanging off every chain vertex, and for each bad end one
extra vertex joined to that end by an edge of weight ``bad_weight + 1``.
Case ``"11"`` has two good ends, ``"12"`` a good end at v1 and a bad end at
vl, and ``"22"`` two bad ends.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Hashable, Iterable, Sequence

from .errors import InvalidParameters
from .params import RuleParams

CASES = ("11", "12", "22")

Vertex = Hashable


@dataclass(frozen=True)
class WeightedGraph:
    """An undirected graph with positive rational edge weights."""

    vertices: tuple
    weights: dict  # frozenset({u, v}) -> Fraction

    def weight(self, u: Vertex, v: Vertex) -> Fraction:
        return self.weights.get(frozenset((u, v)), Fraction(0))

    def adjacency(self) -> dict:
        adj: dict = {v: {} for v in self.vertices}
        for e, w in self.weights.items():
            u, v = tuple(e)
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def matrix(self) -> list[list[Fraction]]:
        idx = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        m = [[Fraction(0)] * n for _ in range(n)]
        for e, w in self.weights.items():
            u, v = tuple(e)
            m[idx[u]][idx[v]] = w
            m[idx[v]][idx[u]] = w
        return m

    def to_json(self) -> dict:
        def name(v: Vertex) -> str:
            return v if isinstance(v, str) else "/".join(str(x) for x in v)

        edges = sorted(
            [sorted(name(x) for x in e) + [str(w)] for e, w in self.weights.items()]
        )
        return {"vertices": [name(v) for v in self.vertices], "edges": edges}


def build_quotient_graph(ell: int, case: str, params: RuleParams) -> WeightedGraph:
    if case not in CASES:
        raise InvalidParameters(f"case must be one of {CASES}")
    if ell < 2:
        raise InvalidParameters("chain length must be at least 2")
    bad_first = case == "22"
    bad_last = case in ("12", "22")
    two = Fraction(2)
    extra = params.bad_weight + 1
    vertices: list = []
    weights: dict = {}
    # leaves and extra vertices first, chain last: this order eliminates without fill
    for i in range(1, ell + 1):
        for j in (1, 2):
            vertices.append(("leaf", i, j))
            weights[frozenset((("leaf", i, j), ("v", i)))] = two
    if bad_first:
        vertices.append(("bad", 1))
        weights[frozenset((("bad", 1), ("v", 1)))] = extra
    if bad_last:
        vertices.append(("bad", ell))
        weights[frozenset((("bad", ell), ("v", ell)))] = extra
    for i in range(1, ell + 1):
        vertices.append(("v", i))
        if i > 1:
            weights[frozenset((("v", i - 1), ("v", i)))] = two
    return WeightedGraph(tuple(vertices), weights)


# ------------------------------------------------------------ exact elimination


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for x in row.values():
        g = gcd(g, x)
    if g > 1:
        row = {k: x // g for k, x in row.items()}
    return row


class SparseEchelon:
    """Fraction-free row echelon form of a sparse integer matrix.

    Columns are eliminated in index order; every stored pivot row has its
    pivot as its smallest column, so reducing by a pivot never brings in a
    smaller column.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        row = {k: x for k, x in row.items() if x}
        while row:
            cols = sorted(c for c in row if c in self.pivots)
            if not cols:
                break
            c = cols[0]
            prow = self.pivots[c]
            a, b = prow[c], row[c]
            new = {k: a * x for k, x in row.items()}
            for k, x in prow.items():
                v = new.get(k, 0) - b * x
                if v:
                    new[k] = v
                else:
                    new.pop(k, None)
            row = _primitive(new)
        return row

    def add(self, row: dict[int, int]) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        self.pivots[min(row)] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def nullspace(self) -> list[list[Fraction]]:
        free = [c for c in range(self.ncols) if c not in self.pivots]
        basis = []
        for f in free:
            x = [Fraction(0)] * self.ncols
            x[f] = Fraction(1)
            for p in sorted(self.pivots, reverse=True):
                row = self.pivots[p]
                s = sum((Fraction(v) * x[k] for k, v in row.items() if k != p), Fraction(0))
                x[p] = -s / row[p]
            basis.append(x)
        return basis


def _shifted_rows(graph: WeightedGraph, eigenvalue: Fraction) -> list[dict[int, int]]:
    """Rows of D (Q - eigenvalue I) as integer dicts, D a common denominator."""
    idx = {v: i for i, v in enumerate(graph.vertices)}
    den = eigenvalue.denominator if isinstance(eigenvalue, Fraction) else 1
    for w in graph.weights.values():
        den = lcm(den, w.denominator)
    rows: list[dict[int, int]] = [dict() for _ in graph.vertices]
    for e, w in graph.weights.items():
        u, v = tuple(e)
        rows[idx[u]][idx[v]] = int(w * den)
        rows[idx[v]][idx[u]] = int(w * den)
    ev = Fraction(eigenvalue)
    for i in range(len(rows)):
        d = -ev * den
        if d:
            rows[i][i] = rows[i].get(i, 0) + int(d)
    return rows


@dataclass(frozen=True)
class KernelBasis:
    vertices: tuple
    vectors: tuple[tuple[Fraction, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in v] for v in self.vectors]


def kernel_basis(graph: WeightedGraph, eigenvalue: Fraction | int = 4) -> KernelBasis:
    """Exact basis of ker(Q - eigenvalue I), verified against the matrix."""
    ev = Fraction(eigenvalue)
    rows = _shifted_rows(graph, ev)
    ech = SparseEchelon(len(rows))
    for r in rows:
        ech.add(r)
    basis = ech.nullspace()
    for x in basis:
        for r in rows:
            if sum(v * x[k] for k, v in r.items()) != 0:
                raise ArithmeticError("kernel vector failed verification")
    return KernelBasis(graph.vertices, tuple(tuple(x) for x in basis))


def kernel_at_4(graph: WeightedGraph) -> KernelBasis:
    return kernel_basis(graph, 4)


def nullity(graph: WeightedGraph, eigenvalue: Fraction | int = 4) -> int:
    rows = _shifted_rows(graph, Fraction(eigenvalue))
    ech = SparseEchelon(len(rows))
    for r in rows:
        ech.add(r)
    return len(rows) - ech.rank


@lru_cache(maxsize=4096)
def _cached_nullity(ell: int, case: str, params: RuleParams) -> int:
    return nullity(build_quotient_graph(ell, case, params))


def _nullity_job(args: tuple[int, str, RuleParams]) -> int:
    return _cached_nullity(*args)


def nullity_table(
    ells: Iterable[int], cases: Sequence[str], params: RuleParams, workers: int = 1
) -> dict[tuple[int, str], int]:
    """Nullity of Q - 4I for every (l, case); ordered by l then case."""
    jobs = [(ell, case, params) for ell in ells for case in cases]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_nullity_job, jobs))
    else:
        results = [_nullity_job(j) for j in jobs]
    return {(ell, case): n for (ell, case, _), n in zip(jobs, results)}


def predicted_nullity(ell: int, case: str, params: RuleParams) -> int:
    """Nullity from the chain recursion, without building any matrix.

    At an interior chain vertex a kernel vector satisfies
    x[i+1] = x[i] - x[i-1] (leaves carry half the chain value).  A good end
    forces equal values on its last two chain vertices; a bad end with extra
    weight w forces x[neighbour] = (1 - w^2/8) x[end].  The kernel is at most
    one dimensional, spanned by the solution with x[1] = 1 when it also meets
    the far end condition.
    """
    if ell < 2:
        raise InvalidParameters("chain length must be at least 2")
    w = params.bad_weight + 1
    c = 1 - w * w / 8
    bad_first = case == "22"
    bad_last = case in ("12", "22")
    x = [Fraction(0), Fraction(1), c if bad_first else Fraction(1)]
    for i in range(2, ell):
        x.append(x[i] - x[i - 1])
    if bad_last:
        ok = x[ell - 1] == c * x[ell]
    else:
        ok = x[ell - 1] == x[ell]
    return 1 if ok else 0
