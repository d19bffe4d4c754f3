"""Subgroups generated by conjugated horizontal generators.

For a finite index set I and lengths l(1) < l(2) < ..., the subgroup is
generated by t_n = b^l(n) a B^l(n) for n in I.  Membership is decided by a
folded automaton (a "broom": a vertical chain out of the base vertex with
horizontal loops at the heights l(n)); an independent bounded search over
syllable products serves as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .errors import InvalidParameters, SearchBoundExceeded
from .words import (
    IDENTITY,
    LETTERS,
    TreePath,
    invert,
    inverse_letter,
    multiply,
    word_key,
)


@dataclass(frozen=True)
class LengthSequence:
    """Strictly increasing positive lengths, indexed from 1."""

    lengths: tuple[int, ...]

    def __post_init__(self) -> None:
        ls = tuple(self.lengths)
        object.__setattr__(self, "lengths", ls)
        if any(x < 1 for x in ls):
            raise InvalidParameters("lengths must be positive")
        if any(ls[i] >= ls[i + 1] for i in range(len(ls) - 1)):
            raise InvalidParameters("lengths must be strictly increasing")

    @classmethod
    def from_mapping(cls, m: Mapping[int, int]) -> LengthSequence:
        keys = sorted(m)
        if keys != list(range(1, len(keys) + 1)):
            raise InvalidParameters("lengths must be given for indices 1..n")
        return cls(tuple(m[k] for k in keys))

    def __len__(self) -> int:
        return len(self.lengths)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= len(self.lengths):
            raise InvalidParameters(f"no length for index {n}")
        return self.lengths[n - 1]

    def to_json(self) -> dict[str, int]:
        return {str(i + 1): x for i, x in enumerate(self.lengths)}


@dataclass(frozen=True)
class SubgroupSpec:
    indices: frozenset[int]
    lengths: LengthSequence

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", frozenset(self.indices))
        for n in self.indices:
            if not isinstance(n, int) or not 1 <= n <= len(self.lengths):
                raise InvalidParameters(f"index {n} has no length")

    @classmethod
    def make(cls, indices: Iterable[int], lengths: Mapping[int, int] | Iterable[int]) -> SubgroupSpec:
        if isinstance(lengths, Mapping):
            seq = LengthSequence.from_mapping(lengths)
        else:
            seq = LengthSequence(tuple(lengths))
        return cls(frozenset(indices), seq)

    @property
    def sorted_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.indices))

    @property
    def max_length(self) -> int:
        return max((self.lengths[n] for n in self.indices), default=0)

    def generators(self) -> list[str]:
        return [generator(n, self.lengths) for n in self.sorted_indices]

    def restrict(self, max_index: int) -> SubgroupSpec:
        return SubgroupSpec(frozenset(n for n in self.indices if n <= max_index), self.lengths)

    def label(self) -> str:
        return "{" + ",".join(str(n) for n in self.sorted_indices) + "}"

    def to_json(self) -> dict:
        return {"indices": list(self.sorted_indices), "lengths": self.lengths.to_json()}


def generator(n: int, lengths: LengthSequence) -> str:
    ln = lengths[n]
    return "b" * ln + "a" + "B" * ln


def lex_less(i: Iterable[int], j: Iterable[int]) -> bool:
    """I < J iff the smallest index where they differ belongs to J."""
    si, sj = set(i), set(j)
    diff = si ^ sj
    if not diff:
        return False
    return min(diff) in sj


# ------------------------------------------------------------ automaton


class FoldedAutomaton:
    """A folded labelled graph with a base state 0.

    ``edges[q]`` maps a letter to the target state; inverse edges are stored
    too, so the graph is an involutive automaton over aAbB.
    """

    def __init__(self, edges: list[dict[str, int]]):
        self.edges = edges

    @classmethod
    def from_words(cls, words: Iterable[str]) -> FoldedAutomaton:
        # bouquet of loops, one per word, then fold
        adj: list[dict[str, set[int]]] = [{}]

        def add_edge(u: int, c: str, v: int) -> None:
            adj[u].setdefault(c, set()).add(v)
            adj[v].setdefault(inverse_letter(c), set()).add(u)

        for w in words:
            if not w:
                continue
            prev = 0
            for i, c in enumerate(w):
                if i == len(w) - 1:
                    nxt = 0
                else:
                    adj.append({})
                    nxt = len(adj) - 1
                add_edge(prev, c, nxt)
                prev = nxt

        parent = list(range(len(adj)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        changed = True
        while changed:
            changed = False
            for u in range(len(adj)):
                if find(u) != u:
                    continue
                for c in LETTERS:
                    targets = {find(v) for v in adj[u].get(c, ())}
                    adj[u][c] = targets
                    if len(targets) > 1:
                        keep, *rest = sorted(targets)
                        for r in rest:
                            parent[r] = keep
                            for cc, vs in adj[r].items():
                                adj[keep].setdefault(cc, set()).update(vs)
                            adj[r] = {}
                        changed = True
            for u in range(len(adj)):
                for c in list(adj[u]):
                    adj[u][c] = {find(v) for v in adj[u][c]}

        # renumber by breadth-first search from the base in letter order
        order = {find(0): 0}
        queue = [find(0)]
        for u in queue:
            for c in LETTERS:
                for v in sorted(adj[u].get(c, ())):
                    if v not in order:
                        order[v] = len(order)
                        queue.append(v)
        edges: list[dict[str, int]] = [dict() for _ in order]
        for u, qu in order.items():
            for c in LETTERS:
                vs = adj[u].get(c, set())
                if vs:
                    (v,) = vs
                    edges[qu][c] = order[v]
        return cls(edges)

    @property
    def num_states(self) -> int:
        return len(self.edges)

    def read(self, w: str) -> tuple[int, str]:
        """Follow w from the base; return (stuck state, unread suffix)."""
        q = 0
        for i, c in enumerate(w):
            nxt = self.edges[q].get(c)
            if nxt is None:
                return q, w[i:]
            q = nxt
        return q, ""

    def accepts(self, w: str) -> bool:
        q, rest = self.read(w)
        return q == 0 and rest == ""

    def right_coset_key(self, w: str) -> tuple[int, str]:
        """Key identifying the right coset H w of the subgroup H."""
        return self.read(w)


@lru_cache(maxsize=256)
def automaton(spec: SubgroupSpec) -> FoldedAutomaton:
    return FoldedAutomaton.from_words(spec.generators())


def is_member(w: str, spec: SubgroupSpec) -> bool:
    return automaton(spec).accepts(w)


def left_coset_key(g: str, spec: SubgroupSpec) -> tuple[int, str]:
    """Key identifying the left coset g H (via the right coset H g^-1)."""
    return automaton(spec).right_coset_key(invert(g))


# ------------------------------------------------------------ search oracle


def _syllable_products(spec: SubgroupSpec, max_core: int, max_syllables: int | None) -> Iterator[tuple[str, int, bool]]:
    """Products t_{i1}^{k1} ... t_{im}^{km} with consecutive indices distinct.

    Yields (product, number of syllables, has live extension) for products
    whose core length (product length minus the trailing vertical tail) is at
    most ``max_core``.  Core length never decreases when a syllable is added,
    which bounds the search.
    """
    idx = spec.sorted_indices
    ls = spec.lengths
    gens = {n: generator(n, ls) for n in idx}

    def grow(prod: str, last: int | None, depth: int) -> Iterator[tuple[str, int, bool]]:
        live = False
        children = []
        for n in idx:
            if n == last:
                continue
            for sign in (1, -1):
                g = gens[n] if sign > 0 else invert(gens[n])
                nxt = prod
                while True:
                    nxt = multiply(nxt, g)
                    if len(nxt) - ls[n] > max_core:
                        break
                    children.append((nxt, n))
        if children:
            live = True
        if max_syllables is not None and depth >= max_syllables:
            yield prod, depth, live
            return
        yield prod, depth, False
        for nxt, n in children:
            yield from grow(nxt, n, depth + 1)

    yield from grow(IDENTITY, None, 0)


def membership_oracle_bfs(w: str, spec: SubgroupSpec, max_syllables: int) -> bool:
    """Decide membership by searching syllable products of bounded core length.

    Raises SearchBoundExceeded if the word was not found and the search was
    cut off at ``max_syllables`` with extensions still possible.
    """
    cut = False
    for prod, _, live in _syllable_products(spec, len(w), max_syllables):
        if prod == w:
            return True
        cut = cut or live
    if cut:
        raise SearchBoundExceeded(f"syllable bound {max_syllables} reached for {w or 'e'}")
    return False


def enumerate_members(spec: SubgroupSpec, max_length: int) -> set[str]:
    """All subgroup elements of length at most ``max_length`` (search oracle)."""
    return {p for p, _, _ in _syllable_products(spec, max_length, None) if len(p) <= max_length}


# ------------------------------------------------------------ cosets


class UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if word_key(ry) < word_key(rx):
                rx, ry = ry, rx
            self.parent[ry] = rx

    def groups(self) -> list[list[str]]:
        out: dict[str, list[str]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass(frozen=True)
class CosetPartition:
    """Partition of the vertices of a path by left cosets of the subgroup."""

    cells: tuple[tuple[str, ...], ...]

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    def to_json(self) -> list[list[str]]:
        return [[w or "e" for w in cell] for cell in self.cells]


def _sorted_cells(groups: Iterable[Iterable[str]]) -> tuple[tuple[str, ...], ...]:
    cells = [tuple(sorted(g, key=word_key)) for g in groups]
    return tuple(sorted(cells, key=lambda c: word_key(c[0])))


def coset_partition(path: TreePath | Iterable[str], spec: SubgroupSpec) -> CosetPartition:
    """Group path vertices g, h together when g^-1 h lies in the subgroup."""
    vs = list(path.vertices) if isinstance(path, TreePath) else list(path)
    uf = UnionFind(vs)
    for i, g in enumerate(vs):
        gi = invert(g)
        for h in vs[i + 1 :]:
            if is_member(multiply(gi, h), spec):
                uf.union(g, h)
    return CosetPartition(_sorted_cells(uf.groups()))


def coset_cell_count(path: TreePath | Iterable[str], spec: SubgroupSpec) -> int:
    """Number of cells of the coset partition, via coset keys."""
    vs = path.vertices if isinstance(path, TreePath) else path
    return len({left_coset_key(g, spec) for g in vs})
