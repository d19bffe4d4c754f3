"""Reduced words in the free group on two generators and their Cayley tree.

Letters: ``a`` and ``A`` are the first generator and its inverse (horizontal
edges), ``b`` and ``B`` the second generator and its inverse (vertical edges).
The identity is the empty string internally and ``"e"`` in serialized form.
Words are ordered by length first and then lexicographically with the letter
order a < A < b < B.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

LETTERS = "aAbB"
HORIZONTAL = frozenset("aA")
IDENTITY = ""

_INV_TABLE = str.maketrans("aAbB", "AaBb")
_RANK = {c: i for i, c in enumerate(LETTERS)}


_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def inverse_letter(c: str) -> str:
    return _INV[c]


def is_reduced(w: str) -> bool:
    if any(c not in _RANK for c in w):
        return False
    return all(w[i + 1] != inverse_letter(w[i]) for i in range(len(w) - 1))


def reduce(letters: Iterable[str]) -> str:
    """Freely reduce a sequence of letters."""
    out: list[str] = []
    for c in letters:
        if c not in _RANK:
            raise ValueError(f"bad letter {c!r}")
        if out and out[-1] == inverse_letter(c):
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def invert(w: str) -> str:
    return w[::-1].translate(_INV_TABLE)


def multiply(u: str, v: str) -> str:
    """Product of two reduced words."""
    if not u or not v or u[-1] != _INV[v[0]]:
        return u + v
    k = 1
    n = min(len(u), len(v))
    while k < n and u[-1 - k] == _INV[v[k]]:
        k += 1
    return u[: len(u) - k] + v[k:]


def power(letter: str, n: int) -> str:
    """``letter`` raised to the integer power ``n`` as a reduced word."""
    return letter * n if n >= 0 else inverse_letter(letter) * (-n)


def common_prefix(u: str, v: str) -> int:
    k = 0
    n = min(len(u), len(v))
    while k < n and u[k] == v[k]:
        k += 1
    return k


def distance(u: str, v: str) -> int:
    """Graph distance between two vertices of the Cayley tree."""
    return len(u) + len(v) - 2 * common_prefix(u, v)


def word_key(w: str) -> tuple[int, tuple[int, ...]]:
    """Sort key: shortlex with a < A < b < B."""
    return (len(w), tuple(_RANK[c] for c in w))


def lex_key(w: str) -> tuple[int, ...]:
    """Pure lexicographic key (no length first) with a < A < b < B."""
    return tuple(_RANK[c] for c in w)


def format_word(w: str) -> str:
    return w if w else "e"


def parse_word(s: str) -> str:
    s = s.strip()
    if s in ("", "e", "1"):
        return IDENTITY
    if any(c not in _RANK for c in s):
        raise ValueError(f"not a word over aAbB: {s!r}")
    return reduce(s)


def neighbours(g: str) -> list[str]:
    return [multiply(g, s) for s in LETTERS]


def step_letter(u: str, v: str) -> str:
    """The generator s with v = u s, for adjacent vertices u and v."""
    if len(v) == len(u) + 1 and v.startswith(u):
        return v[-1]
    if len(u) == len(v) + 1 and u.startswith(v):
        return inverse_letter(u[-1])
    raise ValueError(f"{format_word(u)} and {format_word(v)} are not adjacent")


@lru_cache(maxsize=64)
def _ball_words(r: int) -> tuple[str, ...]:
    out = [IDENTITY]
    frontier = [IDENTITY]
    for _ in range(r):
        nxt = []
        for w in frontier:
            last = w[-1] if w else None
            for c in LETTERS:
                if last is not None and c == inverse_letter(last):
                    continue
                nxt.append(w + c)
        out.extend(nxt)
        frontier = nxt
    return tuple(out)


def ball(center: str, r: int) -> list[str]:
    """All vertices within distance r of ``center``."""
    if r < 0:
        return []
    return [multiply(center, w) for w in _ball_words(r)]


def ball_size(r: int) -> int:
    return 2 * 3**r - 1 if r >= 0 else 0


def sphere(center: str, r: int) -> list[str]:
    return [multiply(center, w) for w in _ball_words(r) if len(w) == r]


def neighbourhood(vertices: Iterable[str], r: int) -> set[str]:
    """The closed r-neighbourhood of a vertex set (multi-source search)."""
    seen = set(vertices)
    frontier = list(seen)
    for _ in range(r):
        nxt = []
        for g in frontier:
            for s in LETTERS:
                h = multiply(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def boundary(vertices: Iterable[str]) -> set[str]:
    """Vertices at distance exactly one from the set."""
    vs = set(vertices)
    return {h for g in vs for s in LETTERS if (h := multiply(g, s)) not in vs}


def path_ball_size(num_vertices: int, r: int) -> int:
    """Size of the r-neighbourhood of a path with ``num_vertices`` vertices."""
    if num_vertices < 1:
        raise ValueError("a path has at least one vertex")
    return num_vertices * 3**r - 1 + 3**r


def is_connected(vertices: Iterable[str]) -> bool:
    vs = set(vertices)
    if not vs:
        return True
    start = next(iter(vs))
    seen = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for h in neighbours(g):
            if h in vs and h not in seen:
                seen.add(h)
                queue.append(h)
    return len(seen) == len(vs)


def distance_to_connected(y: str, vertices: set[str] | frozenset[str], anchor: str, limit: int) -> int:
    """Distance from y to a connected vertex set containing ``anchor``.

    In a tree the geodesic from y to any point of a connected set enters the
    set at its nearest point, so it suffices to walk towards the anchor.
    Returns ``limit + 1`` if the distance exceeds ``limit``.
    """
    cp = common_prefix(y, anchor)
    steps = 0
    for k in range(len(y), cp - 1, -1):
        if y[:k] in vertices:
            return steps
        steps += 1
        if steps > limit:
            return limit + 1
    for k in range(cp + 1, len(anchor) + 1):
        if anchor[:k] in vertices:
            return steps
        steps += 1
        if steps > limit:
            return limit + 1
    return limit + 1


# ---------------------------------------------------------------- paths


@dataclass(frozen=True)
class TreePath:
    """A simple path in the Cayley tree: a base vertex and a reduced step word."""

    base: str
    steps: str

    def __post_init__(self) -> None:
        if not is_reduced(self.base) or not is_reduced(self.steps):
            raise ValueError("base and steps must be reduced words")

    @property
    def vertices(self) -> tuple[str, ...]:
        out = [self.base]
        g = self.base
        for c in self.steps:
            g = multiply(g, c)
            out.append(g)
        return tuple(out)

    @property
    def vertex_count(self) -> int:
        return len(self.steps) + 1

    @property
    def end(self) -> str:
        return multiply(self.base, self.steps)

    def reversed(self) -> TreePath:
        return TreePath(self.end, invert(self.steps))

    def translate(self, g: str) -> TreePath:
        """Left translate by g."""
        return TreePath(multiply(g, self.base), self.steps)

    def canonical_steps(self) -> str:
        return canonical_steps(self.steps)

    def serialize(self) -> str:
        return f"{format_word(self.base)}:{self.steps}"

    @classmethod
    def parse(cls, text: str) -> TreePath:
        if ":" in text:
            base, steps = text.split(":", 1)
        else:
            base, steps = "e", text
        steps = steps.strip()
        if not is_reduced(steps):
            raise ValueError(f"step word must be reduced: {steps!r}")
        return cls(parse_word(base), steps)

    @classmethod
    def from_vertices(cls, vertices: list[str] | tuple[str, ...]) -> TreePath:
        if not vertices:
            raise ValueError("empty path")
        steps = "".join(step_letter(u, v) for u, v in zip(vertices, vertices[1:]))
        if not is_reduced(steps):
            raise ValueError("vertex sequence backtracks")
        return cls(vertices[0], steps)


def canonical_steps(steps: str) -> str:
    """Representative of a path up to translation and reversal."""
    rev = invert(steps)
    return min(steps, rev, key=lex_key)


_SWAP_H = str.maketrans("aA", "Aa")


def swap_horizontal(w: str) -> str:
    """Image under the automorphism exchanging a and A (fixing b)."""
    return w.translate(_SWAP_H)


def mirror_canonical_steps(steps: str) -> str:
    """Representative up to translation, reversal and the a/A exchange."""
    sw = swap_horizontal(steps)
    return min(steps, invert(steps), sw, invert(sw), key=lex_key)


def horizontal_runs(steps: str) -> list[tuple[int, int]]:
    """Maximal horizontal runs as (first vertex index, last vertex index)."""
    runs = []
    i = 0
    n = len(steps)
    while i < n:
        if steps[i] in HORIZONTAL:
            j = i
            while j < n and steps[j] in HORIZONTAL:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    return runs


def dogleg_segments(steps: str, d: int) -> list[tuple[int, int]]:
    """Horizontal runs of length 1..d that are not the whole path.

    These are exactly the main segments of small horizontal doglegs: a short
    run flanked by vertical steps, or a short run at an end of the path
    preceded or followed by a vertical step.
    """
    n = len(steps)
    return [(i, j) for i, j in horizontal_runs(steps) if 1 <= j - i <= d and j - i < n]


def has_small_horizontal_dogleg(path: TreePath | str, d: int = 9) -> bool:
    steps = path.steps if isinstance(path, TreePath) else path
    return bool(dogleg_segments(steps, d))


def dogleg_free_step_words(max_vertices: int, d: int) -> Iterator[str]:
    """All step words of dogleg-free paths with at most ``max_vertices`` vertices.

    Built as alternating straight runs: vertical runs of any positive length,
    horizontal runs of length at least d + 1 unless the path is one straight
    horizontal segment.
    """
    max_edges = max_vertices - 1
    if max_edges < 0:
        return
    yield ""
    for n in range(1, max_edges + 1):
        yield "a" * n
        yield "A" * n

    def extend(prefix: str, last_horizontal: bool, budget: int) -> Iterator[str]:
        if last_horizontal:
            for k in range(1, budget + 1):
                for c in "bB":
                    w = prefix + c * k
                    yield w
                    yield from extend(w, False, budget - k)
        else:
            for k in range(d + 1, budget + 1):
                for c in "aA":
                    w = prefix + c * k
                    yield w
                    yield from extend(w, True, budget - k)

    # start with a vertical run, or with a long horizontal run followed by more
    for k in range(1, max_edges + 1):
        for c in "bB":
            w = c * k
            yield w
            yield from extend(w, False, max_edges - k)
    for k in range(d + 1, max_edges + 1):
        for c in "aA":
            w = c * k
            yield from extend(w, True, max_edges - k)


def enumerate_dogleg_free_classes(max_vertices: int, d: int = 9, exact: bool = False) -> list[TreePath]:
    """One representative per translation/reversal class of dogleg-free paths.

    Representatives are based at the identity with canonical step words,
    sorted by vertex count and then lexicographically.  With ``exact`` only
    paths with exactly ``max_vertices`` vertices are returned.
    """
    reps = {canonical_steps(w) for w in dogleg_free_step_words(max_vertices, d)}
    if exact:
        reps = {w for w in reps if len(w) + 1 == max_vertices}
    return [TreePath(IDENTITY, w) for w in sorted(reps, key=word_key)]
