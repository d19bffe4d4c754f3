"""Local rules on {0,1}-configurations of the Cayley tree.

A configuration assigns 0 or 1 to vertices.  Its zero set Z carries the
structure: a zero g is *clean* when Z near g is a simple path without short
horizontal doglegs close to g, and *locally good* when in addition the path
through g is long and every nearby zero is clean.  Edge weights are read off
from the local picture around each end of an edge, and the support of the
weights splits into components, each the 1-neighbourhood of a path of locally
good zeros.  Classification sorts a configuration, seen from the identity,
into C0 (no weight at the identity) or one of three families according to
how many ends of its central path are good.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InsufficientDomain, InvalidParameters, MalformedComponent, NoIsomorphism
from .params import RuleParams
from .quotient import WeightedGraph, build_quotient_graph
from .words import (
    IDENTITY,
    LETTERS,
    TreePath,
    ball,
    ball_size,
    distance,
    dogleg_segments,
    format_word,
    invert,
    inverse_letter,
    multiply,
    neighbourhood,
    neighbours,
    parse_word,
    step_letter,
    word_key,
)

C0 = "C0"
OMEGA_11 = "Omega11"
OMEGA_12 = "Omega12"
OMEGA_22 = "Omega22"
UNDETERMINED = "UNDETERMINED"
LABEL_CASE = {OMEGA_11: "11", OMEGA_12: "12", OMEGA_22: "22"}


class Configuration:
    """A {0,1}-configuration known on a set of vertices.

    With ``fill=1`` every vertex outside ``values`` has value 1, so the
    configuration is defined everywhere and has the finite zero set listed in
    ``values``.  Without fill the configuration is known only on the keys of
    ``values`` and evaluations that need more raise InsufficientDomain.
    """

    def __init__(self, values: Mapping[str, int], fill: int | None = None):
        if fill not in (None, 1):
            raise InvalidParameters("fill must be None or 1")
        vals = {}
        for g, v in values.items():
            if v not in (0, 1):
                raise InvalidParameters(f"value at {format_word(g)} must be 0 or 1")
            vals[g] = int(v)
        self.values = vals
        self.fill = fill
        self.zeros = frozenset(g for g, v in vals.items() if v == 0)
        self._depth: dict[str, int] | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.fill == other.fill and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.fill, frozenset(self.values.items())))

    @classmethod
    def from_zeros(cls, zeros: Iterable[str]) -> Configuration:
        """The configuration that is 0 exactly on ``zeros``."""
        return cls({z: 0 for z in zeros}, fill=1)

    @classmethod
    def on_ball(cls, center: str, radius: int, zeros: Iterable[str] = ()) -> Configuration:
        zs = set(zeros)
        return cls({g: 0 if g in zs else 1 for g in ball(center, radius)})

    def value(self, g: str) -> int:
        v = self.values.get(g)
        if v is not None:
            return v
        if self.fill is not None:
            return self.fill
        raise InsufficientDomain(f"no value at {format_word(g)}")

    def _depths(self) -> dict[str, int]:
        # distance to the outside of the domain, minus one
        if self._depth is None:
            dom = self.values
            depth: dict[str, int] = {}
            frontier = [g for g in dom if any(h not in dom for h in neighbours(g))]
            for g in frontier:
                depth[g] = 0
            queue = deque(frontier)
            while queue:
                g = queue.popleft()
                for h in neighbours(g):
                    if h in dom and h not in depth:
                        depth[h] = depth[g] + 1
                        queue.append(h)
            self._depth = depth
        return self._depth

    def knows_ball(self, g: str, r: int) -> bool:
        if self.fill is not None:
            return True
        if g not in self.values:
            return False
        return self._depths().get(g, 1 << 60) >= r

    def require_ball(self, g: str, r: int) -> None:
        if not self.knows_ball(g, r):
            raise InsufficientDomain(f"B({format_word(g)}, {r}) is not inside the domain")

    def zeros_in_ball(self, g: str, r: int) -> list[str]:
        self.require_ball(g, r)
        if ball_size(r) < len(self.zeros):
            return [h for h in ball(g, r) if h in self.zeros]
        return [z for z in self.zeros if distance(z, g) <= r]

    def shifted(self, g: str) -> Configuration:
        """The configuration h -> chi(g h), seen from g."""
        gi = invert(g)
        return Configuration({multiply(gi, h): v for h, v in self.values.items()}, self.fill)

    def to_json(self) -> dict:
        keys = sorted(self.values, key=word_key)
        if self.fill == 1:
            return {"fill": 1, "zeros": [format_word(z) for z in keys if self.values[z] == 0]}
        return {"values": {format_word(g): self.values[g] for g in keys}}

    @classmethod
    def from_json(cls, data: Mapping) -> Configuration:
        if "zeros" in data:
            if data.get("fill", 1) != 1:
                raise InvalidParameters("zero lists need fill 1")
            return cls.from_zeros(parse_word(z) for z in data["zeros"])
        if "values" in data:
            return cls({parse_word(k): int(v) for k, v in data["values"].items()}, data.get("fill"))
        raise InvalidParameters("configuration needs 'zeros' or 'values'")


def order_as_path(vertices: Iterable[str]) -> tuple[str, ...] | None:
    """Order a vertex set along a simple path, or return None if it is not one."""
    vs = set(vertices)
    if not vs:
        return ()
    adj = {g: [h for h in neighbours(g) if h in vs] for g in vs}
    if any(len(n) > 2 for n in adj.values()):
        return None
    ends = sorted((g for g in vs if len(adj[g]) <= 1), key=word_key)
    if not ends:
        return None
    out = [ends[0]]
    prev = None
    cur = ends[0]
    while True:
        nxt = [h for h in adj[cur] if h != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        out.append(cur)
    if len(out) != len(vs):
        return None
    return tuple(out)


@dataclass(frozen=True)
class Component:
    """A connected component of the support of the edge weights."""

    vertices: frozenset[str]
    central: TreePath
    missing: frozenset[str]  # isolated neighbours of good ends

    def to_json(self) -> dict:
        return {
            "central": self.central.serialize(),
            "vertex_count": len(self.vertices),
            "missing": sorted(format_word(g) for g in self.missing),
        }


class RuleEvaluator:
    """Evaluates the local rules on one configuration, with caching."""

    def __init__(self, cfg: Configuration, params: RuleParams):
        self.cfg = cfg
        self.p = params
        self._path: dict[str, tuple[str, ...] | None] = {}
        self._clean: dict[str, bool] = {}
        self._good: dict[str, bool] = {}
        self._fcirc: dict[tuple[str, str], Fraction] = {}
        self._comp: dict[str, Component | None] = {}

    # -- local structure

    def ball_path(self, g: str) -> tuple[str, ...] | None:
        """Zeros within rho of g, ordered along a path, or None if not a path."""
        if g not in self._path:
            self._path[g] = order_as_path(self.cfg.zeros_in_ball(g, self.p.rho))
        return self._path[g]

    def is_clean(self, g: str) -> bool:
        if g not in self._clean:
            path = self.ball_path(g)
            ok = path is not None
            if ok and len(path) > 1:
                steps = "".join(step_letter(u, v) for u, v in zip(path, path[1:]))
                inner = self.p.rho - 1
                for i, j in dogleg_segments(steps, self.p.d):
                    if all(distance(path[k], g) <= inner for k in range(i, j + 1)):
                        ok = False
                        break
            self._clean[g] = ok
        return self._clean[g]

    def is_locally_good(self, g: str) -> bool:
        if g not in self._good:
            ok = self.cfg.value(g) == 0
            if ok:
                path = self.ball_path(g)
                ok = path is not None and len(path) - 1 >= self.p.rho and self.is_clean(g)
                if ok:
                    ok = all(self.is_clean(z) for z in path)
            self._good[g] = ok
        return self._good[g]

    # -- weights

    def f_circ(self, s: str, g: str = IDENTITY) -> Fraction:
        """Weight proposed at g for the edge from g to g s, before the size cut."""
        key = (s, g)
        if key in self._fcirc:
            return self._fcirc[key]
        val = Fraction(0)
        if self.cfg.value(g) == 0:
            if self.is_locally_good(g):
                path = self.ball_path(g)
                pos = {v: i for i, v in enumerate(path)}
                last = len(path) - 1
                i = pos[g]
                g_inner = 0 < i < last
                gs = multiply(g, s)
                if gs in pos:
                    j = pos[gs]
                    if g_inner and 0 < j < last:
                        val = Fraction(1)
                    elif g_inner:
                        val = Fraction(2)
                else:
                    s_inv = inverse_letter(s)
                    if any(multiply(g, t) in pos for t in LETTERS if t not in (s, s_inv)):
                        val = Fraction(2)
            elif self.is_locally_good(multiply(g, s)):
                val = self.p.bad_weight
        self._fcirc[key] = val
        return val

    def in_support(self, g: str) -> bool:
        """Whether g touches an edge with a nonzero proposed weight."""
        for s in LETTERS:
            if self.f_circ(s, g) or self.f_circ(inverse_letter(s), multiply(g, s)):
                return True
        return False

    def component(self, g: str) -> Component | None:
        """The support component containing g, or None if g is outside the support.

        Components follow edges with a nonzero proposed weight.
        """
        if g in self._comp:
            return self._comp[g]
        if not self.in_support(g):
            self._comp[g] = None
            return None
        seen = {g}
        queue = deque([g])
        while queue:
            x = queue.popleft()
            for s in LETTERS:
                y = multiply(x, s)
                if y not in seen and (self.f_circ(s, x) or self.f_circ(inverse_letter(s), y)):
                    seen.add(y)
                    queue.append(y)
        comp = self._shape(frozenset(seen))
        for x in seen:
            self._comp[x] = comp
        return comp

    def _shape(self, verts: frozenset[str]) -> Component:
        good = [x for x in verts if self.cfg.value(x) == 0 and self.is_locally_good(x)]
        order = order_as_path(good)
        if not order:
            raise MalformedComponent("component has no path of locally good zeros")
        ball1 = neighbourhood(order, 1)
        missing = frozenset(ball1 - verts)
        if not verts <= ball1:
            raise MalformedComponent("component reaches beyond the central path")
        ends = {order[0], order[-1]}
        if len(missing) > 2 or any(not any(multiply(m, s) in ends for s in LETTERS) for m in missing):
            raise MalformedComponent("component misses more than the ends' opposite neighbours")
        if len(order) > 1 and word_key(order[-1]) < word_key(order[0]):
            order = order[::-1]
        return Component(verts, TreePath.from_vertices(order), missing)

    def in_w(self, g: str) -> bool:
        comp = self.component(g)
        return comp is not None and comp.central.vertex_count >= self.p.min_central_vertices

    def f(self, s: str, g: str = IDENTITY) -> Fraction:
        """The proposed weight at g for the edge g -- g s, after the size cut."""
        val = self.f_circ(s, g)
        if val and not self.in_w(g):
            return Fraction(0)
        return val

    def edge_weight(self, g: str, h: str) -> Fraction:
        s = step_letter(g, h)
        return self.f(s, g) + self.f(inverse_letter(s), h)


def f_circ(s: str, cfg: Configuration, params: RuleParams) -> Fraction:
    return RuleEvaluator(cfg, params).f_circ(s)


def f_s(s: str, cfg: Configuration, params: RuleParams) -> Fraction:
    return RuleEvaluator(cfg, params).f(s)


def g_s(s: str, cfg: Configuration, params: RuleParams) -> Fraction:
    """The companion weight: f for the inverse generator."""
    return RuleEvaluator(cfg, params).f(inverse_letter(s))


def locally_good(cfg: Configuration, params: RuleParams, g: str = IDENTITY) -> bool:
    return RuleEvaluator(cfg, params).is_locally_good(g)


def edge_weight(g: str, h: str, cfg: Configuration, params: RuleParams) -> Fraction:
    return RuleEvaluator(cfg, params).edge_weight(g, h)


def support_components(cfg: Configuration, params: RuleParams) -> list[Component]:
    """All support components of a configuration with finitely many zeros."""
    if cfg.fill != 1:
        raise InvalidParameters("support components need a padded configuration")
    ev = RuleEvaluator(cfg, params)
    comps: dict[frozenset[str], Component] = {}
    for g in sorted(neighbourhood(cfg.zeros, 1), key=word_key):
        c = ev.component(g)
        if c is not None:
            comps[c.vertices] = c
    return sorted(comps.values(), key=lambda c: word_key(c.central.base))


# ------------------------------------------------------------ classification


@dataclass(frozen=True)
class ClassificationResult:
    label: str
    inner: TreePath | None = None
    outer: TreePath | None = None
    psi_zeros: frozenset[str] = field(default_factory=frozenset)
    reason: str = ""

    @property
    def good_ends(self) -> int | None:
        return {OMEGA_11: 2, OMEGA_12: 1, OMEGA_22: 0}.get(self.label)

    @property
    def case(self) -> str | None:
        return LABEL_CASE.get(self.label)

    def triple(self) -> tuple[TreePath, TreePath, frozenset[str]] | None:
        if self.inner is None or self.outer is None:
            return None
        return (self.inner, self.outer, self.psi_zeros)

    def vertex_triple(self) -> tuple[frozenset[str], frozenset[str], frozenset[str]] | None:
        """Orientation-free form of the triple, for comparisons."""
        if self.inner is None or self.outer is None:
            return None
        return (frozenset(self.inner.vertices), frozenset(self.outer.vertices), self.psi_zeros)

    def cylinder(self, params: RuleParams) -> dict[str, int]:
        """The values fixed by the triple: 0 on R, psi on B(R, rho) minus R."""
        if self.outer is None:
            raise InvalidParameters("only finite labels have a cylinder")
        r = set(self.outer.vertices)
        out = {g: 1 for g in neighbourhood(r, params.rho)}
        for g in r | self.psi_zeros:
            out[g] = 0
        return out

    def to_json(self) -> dict:
        out: dict = {"label": self.label}
        if self.inner is not None and self.outer is not None:
            out["inner"] = self.inner.serialize()
            out["outer"] = self.outer.serialize()
            out["inner_vertex_count"] = self.inner.vertex_count
            out["psi_zeros"] = sorted((format_word(z) for z in self.psi_zeros), key=lambda w: word_key(parse_word(w)))
        if self.reason:
            out["reason"] = self.reason
        return out


def is_c0(ev: RuleEvaluator) -> bool:
    for s in LETTERS:
        if ev.f(s) or ev.f(inverse_letter(s), s):
            return False
    return True


def classify(cfg: Configuration, params: RuleParams) -> ClassificationResult:
    ev = RuleEvaluator(cfg, params)
    try:
        return _classify(ev)
    except InsufficientDomain as exc:
        return ClassificationResult(UNDETERMINED, reason=str(exc))


def _next_zero(ev: RuleEvaluator, cur: str, prev: str | None) -> str | None:
    path = ev.ball_path(cur)
    i = path.index(cur)
    cands = [path[k] for k in (i - 1, i + 1) if 0 <= k < len(path) and path[k] != prev]
    return cands[0] if cands else None


def _walk(ev: RuleEvaluator, start: str, first: str | None) -> tuple[list[str], str | None]:
    """Follow locally good zeros from ``start`` through ``first``.

    Returns the good vertices passed (not including start) and the first
    zero that is not locally good, or None if the walk ended at an end of Z.
    """
    run: list[str] = []
    prev, cur, nxt = None, start, first
    while nxt is not None:
        if not ev.is_locally_good(nxt):
            return run, nxt
        run.append(nxt)
        prev, cur = cur, nxt
        nxt = _next_zero(ev, cur, prev)
    return run, None


def _extension(ev: RuleEvaluator, end: str, n: str) -> list[str]:
    """n followed by up to rho further zeros along Z, walking away from ``end``."""
    path = ev.ball_path(n)
    if path is None:
        raise MalformedComponent("the zero after a bad end is not clean")
    i = path.index(n)
    j = path.index(end)
    step = i - j
    out = [n]
    k = i + step
    while 0 <= k < len(path) and len(out) <= ev.p.rho:
        out.append(path[k])
        k += step
    return out


def _classify(ev: RuleEvaluator) -> ClassificationResult:
    p = ev.p
    if is_c0(ev):
        return ClassificationResult(C0)
    if ev.is_locally_good(IDENTITY):
        g0 = IDENTITY
    else:
        goods = [s for s in LETTERS if ev.cfg.value(s) == 0 and ev.is_locally_good(s)]
        if len(goods) != 1:
            raise MalformedComponent("expected exactly one locally good neighbour of the identity")
        g0 = goods[0]
    path0 = ev.ball_path(g0)
    i0 = path0.index(g0)
    firsts = [path0[k] if 0 <= k < len(path0) else None for k in (i0 - 1, i0 + 1)]
    left_run, left_bad = _walk(ev, g0, firsts[0])
    right_run, right_bad = _walk(ev, g0, firsts[1])
    inner = left_run[::-1] + [g0] + right_run
    left_ext = _extension(ev, inner[0], left_bad) if left_bad is not None else []
    right_ext = _extension(ev, inner[-1], right_bad) if right_bad is not None else []
    outer = left_ext[::-1] + inner + right_ext
    good_ends = (left_bad is None) + (right_bad is None)

    # orientation: a good end first when exactly one end is good, else the smaller end
    if good_ends == 1:
        flip = left_bad is not None
    else:
        flip = word_key(inner[-1]) < word_key(inner[0])
    if flip:
        inner = inner[::-1]
        outer = outer[::-1]

    rset = set(outer)
    psi = set()
    for r in outer:
        psi.update(ev.cfg.zeros_in_ball(r, p.rho))
    psi -= rset
    label = {2: OMEGA_11, 1: OMEGA_12, 0: OMEGA_22}[good_ends]
    return ClassificationResult(
        label,
        TreePath.from_vertices(inner),
        TreePath.from_vertices(outer),
        frozenset(psi),
    )


# ------------------------------------------------------------ quotient check


def rule_graph(cfg: Configuration, params: RuleParams, vertices: Iterable[str]) -> WeightedGraph:
    """Nonzero rule weights on edges inside ``vertices``."""
    ev = RuleEvaluator(cfg, params)
    vs = sorted(set(vertices), key=word_key)
    vset = set(vs)
    weights = {}
    for g in vs:
        for s in LETTERS:
            h = multiply(g, s)
            if h in vset and word_key(g) < word_key(h):
                w = ev.edge_weight(g, h)
                if w:
                    weights[frozenset((g, h))] = w
    used = {v for e in weights for v in e}
    return WeightedGraph(tuple(v for v in vs if v in used), weights)


def check_rule_isomorphism(
    result: ClassificationResult, cfg: Configuration, params: RuleParams
) -> dict:
    """Match the rule graph near the central path with the model quotient graph.

    Returns the vertex map from model vertices to tree vertices.  Vertices of
    B(P, 1) with no nonzero edge are dropped.  Raises NoIsomorphism if a
    weight differs, an edge is unmatched, or weight leaks out of B(P, 1).
    """
    if result.case is None or result.inner is None:
        raise InvalidParameters("needs a classification with a finite label")
    ev = RuleEvaluator(cfg, params)
    inner = result.inner.vertices
    ell = len(inner)
    region = neighbourhood(inner, 1)
    model = build_quotient_graph(ell, result.case, params)
    outer = result.outer.vertices
    i_first = outer.index(inner[0])
    before = outer[i_first - 1] if i_first > 0 else None
    after = outer[i_first + ell] if i_first + ell < len(outer) else None

    mapping: dict = {}
    for i, g in enumerate(inner, start=1):
        mapping[("v", i)] = g
        taken = {inner[k] for k in (i - 2, i) if 0 <= k < ell}
        if i == 1 and before is not None:
            mapping[("bad", 1)] = before
            taken.add(before)
        if i == ell and after is not None:
            mapping[("bad", ell)] = after
            taken.add(after)
        offs = sorted((h for h in neighbours(g) if h not in taken), key=word_key)
        offs = [h for h in offs if ev.edge_weight(g, h)]
        if len(offs) != 2:
            raise NoIsomorphism(f"vertex {format_word(g)} has {len(offs)} weighted side neighbours")
        mapping[("leaf", i, 1)], mapping[("leaf", i, 2)] = offs
    if set(mapping) != set(model.vertices):
        raise NoIsomorphism("end types differ from the model")
    if len(set(mapping.values())) != len(mapping):
        raise NoIsomorphism("vertex map is not injective")

    for e, w in model.weights.items():
        u, v = tuple(e)
        got = ev.edge_weight(mapping[u], mapping[v])
        if got != w:
            raise NoIsomorphism(
                f"weight {got} on {format_word(mapping[u])}--{format_word(mapping[v])}, model has {w}"
            )
    image = {frozenset((mapping[u], mapping[v])) for e in model.weights for u, v in [tuple(e)]}
    for g in region:
        for h in neighbours(g):
            if frozenset((g, h)) in image:
                continue
            if ev.edge_weight(g, h):
                raise NoIsomorphism(f"unmatched weight on {format_word(g)}--{format_word(h)}")
    return mapping
