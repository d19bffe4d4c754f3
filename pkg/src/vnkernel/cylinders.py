"""Parity-invariant configurations and admissible-cylinder counting.

A configuration x : F2 -> {0, 1} is invariant when the horizontal window
parity  sum_{|i| <= h} x(g a^i)  is constant on every left coset g H of the
subgroup H.  Equivalently, for each generator t_n the windows at g and g t_n
have equal parity, which gives one GF(2) row: the symmetric difference of
the two windows.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from . import gf2
from .errors import InconsistentInput, InvalidParameters
from .params import RuleParams
from .subgroups import (
    SubgroupSpec,
    coset_cell_count,
    coset_partition,
    generator,
    left_coset_key,
)
from .words import (
    TreePath,
    distance_to_connected,
    invert,
    is_connected,
    multiply,
    neighbourhood,
    neighbours,
    path_ball_size,
    power,
    word_key,
)


@lru_cache(maxsize=1 << 20)
def window(g: str, halfwidth: int) -> tuple[str, ...]:
    """The horizontal window g a^i, |i| <= halfwidth, from left to right."""
    left = []
    x = g
    for _ in range(halfwidth):
        x = x[:-1] if x and x[-1] == "a" else x + "A"
        left.append(x)
    out = left[::-1]
    out.append(g)
    x = g
    for _ in range(halfwidth):
        x = x[:-1] if x and x[-1] == "A" else x + "a"
        out.append(x)
    return tuple(out)


class BinaryConstraintSystem:
    """GF(2) rows over an ordered coordinate list, rows as bitmasks."""

    def __init__(self, coordinates: Iterable[str]):
        self.coordinates = tuple(sorted(set(coordinates)))
        self.index = {c: i for i, c in enumerate(self.coordinates)}
        self.rows: list[int] = []

    def mask(self, vertices: Iterable[str]) -> int:
        m = 0
        for v in vertices:
            m ^= 1 << self.index[v]
        return m

    def rank(self) -> int:
        return gf2.rank(self.rows)

    def to_json(self) -> dict:
        return {
            "coordinates": [c or "e" for c in self.coordinates],
            "rows": [hex(r) for r in self.rows],
        }


def _generators_both_signs(spec: SubgroupSpec) -> list[str]:
    gens = [generator(n, spec.lengths) for n in spec.sorted_indices]
    return gens + [invert(t) for t in gens]


def generator_rows(spec: SubgroupSpec, region: Iterable[str], params: RuleParams) -> BinaryConstraintSystem:
    """All generator constraints whose two windows lie inside ``region``."""
    sys = BinaryConstraintSystem(region)
    h = params.halfwidth
    inside = set(sys.coordinates)
    gens = _generators_both_signs(spec)
    seen = set()
    for x in sys.coordinates:
        wx = window(x, h)
        if not inside.issuperset(wx):
            continue
        mx = sys.mask(wx)
        for t in gens:
            wy = window(_right_mul(x, t), h)
            if not inside.issuperset(wy):
                continue
            row = mx ^ sys.mask(wy)
            if row and row not in seen:
                seen.add(row)
                sys.rows.append(row)
    return sys


@lru_cache(maxsize=1 << 20)
def _right_mul(x: str, t: str) -> str:
    return multiply(x, t)


def orbit_envelope(
    domain: Iterable[str],
    spec: SubgroupSpec,
    params: RuleParams,
    core: Iterable[str] | None = None,
) -> frozenset[str]:
    """Region whose generator rows capture every constraint on ``domain``.

    Start from window centres whose windows lie in the domain and close them
    under right multiplication by generators and their inverses.  If x^-1 y
    lies in the subgroup, its reduced word is a product of syllables
    b^l(n) a^k B^l(n), and every partial product along the chain from x to y
    is q B^l(n) with q on the geodesic from x to y.

    With ``core`` given (a connected set such as a path, containing every
    centre) the closure keeps exactly the points y with y b^l(n) in the core
    for some n.  Without it the closure keeps points within max l(n) of the
    domain, which is coarser but needs no structure.
    """
    dom = set(domain)
    h = params.halfwidth
    if core is not None:
        # y b^l in core  <=>  y in core B^l
        drops = ["B" * spec.lengths[n] for n in spec.sorted_indices]
        close = {multiply(c, u) for c in core for u in drops}.__contains__

    else:
        lmax = spec.max_length
        if is_connected(dom):
            anchor = next(iter(dom))

            def close(y: str) -> bool:
                return y in dom or distance_to_connected(y, dom, anchor, lmax) <= lmax

        else:
            close = neighbourhood(dom, lmax).__contains__
    gens = _generators_both_signs(spec)
    centres = [x for x in dom if dom.issuperset(window(x, h))]
    seen = set(centres)
    far: set[str] = set()
    queue = deque(centres)
    while queue:
        x = queue.popleft()
        for t in gens:
            y = _right_mul(x, t)
            if y in seen or y in far:
                continue
            if not close(y):
                far.add(y)
                continue
            seen.add(y)
            queue.append(y)
    env = set(dom)
    for x in seen:
        env.update(window(x, h))
    return frozenset(env)


def neighbourhood_envelope(domain: Iterable[str], spec: SubgroupSpec, params: RuleParams) -> frozenset[str]:
    """The plain metric envelope B(domain, 2 max l(n) + 2 h + 2)."""
    r = 2 * spec.max_length + 2 * params.halfwidth + 2
    return frozenset(neighbourhood(domain, r))


def cylinder_nonempty(
    phi: Mapping[str, int],
    spec: SubgroupSpec,
    envelope: Iterable[str] | None,
    params: RuleParams,
) -> bool:
    """Whether phi extends over the envelope satisfying every generator row there."""
    env = set(envelope) if envelope is not None else set(orbit_envelope(phi, spec, params))
    if not set(phi) <= env:
        raise InvalidParameters("envelope must contain the domain of phi")
    sys = generator_rows(spec, env, params)
    unknown = [c for c in sys.coordinates if c not in phi]
    uidx = {c: i for i, c in enumerate(unknown)}
    ech = gf2.GF2Echelon()
    for row in sys.rows:
        mask = 0
        rhs = 0
        r = row
        while r:
            low = r & -r
            v = sys.coordinates[low.bit_length() - 1]
            if v in phi:
                rhs ^= phi[v] & 1
            else:
                mask |= 1 << uidx[v]
            r ^= low
        ech.add(mask, rhs)
        if not ech.consistent:
            return False
    return True


def window_sum_criterion(path: TreePath, phi: Mapping[str, int], spec: SubgroupSpec, params: RuleParams) -> bool:
    """Window parity is constant on every coset cell of the path."""
    h = params.halfwidth
    for cell in coset_partition(path, spec).cells:
        sums = {sum(phi[v] for v in window(g, h)) & 1 for g in cell}
        if len(sums) > 1:
            return False
    return True


def admissible_exponent(path: TreePath, spec: SubgroupSpec, params: RuleParams) -> int:
    """log2 of the number of admissible fillings of B(P, rho): |B(P,rho)| - l + cells."""
    ell = path.vertex_count
    return path_ball_size(ell, params.rho) - ell + coset_cell_count(path, spec)


def count_admissible(path: TreePath, spec: SubgroupSpec, params: RuleParams) -> int:
    return 1 << admissible_exponent(path, spec, params)


def count_admissible_bruteforce(path: TreePath, spec: SubgroupSpec, params: RuleParams) -> int:
    """Count admissible fillings of B(P, rho) by linear algebra on the envelope.

    The admissible fillings are the projections onto D = B(P, rho) of
    solutions of the generator rows M on the orbit envelope.  The projected
    space has dimension |D| - rank(M) + rank(M with the D columns deleted),
    since the rows supported inside D span a space of dimension
    rank(M) - rank(M off D).
    """
    return 1 << len(neighbourhood(path.vertices, params.rho)) - constraint_comparison(path, spec, params).constraint_rank


@dataclass(frozen=True)
class ConstraintComparison:
    """Window-sum criterion rows against the brute-force constraint space on B(P, rho)."""

    criterion_rank: int
    constraint_rank: int
    criterion_implied: bool
    envelope_size: int

    @property
    def equivalent(self) -> bool:
        return self.criterion_implied and self.criterion_rank == self.constraint_rank


def constraint_comparison(path: TreePath, spec: SubgroupSpec, params: RuleParams) -> ConstraintComparison:
    """Compare the criterion with every GF(2) consequence supported on B(P, rho).

    The constraint space is the set of row combinations of the envelope
    system that vanish off B(P, rho); its dimension is
    rank(M) - rank(M with the B(P, rho) columns deleted).  The criterion and
    the brute-force system accept the same patterns on B(P, rho) iff the
    criterion rows lie in the row space and span a space of that dimension.
    """
    return constraint_comparisons(path, [spec], params)[0]


def constraint_comparisons(
    path: TreePath, specs: Iterable[SubgroupSpec], params: RuleParams
) -> list[ConstraintComparison]:
    """constraint_comparison for several subgroups, sharing the path geometry."""
    verts = path.vertices
    dom = neighbourhood(verts, params.rho)
    h = params.halfwidth
    out = []
    for spec in specs:
        env = orbit_envelope(dom, spec, params, core=verts)
        sys = generator_rows(spec, env, params)
        off = ~sys.mask(dom)
        full = gf2.rank(sys.rows)
        constraint = full - gf2.rank(r & off for r in sys.rows)
        crit = []
        first: dict = {}
        for g in verts:
            key = left_coset_key(g, spec)
            w = sys.mask(window(g, h))
            if key in first:
                crit.append(first[key] ^ w)
            else:
                first[key] = w
        implied = gf2.rank(sys.rows + crit) == full
        out.append(ConstraintComparison(gf2.rank(crit), constraint, implied, len(env)))
    return out


def equipartition_check(rows: Iterable[int], nbits: int, coords: Iterable[int]) -> bool:
    """The orthogonal complement of the row space restricts evenly onto ``coords``.

    Every restriction pattern that occurs at all occurs equally often.
    """
    basis = gf2.nullspace_basis(list(rows), nbits)
    cmask = 0
    for c in coords:
        cmask |= 1 << c
    counts: dict[int, int] = {}
    for x in gf2.span(basis):
        k = x & cmask
        counts[k] = counts.get(k, 0) + 1
    return len(set(counts.values())) <= 1


def _check_domain_consistent(values: Mapping[str, int], spec: SubgroupSpec, h: int) -> dict:
    parity: dict = {}
    for x in values:
        wx = window(x, h)
        if not all(v in values for v in wx):
            continue
        s = sum(values[v] for v in wx) & 1
        key = left_coset_key(x, spec)
        if parity.setdefault(key, s) != s:
            raise InconsistentInput(f"window parities disagree on the coset of {x or 'e'}")
    return parity


def extend_configuration(
    phi: Mapping[str, int], spec: SubgroupSpec, target: Iterable[str], params: RuleParams
) -> dict[str, int]:
    """Extend an admissible pattern on a connected domain to ``target``.

    Vertices are added one at a time in breadth-first order from the domain.
    Whenever the new vertex completes a window whose coset already has a
    parity, the vertex value is forced; otherwise it is set to 1.  Raises
    InconsistentInput if phi itself breaks a coset-parity constraint.
    """
    h = params.halfwidth
    values = {g: v & 1 for g, v in phi.items()}
    tgt = set(target)
    if not values:
        raise InvalidParameters("phi must be non-empty")
    if not is_connected(values):
        raise InvalidParameters("the domain of phi must be connected")
    if not set(values) <= tgt:
        raise InvalidParameters("target must contain the domain of phi")
    if not is_connected(tgt):
        raise InvalidParameters("target must be connected")
    parity = _check_domain_consistent(values, spec, h)

    order = []
    seen = set(values)
    queue = deque(sorted(values, key=word_key))
    while queue:
        g = queue.popleft()
        for y in neighbours(g):
            if y in tgt and y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)

    for v in order:
        forced: set[int] = set()
        completed = []
        for i in range(-h, h + 1):
            x = multiply(v, power("a", -i))
            wx = window(x, h)
            if all(u in values or u == v for u in wx):
                partial = sum(values[u] for u in wx if u != v) & 1
                key = left_coset_key(x, spec)
                completed.append((key, partial))
                if key in parity:
                    forced.add(parity[key] ^ partial)
        if len(forced) > 1:
            raise InconsistentInput(f"no consistent value at {v or 'e'}")
        val = forced.pop() if forced else 1
        values[v] = val
        for key, partial in completed:
            s = partial ^ val
            if parity.setdefault(key, s) != s:
                raise InconsistentInput(f"no consistent value at {v or 'e'}")
    return values


def infinite_path_mass_bound(n: int, params: RuleParams) -> Fraction:
    """Bound 3^n 2^n 2^(-2 * 3^(rho-1) * (n - rho)) on the mass of long path patterns."""
    rho = params.rho
    e = 2 * 3 ** (rho - 1) * (n - rho)
    val = Fraction(3**n * 2**n)
    return val / (1 << e) if e >= 0 else val * (1 << -e)
