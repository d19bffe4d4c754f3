from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnkernel import gf2
from vnkernel.cylinders import (
    admissible_exponent,
    constraint_comparisons,
    count_admissible,
    count_admissible_bruteforce,
    cylinder_nonempty,
    equipartition_check,
    extend_configuration,
    generator_rows,
    infinite_path_mass_bound,
    neighbourhood_envelope,
    orbit_envelope,
    window,
    window_sum_criterion,
)
from vnkernel.errors import InconsistentInput, InvalidParameters
from vnkernel.params import PAPER, RuleParams
from vnkernel.subgroups import SubgroupSpec, coset_cell_count, is_member
from vnkernel.words import (
    TreePath,
    enumerate_dogleg_free_classes,
    invert,
    multiply,
    neighbourhood,
    path_ball_size,
    swap_horizontal,
)

R1 = RuleParams(rho=1)
R2 = RuleParams(rho=2)
SUBSETS = [(), (1,), (2,), (1, 2)]


def spec(ix, lengths=(3, 6)):
    return SubgroupSpec.make(ix, lengths)


# ---------------------------------------------------------------- gf2


def brute_rank(rows: list[int], nbits: int) -> int:
    """log2 of the number of vectors in the row span, by enumeration."""
    span = {0}
    for r in rows:
        span |= {x ^ r for x in span}
    return len(span).bit_length() - 1


@settings(max_examples=100)
@given(st.lists(st.integers(0, (1 << 10) - 1), max_size=12))
def test_gf2_rank_and_nullspace(rows):
    assert gf2.rank(rows) == brute_rank(rows, 10)
    basis = gf2.nullspace_basis(rows, 10)
    assert len(basis) == 10 - gf2.rank(rows)
    for x in basis:
        assert all(bin(x & r).count("1") % 2 == 0 for r in rows)
    assert gf2.rank(basis) == len(basis)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 63), st.integers(0, 1)), max_size=8))
def test_gf2_consistency_and_solution(eqs):
    brute = any(all(bin(x & r).count("1") % 2 == b for r, b in eqs) for x in range(64))
    assert gf2.consistent(eqs) == brute
    if brute:
        ech = gf2.GF2Echelon()
        for r, b in eqs:
            ech.add(r, b)
        for free in (0, 1):
            x = ech.solution(6, free)
            assert all(bin(x & r).count("1") % 2 == b for r, b in eqs)


def test_span_is_complete():
    basis = [0b0011, 0b0110, 0b1000]
    assert sorted(gf2.span(basis)) == sorted({a ^ b ^ c for a in (0, 3) for b in (0, 6) for c in (0, 8)})


# ---------------------------------------------------------------- windows


def test_window_is_horizontal_segment():
    w = window("b", 2)
    assert set(w) == {"bAA", "bA", "b", "ba", "baa"}
    assert set(window("aa", 1)) == {"a", "aa", "aaa"}


@settings(max_examples=100)
@given(st.text(alphabet="aAbB", max_size=12), st.integers(0, 4))
def test_window_translation(g, h):
    from vnkernel.words import reduce

    g = reduce(g)
    assert set(window(g, h)) == {multiply(g, "a" * i if i >= 0 else "A" * -i) for i in range(-h, h + 1)}


# ---------------------------------------------------------------- criterion vs brute force


def solution_restricted(spec_, path, params, rng):
    """A random point of the envelope system, restricted to B(P, rho)."""
    dom = neighbourhood(path.vertices, params.rho)
    env = orbit_envelope(dom, spec_, params, core=path.vertices)
    sys = generator_rows(spec_, env, params)
    basis = gf2.nullspace_basis(sys.rows, len(sys.coordinates))
    x = 0
    for b in basis:
        if rng.random() < 0.5:
            x ^= b
    return {v: (x >> sys.index[v]) & 1 for v in dom}, env


@pytest.mark.parametrize("ix", SUBSETS)
def test_criterion_matches_cylinder_on_samples(ix):
    rng = random.Random(11)
    s = spec(ix)
    paths = [p for p in enumerate_dogleg_free_classes(11, R1.d) if p.vertex_count >= 9]
    rng.shuffle(paths)
    # half of the sample has cells with more than one vertex
    merged = [p for p in paths[:4000] if coset_cell_count(p, s) < p.vertex_count]
    paths = merged[:13] + paths[:12]
    seen = {True: 0, False: 0}
    for path in paths[:25]:
        phi, env = solution_restricted(s, path, R1, rng)
        assert window_sum_criterion(path, phi, s, R1)
        assert cylinder_nonempty(phi, s, env, R1)
        for _ in range(4):
            bad = dict(phi)
            v = rng.choice(sorted(bad))
            bad[v] ^= 1
            got = window_sum_criterion(path, bad, s, R1)
            assert got == cylinder_nonempty(bad, s, env, R1)
            seen[got] += 1
    if merged:
        assert seen[False] > 0


def test_tight_envelope_matches_neighbourhood_envelope():
    """The orbit envelope loses no constraint compared to a large metric ball."""
    lengths = (1, 2)
    for steps in ["aa", "bab", "bb", "bbaB", "ab"]:
        path = TreePath("", steps)
        dom = neighbourhood(path.vertices, R1.rho)
        for ix in SUBSETS:
            s = spec(ix, lengths)
            dims = []
            for env in (orbit_envelope(dom, s, R1, core=path.vertices), neighbourhood_envelope(dom, s, R1)):
                sys = generator_rows(s, env, R1)
                off = ~sys.mask(dom)
                dims.append(gf2.rank(sys.rows) - gf2.rank(r & off for r in sys.rows))
            assert dims[0] == dims[1], (steps, ix)


def test_coarse_envelope_contains_tight_one():
    path = TreePath("", "bbbaaB")
    dom = neighbourhood(path.vertices, R1.rho)
    s = spec((1, 2))
    tight = orbit_envelope(dom, s, R1, core=path.vertices)
    coarse = orbit_envelope(dom, s, R1)
    assert tight <= coarse


@pytest.mark.parametrize("params", [R1, R2])
def test_constraint_comparison_small(params):
    specs = [spec(ix) for ix in SUBSETS]
    for path in enumerate_dogleg_free_classes(8, params.d):
        for c in constraint_comparisons(path, specs, params):
            assert c.equivalent, path


def test_mirror_symmetry_of_comparison():
    """Exchanging a and A maps each subgroup to itself, so results agree on mirror images."""
    specs = [spec(ix) for ix in SUBSETS]
    for path in enumerate_dogleg_free_classes(8, R1.d)[::7]:
        mirrored = TreePath("", swap_horizontal(path.steps))
        assert constraint_comparisons(path, specs, R1) == constraint_comparisons(mirrored, specs, R1)
    for ix in SUBSETS:
        for t in spec(ix).generators():
            assert is_member(swap_horizontal(t), spec(ix))


def test_count_matches_bruteforce():
    for steps in ["aaaa", "bbbb", "bbbaaaa", "bbbaaBBB"]:
        path = TreePath("", steps)
        for ix in SUBSETS:
            s = spec(ix)
            assert count_admissible(path, s, R1) == count_admissible_bruteforce(path, s, R1)


def test_count_examples():
    bridge = TreePath("", "bbb" + "a" * 10 + "BBB")
    assert admissible_exponent(bridge, spec((1,)), PAPER) == 1062881 - 17 + 16
    assert admissible_exponent(bridge, spec(()), PAPER) == 1062881
    straight = TreePath("", "aaaa")
    assert admissible_exponent(straight, spec(()), PAPER) == path_ball_size(5, 10)


def test_bridge_flipped_exterior_bit():
    params = RuleParams(rho=10)
    bridge = TreePath("", "bbb" + "a" * 10 + "BBB")
    s = spec((1,))
    h = params.halfwidth
    verts = set(bridge.vertices)
    phi = {}
    for g in verts:
        for v in window(g, h):
            phi[v] = 0 if v in verts else 1
    assert window_sum_criterion(bridge, phi, s, params)
    # a window point of the identity that lies in no other path window
    others = {v for g in verts - {""} for v in window(g, h)}
    v = next(v for v in window("", h) if v not in others and v not in verts)
    phi[v] ^= 1
    assert not window_sum_criterion(bridge, phi, s, params)


# ---------------------------------------------------------------- equipartition


def brute_bucket_sizes(rows, nbits, coords):
    sizes = {}
    for x in range(1 << nbits):
        if all(bin(x & r).count("1") % 2 == 0 for r in rows):
            k = tuple((x >> c) & 1 for c in coords)
            sizes[k] = sizes.get(k, 0) + 1
    return set(sizes.values())


def test_equipartition_examples():
    rng = random.Random(1)
    for _ in range(10):
        rows = [rng.getrandbits(8) for _ in range(rng.randint(0, 5))]
        coords = rng.sample(range(8), rng.randint(1, 8))
        assert equipartition_check(rows, 8, coords)
        assert len(brute_bucket_sizes(rows, 8, coords)) == 1


# ---------------------------------------------------------------- extension


def test_extension_satisfies_invariance():
    s = spec((1,))
    params = R1
    path = TreePath("", "bbbaaaa")
    dom = neighbourhood(path.vertices, 1)
    phi = {g: 0 if g in path.vertices else 1 for g in dom}
    target = neighbourhood(path.vertices, 6)
    ext = extend_configuration(phi, s, target, params)
    assert set(ext) == set(target)
    assert all(ext[g] == v for g, v in phi.items())
    # every generator relation inside the target holds
    h = params.halfwidth
    for x in target:
        wx = window(x, h)
        if not all(v in ext for v in wx):
            continue
        for t in s.generators() + [invert(t) for t in s.generators()]:
            wy = window(multiply(x, t), h)
            if all(v in ext for v in wy):
                assert sum(ext[v] for v in wx) % 2 == sum(ext[v] for v in wy) % 2


def test_extension_rejects_inconsistent():
    s = spec((1,))
    bridge = TreePath("", "bbba")
    end = multiply("bbba", "BBB")  # a point in the coset of the identity
    phi = {g: 1 for g in neighbourhood(bridge.vertices, 1) | neighbourhood(["", end], 1) | set(TreePath("", "bbbaBBB").vertices)}
    phi[""] = 0
    with pytest.raises(InconsistentInput):
        extend_configuration(phi, s, phi, R1)
    with pytest.raises(InvalidParameters):
        extend_configuration({}, s, ["a"], R1)


def test_mass_bound():
    assert infinite_path_mass_bound(12, R2) == Fraction(3**12 * 2**12, 2 ** (2 * 3 * 10))
    assert infinite_path_mass_bound(40, R2) < infinite_path_mass_bound(30, R2)


def test_bruteforce_cylinder_tiny():
    """Enumerate every filling of a tiny envelope directly."""
    s = spec((1,), (1,))
    params = RuleParams(rho=1, window_halfwidth=0)
    path = TreePath("", "ba")
    dom = sorted(neighbourhood(path.vertices, 0))
    env = sorted(orbit_envelope(dom, s, params, core=path.vertices))
    sys = generator_rows(s, env, params)
    for bits in product((0, 1), repeat=len(dom)):
        phi = dict(zip(dom, bits))
        free = [v for v in env if v not in phi]
        ok = False
        for fill in product((0, 1), repeat=len(free)):
            x = {**phi, **dict(zip(free, fill))}
            vec = sum(x[c] << i for i, c in enumerate(sys.coordinates))
            if all(bin(vec & r).count("1") % 2 == 0 for r in sys.rows):
                ok = True
                break
        assert cylinder_nonempty(phi, s, env, params) == ok
        assert window_sum_criterion(path, phi, s, params) == ok
