"""Acceptance suite: ten end-to-end checks, one pass/fail line each.

Run under pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import planted_configuration, record  # noqa: E402
from vnkernel import gf2, series  # noqa: E402
from vnkernel.cylinders import (  # noqa: E402
    constraint_comparisons,
    cylinder_nonempty,
    equipartition_check,
    generator_rows,
    orbit_envelope,
    window_sum_criterion,
)
from vnkernel.params import DESK, PAPER, RuleParams  # noqa: E402
from vnkernel.quotient import CASES, build_quotient_graph, nullity_table, predicted_nullity  # noqa: E402
from vnkernel.rules import (  # noqa: E402
    C0,
    LABEL_CASE,
    Configuration,
    RuleEvaluator,
    check_rule_isomorphism,
    classify,
)
from vnkernel.series import CERTIFIED, NULLITY, STRICT  # noqa: E402
from vnkernel.subgroups import (  # noqa: E402
    SubgroupSpec,
    coset_cell_count,
    coset_partition,
    enumerate_members,
    is_member,
    membership_oracle_bfs,
)
from vnkernel.words import (  # noqa: E402
    LETTERS,
    TreePath,
    ball,
    enumerate_dogleg_free_classes,
    inverse_letter,
    invert,
    mirror_canonical_steps,
    multiply,
    neighbourhood,
    path_ball_size,
)

LENGTHS = (3, 6)
SUBSETS = [(), (1,), (2,), (1, 2)]
BRIDGE = "bbb" + "a" * 10 + "BBB"


def spec(ix) -> SubgroupSpec:
    return SubgroupSpec.make(ix, LENGTHS)


def within(limit: float, start: float) -> tuple[bool, float]:
    elapsed = time.perf_counter() - start
    return elapsed < limit, elapsed


def _clear_series_caches() -> None:
    series._active_classes.cache_clear()
    series._classes.cache_clear()
    series._tail.cache_clear()


# ---------------------------------------------------------------- 1


def test_criterion_01_spectral_table():
    t0 = time.perf_counter()
    ells = range(5, 60)
    table = nullity_table(ells, CASES, PAPER)
    bad_zero = [(ell, c) for ell in ells for c in ("12", "22") if table[(ell, c)] != 0]
    bad_one = [ell for ell in ells if ell % 6 == 5 and table[(ell, "11")] != 1]
    bad_rec = [(ell, c) for ell in ells for c in CASES if table[(ell, c)] != predicted_nullity(ell, c, PAPER)]
    others = sorted({table[(ell, "11")] for ell in ells if ell % 6 != 5})
    ok_t, dt = within(60, t0)
    ok = not bad_zero and not bad_one and not bad_rec and ok_t
    record(1, ok, f"l in [5,59]; (1,1) off 5 mod 6 takes values {others}; recursion agrees; {dt:.1f}s")
    assert ok, (bad_zero, bad_one, bad_rec, dt)


# ---------------------------------------------------------------- 2


def test_criterion_02_explicit_eigenvector():
    t0 = time.perf_counter()
    failures = []
    for ell in (5, 11, 17):
        g = build_quotient_graph(ell, "11", PAPER)
        pattern = [(1, 1, 0, -1, -1, 0)[(i - 1) % 6] for i in range(1, ell + 1)]
        x = {}
        for v in g.vertices:
            kind = v[0]
            if kind == "v":
                x[v] = Fraction(pattern[v[1] - 1])
            elif kind == "leaf":
                x[v] = Fraction(pattern[v[1] - 1], 2)
            else:
                failures.append((ell, v))
        adj = g.adjacency()
        for v in g.vertices:
            qx = sum(w * x[u] for u, w in adj[v].items())
            if qx != 4 * x[v]:
                failures.append((ell, v))
    ok_t, dt = within(1, t0)
    ok = not failures and ok_t
    record(2, ok, f"Q x = 4 x exactly for l = 5, 11, 17; {dt:.3f}s")
    assert ok, failures


# ---------------------------------------------------------------- 3


def test_criterion_03_equipartition():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    nbits = 12
    failures = 0
    for _ in range(50):
        rows = [rng.getrandbits(nbits) for _ in range(rng.randint(1, 8))]
        coords = rng.sample(range(nbits), rng.randint(1, nbits))
        # direct enumeration of the annihilator, independent of the elimination
        sizes: dict[tuple[int, ...], int] = {}
        for x in range(1 << nbits):
            if all(bin(x & r).count("1") % 2 == 0 for r in rows):
                key = tuple((x >> c) & 1 for c in coords)
                sizes[key] = sizes.get(key, 0) + 1
        if len(set(sizes.values())) != 1 or not equipartition_check(rows, nbits, coords):
            failures += 1
    ok_t, dt = within(30, t0)
    ok = failures == 0 and ok_t
    record(3, ok, f"50 random subgroups of Z2^12; {failures} unequal; {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------- 4


def _random_point(s, path, params, rng):
    dom = neighbourhood(path.vertices, params.rho)
    env = orbit_envelope(dom, s, params, core=path.vertices)
    sys_ = generator_rows(s, env, params)
    x = 0
    for b in gf2.nullspace_basis(sys_.rows, len(sys_.coordinates)):
        if rng.random() < 0.5:
            x ^= b
    return {v: (x >> sys_.index[v]) & 1 for v in dom}, env


def test_criterion_04_criterion_equivalence():
    """Constraint spaces on B(P, rho) coincide for every path, so every phi is decided alike.

    Classes are reduced by translation, reversal and the exchange of a and A,
    which fixes each generator t_n up to inversion.  A sample of explicit
    patterns is also decided both ways.
    """
    t0 = time.perf_counter()
    specs = [spec(ix) for ix in SUBSETS]
    checked = 0
    mismatches = []
    classes = {rho: enumerate_dogleg_free_classes(13, RuleParams(rho=rho).d) for rho in (1, 2)}
    for rho in (1, 2):
        params = RuleParams(rho=rho)
        reps = sorted({mirror_canonical_steps(p.steps) for p in classes[rho]})
        for steps in reps:
            path = TreePath("", steps)
            for s, c in zip(specs, constraint_comparisons(path, specs, params)):
                checked += 1
                if not c.equivalent:
                    mismatches.append((rho, steps, s.label()))
    # explicit patterns: admissible points and single-bit flips of them
    rng = random.Random(4)
    verdicts = {True: 0, False: 0}
    for rho in (1, 2):
        params = RuleParams(rho=rho)
        pool = [p for p in classes[rho] if p.vertex_count >= 9]
        rng.shuffle(pool)
        for s in specs[1:]:
            merged = [p for p in pool[:3000] if coset_cell_count(p, s) < p.vertex_count][:10]
            for path in merged + pool[:5]:
                phi, env = _random_point(s, path, params, rng)
                inside = set(path.vertices)
                phi0 = {g: 0 if g in inside else 1 for g in phi}
                if window_sum_criterion(path, phi0, s, params) != cylinder_nonempty(phi0, s, env, params):
                    mismatches.append((rho, path.steps, s.label(), "phi0"))
                for k in range(4):
                    psi = dict(phi)
                    if k:
                        v = rng.choice(sorted(psi))
                        psi[v] ^= 1
                    a = window_sum_criterion(path, psi, s, params)
                    b = cylinder_nonempty(psi, s, env, params)
                    verdicts[a] += 1
                    if a != b:
                        mismatches.append((rho, path.steps, s.label(), "phi"))
    ok_t, dt = within(300, t0)
    ok = not mismatches and ok_t and verdicts[False] > 0
    record(
        4,
        ok,
        f"{checked} (class, I) pairs at rho 1,2 up to 13 vertices; "
        f"{sum(verdicts.values())} explicit patterns ({verdicts[False]} rejected); {dt:.0f}s",
    )
    assert ok, mismatches[:5]


# ---------------------------------------------------------------- 5


def test_criterion_05_always_zero():
    t0 = time.perf_counter()
    classes = enumerate_dogleg_free_classes(13, DESK.d)
    failures = [
        (p.steps, ix) for ix in SUBSETS for p in classes if not series.always_zero_holds(p, spec(ix), DESK)
    ]
    ok_t, dt = within(60, t0)
    ok = not failures and ok_t
    record(5, ok, f"{len(classes)} classes up to 13 vertices at rho=2, 4 subgroups; {dt:.1f}s")
    assert ok, failures[:5]


# ---------------------------------------------------------------- 6


def _check_label(cfg: Configuration, params: RuleParams, iso: bool = True) -> str:
    """Classify and cross-check; raises on any inconsistency."""
    r = classify(cfg, params)
    ev = RuleEvaluator(cfg, params)
    weight_at_e = any(ev.edge_weight("", multiply("", s)) for s in LETTERS)
    if (r.label == C0) == weight_at_e:
        raise AssertionError(f"C0 label disagrees with weights at e: {r.label}")
    if r.label in LABEL_CASE:
        inner, outer = r.inner.vertices, r.outer.vertices
        extended = (outer[0] != inner[0]) + (outer[-1] != inner[-1])
        if extended != 2 - r.good_ends:
            raise AssertionError("outer path does not match the number of bad ends")
        if "" not in neighbourhood(inner, 1):
            raise AssertionError("identity outside B(P, 1)")
        if iso:
            check_rule_isomorphism(r, cfg, params)
    elif r.label != C0:
        raise AssertionError(f"unexpected label {r.label}")
    return r.label


def test_criterion_06_partition_property():
    t0 = time.perf_counter()
    params = DESK
    counts: dict[str, int] = {}

    def tally(label: str) -> None:
        counts[label] = counts.get(label, 0) + 1

    window = ball("", 2)
    line = {"a" * i for i in range(8)} | {"A" * i for i in range(1, 8)}
    long_line = {"a" * i for i in range(11)} | {"A" * i for i in range(1, 8)}
    end_window = ball("a" * 6, 2)
    exhaustive = 0
    for bits in product((0, 1), repeat=len(window)):
        zeros = {g for g, b in zip(window, bits) if b}
        tally(_check_label(Configuration.from_zeros(zeros), params))
        tally(_check_label(Configuration.from_zeros(line ^ zeros), params))
        exhaustive += 2
    # perturbations near the end of a long path: every 16th pattern
    for m in range(0, 1 << len(end_window), 16):
        zeros = {g for i, g in enumerate(end_window) if m >> i & 1}
        tally(_check_label(Configuration.from_zeros(long_line ^ zeros), params))
        exhaustive += 1
    rng = random.Random(6)
    finite = []
    for _ in range(10_000):
        cfg = planted_configuration(rng)
        label = _check_label(cfg, params)
        tally(label)
        if label in LABEL_CASE:
            finite.append(cfg)
    # translation classes: every point of B(P, 1) sees the same triple
    for cfg in finite[:150]:
        r = classify(cfg, params)
        missing = RuleEvaluator(cfg, params).component("").missing
        for g in neighbourhood(r.inner.vertices, 1):
            r2 = classify(cfg.shifted(g), params)
            gi = invert(g)
            if g in missing:
                assert r2.label == C0
            else:
                expected = tuple(frozenset(multiply(gi, x) for x in part) for part in r.vertex_triple())
                assert r2.label == r.label and r2.vertex_triple() == expected
    ok_t, dt = within(600, t0)
    labels_seen = sorted(counts)
    ok = ok_t and labels_seen == sorted([C0, *LABEL_CASE])
    record(
        6,
        ok,
        f"{exhaustive} window patterns + 10000 random; labels {json.dumps(counts, sort_keys=True)}; "
        f"all finite labels isomorphic to the model; {dt:.0f}s",
    )
    assert ok


# ---------------------------------------------------------------- 7


def test_criterion_07_dimension_series():
    t0 = time.perf_counter()
    r = series.partial_dimension(spec(()), 10, PAPER, STRICT)
    lo, hi = r.interval()
    expected = 2 * Fraction(1, 2 ** path_ball_size(5, 10))  # two straight classes at l = 5, one cell each
    ok_value = r.partial_sum.numerator == 1 and r.partial_sum.exponent == 354292 and lo == expected
    ok_interval = 0 < r.tail < lo and lo < hi and r.tail_start == 11
    ok_t, dt = within(10, t0)
    ok = ok_value and ok_interval and ok_t
    record(7, ok, f"partial sum 2^-{r.partial_sum.exponent} from {len(r.classes)} classes, tail from l=11; {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------- 8


def test_criterion_08_monotonicity_chain():
    t0 = time.perf_counter()
    chain = [spec(ix) for ix in [(), (2,), (1,), (1, 2)]]
    results = {}
    for mode in (STRICT, NULLITY):
        _clear_series_caches()
        first = series.certify_chain(chain, 29, PAPER, mode)
        _clear_series_caches()
        second = series.certify_chain(chain, 29, PAPER, mode, order_seed=12345)
        a = json.dumps([c.to_json() for c in first], sort_keys=True, indent=2)
        b = json.dumps([c.to_json() for c in second], sort_keys=True, indent=2)
        verified = all(series.verify_certificate_json(c) for c in json.loads(a))
        results[mode] = (all(c.verdict == CERTIFIED for c in first), a == b, verified)
    ok_t, dt = within(300, t0)
    ok = all(all(v) for v in results.values()) and ok_t
    record(8, ok, f"e < {{2}} < {{1}} < {{1,2}} at L=29 (certified, identical, re-verified) {results}; {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- 9


def test_criterion_09_doubling_law():
    t0 = time.perf_counter()
    bridge = TreePath("", BRIDGE)
    terms = {}
    cells = {}
    for ix in [(), (1,)]:
        found = [c for c in series.enumerate_active_classes(17, spec(ix), PAPER, STRICT) if c.path == bridge]
        assert len(found) == 1
        terms[ix], cells[ix] = found[0].term, found[0].cells
    pairwise = [coset_partition(bridge, spec(ix)).num_cells for ix in [(), (1,)]]
    ok_t, dt = within(10, t0)
    ok = terms[(1,)] == terms[()] * 2 and cells == {(): 17, (1,): 16} and pairwise == [17, 16] and ok_t
    record(9, ok, f"bridge term 2^-{terms[()].exponent} -> 2^-{terms[(1,)].exponent}, cells 17 -> 16; {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------- 10


def test_criterion_10_membership_engine():
    t0 = time.perf_counter()
    n = 12
    words = [""]
    frontier = [""]
    for _ in range(n):
        frontier = [w + c for w in frontier for c in LETTERS if not w or c != inverse_letter(w[-1])]
        words.extend(frontier)
    mismatches = []
    bad_first = []
    for ix in SUBSETS:
        s = spec(ix)
        members = enumerate_members(s, n)
        for w in words:
            m = is_member(w, s)
            if m != (w in members):
                mismatches.append((ix, w))
            if m and w and w[0] not in "bB":
                bad_first.append((ix, w))
    # the bounded syllable search also settles a random sample on its own
    rng = random.Random(10)
    for w in rng.sample(words, 2000):
        for ix in SUBSETS:
            if membership_oracle_bfs(w, spec(ix), len(w) + 1) != is_member(w, spec(ix)):
                mismatches.append((ix, w, "bfs"))
    ok_t, dt = within(120, t0)
    ok = not mismatches and not bad_first and ok_t
    record(10, ok, f"{len(words)} reduced words of length <= 12, 4 subgroups; {dt:.0f}s")
    assert ok, (mismatches[:5], bad_first[:5])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
