"""Dimension series over active path classes and monotonicity certificates.

Each active class (a dogleg-free path with an admissible vertex count)
contributes 2^-(|B(P, rho)| - l + cells) where ``cells`` counts the left
cosets of the subgroup met by the path.  Partial sums up to a vertex bound
are exact dyadic rationals; the remainder is bounded by an explicit rational
tail.  Comparing two subgroups gives a certificate whenever the exact
difference of partial sums beats twice the tail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .cylinders import window, window_sum_criterion
from .dyadic import Dyadic, dyadic_sum, fraction_to_decimal
from .errors import InvalidParameters
from .params import RuleParams
from .quotient import nullity_table
from .subgroups import SubgroupSpec, coset_cell_count, lex_less
from .words import TreePath, enumerate_dogleg_free_classes, path_ball_size

STRICT = "strict"
NULLITY = "nullity"
MODES = (STRICT, NULLITY)

CERTIFIED = "CERTIFIED_POSITIVE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ActiveClass:
    path: TreePath
    vertex_count: int
    cells: int
    exponent: int

    @property
    def term(self) -> Dyadic:
        return Dyadic.power_of_two(-self.exponent)

    def to_json(self) -> dict:
        return {
            "path": self.path.steps,
            "vertex_count": self.vertex_count,
            "cells": self.cells,
            "exponent": self.exponent,
        }


@lru_cache(maxsize=16)
def _classes(max_vertices: int, d: int) -> tuple[TreePath, ...]:
    return tuple(enumerate_dogleg_free_classes(max_vertices, d))


def _strict_ok(ell: int) -> bool:
    return ell % 6 == 5


def is_admissible(ell: int, params: RuleParams, mode: str = NULLITY) -> bool:
    if mode not in MODES:
        raise InvalidParameters(f"mode must be one of {MODES}")
    if ell < params.min_central_vertices:
        return False
    if mode == STRICT:
        return _strict_ok(ell)
    return nullity_table([ell], ["11"], params)[(ell, "11")] == 1


def admissible_ells(max_vertices: int, params: RuleParams, mode: str = NULLITY) -> list[int]:
    return [ell for ell in range(1, max_vertices + 1) if is_admissible(ell, params, mode)]


def next_admissible(after: int, params: RuleParams, mode: str = NULLITY, search: int = 1000) -> int:
    """Smallest admissible vertex count strictly greater than ``after``."""
    for ell in range(after + 1, after + 1 + search):
        if is_admissible(ell, params, mode):
            return ell
    raise InvalidParameters(f"no admissible vertex count within {search} of {after}")


def always_zero_holds(path: TreePath, spec: SubgroupSpec, params: RuleParams) -> bool:
    """The pattern 0 on P and 1 on B(P, rho) minus P passes the window criterion."""
    verts = set(path.vertices)
    h = params.halfwidth
    phi = {}
    for g in verts:
        for v in window(g, h):
            phi[v] = 0 if v in verts else 1
    return window_sum_criterion(path, phi, spec, params)


def enumerate_active_classes(
    max_vertices: int,
    spec: SubgroupSpec,
    params: RuleParams,
    mode: str = NULLITY,
    check_cylinder: bool = True,
) -> list[ActiveClass]:
    """Active classes with at most ``max_vertices`` vertices, in canonical order."""
    return list(_active_classes(max_vertices, spec, params, mode, check_cylinder))


@lru_cache(maxsize=32)
def _active_classes(
    max_vertices: int, spec: SubgroupSpec, params: RuleParams, mode: str, check_cylinder: bool
) -> tuple[ActiveClass, ...]:
    ells = set(admissible_ells(max_vertices, params, mode))
    out = []
    for path in _classes(max_vertices, params.d):
        ell = path.vertex_count
        if ell not in ells:
            continue
        if check_cylinder and not always_zero_holds(path, spec, params):
            continue
        cells = coset_cell_count(path, spec)
        out.append(ActiveClass(path, ell, cells, path_ball_size(ell, params.rho) - ell + cells))
    return tuple(out)


def dimension_term(c: ActiveClass, params: RuleParams) -> Dyadic:
    return Dyadic.power_of_two(-(path_ball_size(c.vertex_count, params.rho) - c.vertex_count + c.cells))


@lru_cache(maxsize=64)
def _tail(start: int, rho: int) -> Fraction:
    m = 3**rho - 2
    pm = 1 << m
    if pm <= 3:
        raise InvalidParameters("the tail series diverges for this rho")
    k = (3 * start + 2) * pm - 9 * start + 3
    num = (1 << (m + 1)) * 3**start * k
    den = (1 << (m * start)) * (pm - 3) ** 2
    return Fraction(num, den)


def tail_bound(start: int, params: RuleParams) -> Fraction:
    """2 * sum over l >= start of (3l + 2) 6^l 2^-((3^rho - 1) l), in closed form.

    With q = 3 / 2^m and m = 3^rho - 2 the sum is an arithmetic-geometric
    series: sum_{l >= L} (3l + 2) q^l = q^L ((3L + 2)(1 - q) + 3q) / (1 - q)^2.
    """
    if start < 1:
        raise InvalidParameters("the tail starts at a positive vertex count")
    return _tail(start, params.rho)


@dataclass(frozen=True)
class DimensionReport:
    spec: SubgroupSpec
    max_vertices: int
    mode: str
    ells: tuple[int, ...]
    classes: tuple[ActiveClass, ...]
    partial_sum: Dyadic
    tail_start: int
    tail: Fraction
    params: RuleParams

    def interval(self) -> tuple[Fraction, Fraction]:
        lo = self.partial_sum.to_fraction()
        return lo, lo + self.tail

    def to_json(self, precision: int = 60, include_terms: bool = True) -> dict:
        out = {
            "spec": self.spec.to_json(),
            "max_vertices": self.max_vertices,
            "mode": self.mode,
            "admissible_ells": list(self.ells),
            "params": self.params.to_json(),
            "class_count": len(self.classes),
            "partial_sum": self.partial_sum.to_json(),
            "partial_sum_decimal": self.partial_sum.decimal(precision),
            "tail_start": self.tail_start,
            "tail": {"num_hex": hex(self.tail.numerator), "den_hex": hex(self.tail.denominator)},
            "tail_decimal": fraction_to_decimal(self.tail, min(precision, 30)),
        }
        if include_terms:
            out["terms"] = [c.to_json() for c in self.classes]
        return out


def _permuted(classes: Sequence[ActiveClass], seed: int | None) -> list[ActiveClass]:
    items = list(classes)
    if seed is not None:
        random.Random(seed).shuffle(items)
    return items


def partial_dimension(
    spec: SubgroupSpec,
    max_vertices: int,
    params: RuleParams,
    mode: str = NULLITY,
    order_seed: int | None = None,
) -> DimensionReport:
    classes = enumerate_active_classes(max_vertices, spec, params, mode)
    total = dyadic_sum(c.term for c in _permuted(classes, order_seed))
    start = next_admissible(max_vertices, params, mode)
    return DimensionReport(
        spec,
        max_vertices,
        mode,
        tuple(admissible_ells(max_vertices, params, mode)),
        tuple(classes),
        total,
        start,
        tail_bound(start, params),
        params,
    )


@dataclass(frozen=True)
class MonotonicityCertificate:
    smaller: SubgroupSpec
    larger: SubgroupSpec
    max_vertices: int
    mode: str
    delta: Dyadic
    tail_start: int
    tail: Fraction
    differing_classes: int
    verdict: str
    params: RuleParams

    def to_json(self) -> dict:
        return {
            "I": self.smaller.to_json(),
            "J": self.larger.to_json(),
            "max_vertices": self.max_vertices,
            "mode": self.mode,
            "params": self.params.to_json(),
            "delta": self.delta.to_json(),
            "tail_start": self.tail_start,
            "tail": {"num_hex": hex(self.tail.numerator), "den_hex": hex(self.tail.denominator)},
            "differing_classes": self.differing_classes,
            "verdict": self.verdict,
        }


def certified(delta: Dyadic, tail: Fraction) -> bool:
    """delta - 2 tail > 0, by cross multiplication."""
    m, k = delta.numerator, delta.exponent
    n, d = tail.numerator, tail.denominator
    if k >= 0:
        return m * d > (2 * n) << k
    return (m << -k) * d > 2 * n


def compare(
    i_spec: SubgroupSpec,
    j_spec: SubgroupSpec,
    max_vertices: int,
    params: RuleParams,
    mode: str = NULLITY,
    order_seed: int | None = None,
) -> MonotonicityCertificate:
    """Certificate for dim(J) > dim(I) from partial sums up to ``max_vertices``."""
    if i_spec.lengths != j_spec.lengths:
        raise InvalidParameters("both subgroups must use the same lengths")
    ci = enumerate_active_classes(max_vertices, i_spec, params, mode)
    cj = enumerate_active_classes(max_vertices, j_spec, params, mode)
    pi = dyadic_sum(c.term for c in _permuted(ci, order_seed))
    pj = dyadic_sum(c.term for c in _permuted(cj, order_seed))
    ti = {c.path: c.exponent for c in ci}
    tj = {c.path: c.exponent for c in cj}
    differing = sum(1 for k in set(ti) | set(tj) if ti.get(k) != tj.get(k))
    delta = pj - pi
    start = next_admissible(max_vertices, params, mode)
    tail = tail_bound(start, params)
    verdict = CERTIFIED if certified(delta, tail) else INCONCLUSIVE
    return MonotonicityCertificate(i_spec, j_spec, max_vertices, mode, delta, start, tail, differing, verdict, params)


def certify_chain(
    specs: Sequence[SubgroupSpec],
    max_vertices: int,
    params: RuleParams,
    mode: str = NULLITY,
    order_seed: int | None = None,
) -> list[MonotonicityCertificate]:
    """Certificates for each adjacent pair of a lexicographically increasing chain."""
    for a, b in zip(specs, specs[1:]):
        if not lex_less(a.indices, b.indices):
            raise InvalidParameters(f"chain is not increasing at {a.label()} -> {b.label()}")
    return [compare(a, b, max_vertices, params, mode, order_seed) for a, b in zip(specs, specs[1:])]


def verify_certificate_json(data: dict) -> bool:
    """Re-check a serialized certificate from its integers alone.

    Returns True iff the stated verdict matches the sign of delta - 2 tail,
    evaluated by cross multiplication.
    """
    m = int(data["delta"]["num_hex"], 16)
    k = int(data["delta"]["exp"])
    n = int(data["tail"]["num_hex"], 16)
    d = int(data["tail"]["den_hex"], 16)
    if d <= 0:
        return False
    # delta = m / 2^k, tail = n / d; positive iff m d > 2 n 2^k
    if k >= 0:
        positive = m * d > (2 * n) << k
    else:
        positive = (m << -k) * d > 2 * n
    return positive == (data["verdict"] == CERTIFIED)


def chain_csv(certs: Iterable[MonotonicityCertificate]) -> str:
    lines = ["I,J,max_vertices,mode,delta_sign,delta_exp,differing_classes,tail_start,verdict"]
    for c in certs:
        lines.append(
            ",".join(
                [
                    c.smaller.label().replace(",", " "),
                    c.larger.label().replace(",", " "),
                    str(c.max_vertices),
                    c.mode,
                    str(c.delta.sign()),
                    str(c.delta.exponent),
                    str(c.differing_classes),
                    str(c.tail_start),
                    c.verdict,
                ]
            )
        )
    return "\n".join(lines) + "\n"
