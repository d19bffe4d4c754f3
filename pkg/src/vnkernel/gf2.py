"""Linear algebra over GF(2) with rows stored as integer bitmasks."""

from __future__ import annotations

from typing import Iterable


class GF2Echelon:
    """Incremental echelon form; the pivot of a row is its lowest set bit.

    Rows may carry a right-hand side bit, which makes the structure an
    incremental linear system solver.
    """

    def __init__(self) -> None:
        self.pivots: dict[int, tuple[int, int]] = {}  # bit -> (row, rhs)
        self.consistent = True

    def reduce(self, row: int, rhs: int = 0) -> tuple[int, int]:
        while row:
            low = row & -row
            hit = self.pivots.get(low)
            if hit is None:
                break
            row ^= hit[0]
            rhs ^= hit[1]
        return row, rhs

    def reduce_fully(self, row: int, rhs: int = 0) -> tuple[int, int]:
        """Reduce every set bit that has a pivot, not only the lowest."""
        rest = 0
        while row:
            low = row & -row
            hit = self.pivots.get(low)
            if hit is None:
                rest |= low
                row ^= low
            else:
                row ^= hit[0]
                rhs ^= hit[1]
        return rest, rhs

    def add(self, row: int, rhs: int = 0) -> bool:
        """Insert a row; return True if it increased the rank."""
        row, rhs = self.reduce(row, rhs)
        if not row:
            if rhs:
                self.consistent = False
            return False
        self.pivots[row & -row] = (row, rhs)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def solution(self, nbits: int, free_value: int = 0) -> int:
        """One solution (free variables set to ``free_value``); needs consistency."""
        if not self.consistent:
            raise ValueError("inconsistent system")
        x = 0
        if free_value:
            for i in range(nbits):
                if (1 << i) not in self.pivots:
                    x |= 1 << i
        # highest pivots first: a pivot row only involves bits at or above its pivot
        for low in sorted(self.pivots, reverse=True):
            row, rhs = self.pivots[low]
            val = rhs ^ (bin((row ^ low) & x).count("1") & 1)
            if val:
                x |= low
            else:
                x &= ~low
        return x


def rank(rows: Iterable[int]) -> int:
    ech = GF2Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def nullspace_basis(rows: Iterable[int], nbits: int) -> list[int]:
    """Basis of {x : <row, x> = 0 for every row}."""
    ech = GF2Echelon()
    for r in rows:
        ech.add(r)
    basis = []
    for f in range(nbits):
        fb = 1 << f
        if fb in ech.pivots:
            continue
        x = fb
        for low in sorted(ech.pivots, reverse=True):
            row, _ = ech.pivots[low]
            if bin((row ^ low) & x).count("1") & 1:
                x |= low
        basis.append(x)
    return basis


def consistent(equations: Iterable[tuple[int, int]]) -> bool:
    ech = GF2Echelon()
    for row, rhs in equations:
        ech.add(row, rhs)
        if not ech.consistent:
            return False
    return True


def span(basis: list[int]) -> Iterable[int]:
    """All elements of the span of independent vectors (2^k of them)."""
    k = len(basis)
    x = 0
    yield x
    # Gray code walk
    for i in range(1, 1 << k):
        bit = (i & -i).bit_length() - 1
        x ^= basis[bit]
        yield x
