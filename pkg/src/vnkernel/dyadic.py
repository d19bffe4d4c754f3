"""Exact dyadic rationals m / 2^k with shift-add arithmetic.

Exponents in the dimension series reach about a million bits, so values are
never normalised through gcd; only trailing zero bits of the numerator are
stripped.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Iterable


def _trailing_zeros(n: int) -> int:
    return (n & -n).bit_length() - 1


@total_ordering
class Dyadic:
    """The number ``numerator / 2**exponent`` in lowest terms."""

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0):
        if numerator == 0:
            exponent = 0
        else:
            tz = _trailing_zeros(numerator)
            numerator >>= tz
            exponent -= tz
        self.numerator = numerator
        self.exponent = exponent

    @classmethod
    def power_of_two(cls, k: int) -> Dyadic:
        """2^k for any integer k."""
        return cls(1, -k)

    def _aligned(self, other: Dyadic) -> tuple[int, int, int]:
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other: Dyadic | int) -> Dyadic:
        other = _coerce(other)
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __neg__(self) -> Dyadic:
        return Dyadic(-self.numerator, self.exponent)

    def __sub__(self, other: Dyadic | int) -> Dyadic:
        return self + (-_coerce(other))

    def __mul__(self, other: Dyadic | int) -> Dyadic:
        other = _coerce(other)
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (Dyadic, int)):
            o = _coerce(other)
            return self.numerator == o.numerator and self.exponent == o.exponent
        if isinstance(other, Fraction):
            return compare_to_fraction(self, other) == 0
        return NotImplemented

    def __lt__(self, other: Dyadic | int | Fraction) -> bool:
        if isinstance(other, Fraction):
            return compare_to_fraction(self, other) < 0
        a, b, _ = self._aligned(_coerce(other))
        return a < b

    def __hash__(self) -> int:
        return hash((self.numerator, self.exponent))

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def __repr__(self) -> str:
        return f"Dyadic({self.numerator}, {self.exponent})"

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.numerator, 1 << self.exponent)
        return Fraction(self.numerator << -self.exponent)

    def to_json(self) -> dict:
        return {"num_hex": _hex(self.numerator), "exp": self.exponent}

    @classmethod
    def from_json(cls, data: dict) -> Dyadic:
        return cls(int(data["num_hex"], 16), int(data["exp"]))

    def decimal(self, precision: int = 60) -> str:
        return dyadic_to_decimal(self.numerator, self.exponent, precision)


def _coerce(x: Dyadic | int) -> Dyadic:
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x, 0)
    raise TypeError(f"cannot use {type(x).__name__} as a dyadic rational")


def _hex(n: int) -> str:
    return ("-" if n < 0 else "") + hex(abs(n))


def compare_to_fraction(d: Dyadic, q: Fraction) -> int:
    """Sign of d - q by cross multiplication (q has a positive denominator)."""
    num, den = q.numerator, q.denominator
    if d.exponent >= 0:
        lhs = d.numerator * den
        rhs = num << d.exponent
    else:
        lhs = (d.numerator << -d.exponent) * den
        rhs = num
    return (lhs > rhs) - (lhs < rhs)


def dyadic_sum(terms: Iterable[Dyadic]) -> Dyadic:
    """Exact sum; grouping by exponent keeps the shifts few."""
    groups: dict[int, int] = {}
    for t in terms:
        groups[t.exponent] = groups.get(t.exponent, 0) + t.numerator
    total = Dyadic(0)
    for e in sorted(groups):
        total = total + Dyadic(groups[e], e)
    return total


def _decimal_exponent(num: int, den_pow2: int) -> int:
    """floor(log10(num / 2^den_pow2)) for num > 0."""
    # estimate then correct with exact comparisons
    est = int((num.bit_length() - 1 - den_pow2) * 0.30102999566398120)
    for e in (est - 2, est - 1, est, est + 1, est + 2):
        if _ge_pow10(num, den_pow2, e) and not _ge_pow10(num, den_pow2, e + 1):
            return e
    e = est
    while not _ge_pow10(num, den_pow2, e):
        e -= 1
    while _ge_pow10(num, den_pow2, e + 1):
        e += 1
    return e


def _ge_pow10(num: int, den_pow2: int, e: int) -> bool:
    """num / 2^den_pow2 >= 10^e."""
    lhs, rhs = num, 1
    if e >= 0:
        rhs = 10**e
    else:
        lhs = num * 10 ** (-e)
    if den_pow2 >= 0:
        rhs <<= den_pow2
    else:
        lhs <<= -den_pow2
    return lhs >= rhs


def dyadic_to_decimal(numerator: int, exponent: int, precision: int = 60) -> str:
    """Decimal rendering of numerator / 2^exponent.

    The expansion of a dyadic rational terminates after ``exponent`` digits.
    It is printed in full when it has at most ``precision`` fractional
    digits; otherwise it is printed in scientific notation with
    ``precision`` significant digits, truncated toward zero.
    """
    if numerator == 0:
        return "0"
    sign = "-" if numerator < 0 else ""
    num = abs(numerator)
    if exponent <= 0:
        value = num << -exponent
        if value.bit_length() <= 3 * precision:
            return sign + str(value)
    elif exponent <= precision:
        scaled = num * 5**exponent
        whole, frac = divmod(scaled, 10**exponent)
        return f"{sign}{whole}.{frac:0{exponent}d}"
    e10 = _decimal_exponent(num, exponent)
    shift = precision - 1 - e10
    lhs = num
    rhs = 1
    if shift >= 0:
        lhs *= 10**shift
    else:
        rhs = 10 ** (-shift)
    if exponent >= 0:
        rhs <<= exponent
    else:
        lhs <<= -exponent
    digits = str(lhs // rhs)
    mantissa = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{sign}{mantissa}e{e10}"


def fraction_to_decimal(q: Fraction, precision: int = 60) -> str:
    """Scientific rendering of a positive rational, truncated to ``precision`` digits."""
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    num, den = abs(q.numerator), q.denominator
    est = int((num.bit_length() - den.bit_length()) * 0.30102999566398120)

    def ge(e: int) -> bool:
        return num * 10 ** max(-e, 0) >= den * 10 ** max(e, 0)

    e10 = est
    while not ge(e10):
        e10 -= 1
    while ge(e10 + 1):
        e10 += 1
    shift = precision - 1 - e10
    lhs = num * 10 ** max(shift, 0)
    rhs = den * 10 ** max(-shift, 0)
    digits = str(lhs // rhs)
    mantissa = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{sign}{mantissa}e{e10}"
