from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidParameters


@dataclass(frozen=True)
class RuleParams:
    """Parameters of the local rules and of the counting model.

    ``rho`` is the locality radius, ``dogleg_bound`` the largest horizontal
    run that counts as a dogleg, ``window_halfwidth`` the half width of the
    horizontal parity windows, ``min_central_vertices`` the smallest central
    path that carries weight, and ``bad_weight`` the weight on edges leaving a
    bad end.
    """

    rho: int = 10
    dogleg_bound: int | None = None
    window_halfwidth: int | None = None
    min_central_vertices: int = 5
    bad_weight: Fraction = field(default=Fraction(1, 100))

    def __post_init__(self) -> None:
        if not isinstance(self.rho, int) or self.rho < 1:
            raise InvalidParameters("rho must be a positive integer")
        if self.dogleg_bound is None:
            object.__setattr__(self, "dogleg_bound", self.rho - 1)
        if self.window_halfwidth is None:
            object.__setattr__(self, "window_halfwidth", self.rho)
        object.__setattr__(self, "bad_weight", Fraction(self.bad_weight))
        if self.dogleg_bound < 0:
            raise InvalidParameters("dogleg_bound must be non-negative")
        if not 0 <= self.window_halfwidth <= self.rho:
            raise InvalidParameters("window_halfwidth must lie in [0, rho]")
        if self.min_central_vertices < 1:
            raise InvalidParameters("min_central_vertices must be positive")
        if self.bad_weight <= 0:
            raise InvalidParameters("bad_weight must be positive")

    @property
    def d(self) -> int:
        return self.dogleg_bound  # type: ignore[return-value]

    @property
    def halfwidth(self) -> int:
        return self.window_halfwidth  # type: ignore[return-value]

    def to_json(self) -> dict:
        return {
            "rho": self.rho,
            "dogleg_bound": self.d,
            "window_halfwidth": self.halfwidth,
            "min_central_vertices": self.min_central_vertices,
            "bad_weight": str(self.bad_weight),
        }


PAPER = RuleParams()
DESK = RuleParams(rho=2)

PROFILES = {"paper": PAPER, "desk": DESK}

# default subgroup lengths per profile
DEFAULT_LENGTHS = {"paper": {1: 3, 2: 6}, "desk": {1: 3, 2: 6}}
