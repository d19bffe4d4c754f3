"""Exact computations for kernels of local Markov operators on the free group.

The package covers the Cayley tree of the free group on two generators, the
subgroups generated by conjugated horizontal letters, the local rules that
define the operator, the finite quotient graphs of its eigenspaces, counting
of admissible cylinder patterns, and certified dyadic dimension series.
"""

from .errors import (
    InconsistentInput,
    InsufficientDomain,
    InvalidParameters,
    MalformedComponent,
    NoIsomorphism,
    SearchBoundExceeded,
    VnKernelError,
)
from .params import DESK, PAPER, RuleParams
from .subgroups import SubgroupSpec
from .words import TreePath

__version__ = "0.1.0"

__all__ = [
    "DESK",
    "PAPER",
    "InconsistentInput",
    "InsufficientDomain",
    "InvalidParameters",
    "MalformedComponent",
    "NoIsomorphism",
    "RuleParams",
    "SearchBoundExceeded",
    "SubgroupSpec",
    "TreePath",
    "VnKernelError",
]
