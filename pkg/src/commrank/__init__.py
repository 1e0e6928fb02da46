"""Exact commutator-rank invariants of finite monomial unitary groups,
together with reducibility tools for rank-two commutator groups."""

from __future__ import annotations

from .cyclotomic import CycNum, root_of_unity
from .engine import (
    CapExceeded,
    GroupSet,
    PreconditionError,
    closure,
    commutator_subgroup,
    compute_invariants,
    diagonal_subgroup,
    gpqa_group,
    rho2_witness,
)
from .matgroup import DenseMatrix, MatrixError, MonomialMatrix, make_gpqa_generators
from .reducibility import (
    Subspace,
    commutant,
    decompose_rank2_group,
    find_invariant_subspace,
    is_irreducible,
)

__version__ = "0.1.0"

__all__ = [
    "CycNum",
    "root_of_unity",
    "CapExceeded",
    "GroupSet",
    "PreconditionError",
    "closure",
    "commutator_subgroup",
    "compute_invariants",
    "diagonal_subgroup",
    "gpqa_group",
    "rho2_witness",
    "DenseMatrix",
    "MatrixError",
    "MonomialMatrix",
    "make_gpqa_generators",
    "Subspace",
    "commutant",
    "decompose_rank2_group",
    "find_invariant_subspace",
    "is_irreducible",
]
