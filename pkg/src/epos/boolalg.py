"""Catalog of finite powerset algebras with their classifications.

The infinite powerset algebra is locally refutable, but no finite one is:
every finite instance admits an unsatisfiable conjunction of satisfiable
disequalities (for one atom, pinning x away from both constants already
does it).  The catalog documents that boundary by classifying each finite
instance; only the finite rewriting step and the symbolic naturals oracle
represent the infinite side.
"""

from __future__ import annotations

from .classifier import ClassificationResult, SearchBounds, classify
from .structures import FiniteStructure, powerset_algebra, powerset_signature
from .syntax import Signature

BA_CATALOG_MAX_K = 3

# Witness searches sized per instance: the k=1 witness needs one variable
# and depth-1 terms, k=2 needs two variables, k=3 needs four atoms.
_CATALOG_BOUNDS = {
    1: SearchBounds(max_atoms=2, max_vars=1, max_term_depth=1),
    2: SearchBounds(max_atoms=3, max_vars=2, max_term_depth=1),
    3: SearchBounds(max_atoms=4, max_vars=2, max_term_depth=1),
}


def ba_signature() -> Signature:
    return powerset_signature()


def ba_catalog_entry(k: int) -> tuple[FiniteStructure, ClassificationResult]:
    """The k-th powerset algebra together with its classification.

    Classification search cost grows steeply with k, so the catalog stops
    at k=3.  Expected verdict is not-locally-refutable throughout; for
    k=1 the witness is NEQ(x, zero) & NEQ(x, one).
    """
    if not isinstance(k, int) or not 1 <= k <= BA_CATALOG_MAX_K:
        raise ValueError(f"catalog entries exist for 1 <= k <= {BA_CATALOG_MAX_K}")
    structure = powerset_algebra(k)
    return structure, classify(structure, _CATALOG_BOUNDS[k])
