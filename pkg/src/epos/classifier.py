"""Local-refutability classification of finite structures.

Over a finite relational structure the decision is exact: the structure
is locally refutable iff some element a sits on the diagonal of every
non-empty relation.  The negative verdict comes with machine-checkable
evidence: a minimal unsatisfiable conjunction of individually satisfiable
atoms, the witness formula pair derived from it, and (on demand) the
pigeonhole sentence that is false yet localizer-true.  For structures
with function symbols only the bounded witness search is available, so
bounds exhaustion is a verdict of its own.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

from .evaluator import defined_relation, solve_pp
from .structures import FiniteStructure, eval_atom
from .syntax import (
    And,
    Atom,
    Formula,
    Fun,
    PPSentence,
    Term,
    Var,
    and_all,
    atom_variables,
    exists_chain,
    free_variables,
)


class Verdict(enum.Enum):
    LOCALLY_REFUTABLE = "locally-refutable"
    NOT_LOCALLY_REFUTABLE = "not-locally-refutable"
    UNKNOWN_AT_BOUND = "unknown-at-bound"


@dataclass(frozen=True)
class SearchBounds:
    """Limits for the witness-conjunction search."""

    max_atoms: int = 3
    max_vars: int = 3
    max_term_depth: int = 1

    def __post_init__(self):
        if self.max_atoms < 1 or self.max_vars < 1 or self.max_term_depth < 0:
            raise ValueError("search bounds must be positive")


@dataclass(frozen=True)
class WitnessPair:
    """Formulas defining non-empty relations whose conjunction defines the
    empty relation, on a shared free-variable tuple of length d."""

    psi0: Formula
    psi1: Formula
    variables: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.variables)


@dataclass(frozen=True)
class ClassificationResult:
    verdict: Verdict
    a_valid_elements: frozenset[int] | None = None
    witness_conjunction: tuple[Atom, ...] | None = None
    witness_pair: WitnessPair | None = None
    bounds: SearchBounds | None = None


@dataclass(frozen=True)
class PigeonholeSpec:
    """Bookkeeping for the pigeonhole sentence: per element the chosen
    diagonal-avoiding relation, the summed arity r, and the rn variables."""

    choices: tuple[tuple[int, str, int], ...]
    total_arity: int
    variables: tuple[str, ...]
    domain_size: int


DEFAULT_MAX_PIGEONHOLE_VARS = 16
DEFAULT_MAX_PIGEONHOLE_CONJUNCTS = 200_000

_VAR_POOL = ("x", "y", "z", "u", "v", "w")


def variable_pool(k: int) -> tuple[str, ...]:
    if k <= len(_VAR_POOL):
        return _VAR_POOL[:k]
    return _VAR_POOL + tuple(f"x{i}" for i in range(len(_VAR_POOL) + 1, k + 1))


# ---------------------------------------------------------------------------
# a-validity


def a_valid_witnesses(S: FiniteStructure) -> frozenset[int]:
    """All elements a whose diagonal tuple lies in every non-empty relation."""
    if S.signature.functions:
        raise ValueError("a-validity is defined for purely relational structures")
    witnesses = []
    for a in range(S.domain_size):
        if all(
            not ext or (a,) * S.signature.relations[rel] in ext
            for rel, ext in S.relations.items()
        ):
            witnesses.append(a)
    return frozenset(witnesses)


# ---------------------------------------------------------------------------
# Witness-conjunction search


def _term_pool(S: FiniteStructure, pool: tuple[str, ...], max_depth: int) -> tuple[list[Term], dict[Term, int]]:
    """Terms over the variable pool up to the depth bound, ordered by
    (depth, declaration order); variables have depth 0, constants depth 1."""
    terms: list[Term] = [Var(v) for v in pool]
    depths: dict[Term, int] = {t: 0 for t in terms}
    for depth in range(1, max_depth + 1):
        fresh: list[Term] = []
        for fn, arity in S.signature.functions.items():
            if arity == 0:
                if depth == 1:
                    fresh.append(Fun(fn))
                continue
            for args in itertools.product(terms, repeat=arity):
                if max(depths[a] for a in args) == depth - 1:
                    fresh.append(Fun(fn, args))
        for t in fresh:
            depths[t] = depth
        terms = terms + fresh
    return terms, depths


def _candidate_atoms(S: FiniteStructure, terms: list[Term], depths: dict[Term, int]) -> list[Atom]:
    """All atoms over the term pool, sorted by (term depth, relation name,
    argument pattern) so the search is canonical."""
    rows: list[tuple[int, str, tuple[int, ...], Atom]] = []
    for rel, arity in sorted(S.signature.relations.items()):
        for idxs in itertools.product(range(len(terms)), repeat=arity):
            args = tuple(terms[i] for i in idxs)
            depth = max((depths[a] for a in args), default=0)
            rows.append((depth, rel, idxs, Atom(rel, args)))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return [row[3] for row in rows]


def _first_empty_combination(masks: list[int], size: int) -> tuple[int, ...] | None:
    """Lexicographically first index combination whose mask intersection is
    empty.  All strictly smaller combinations are known non-empty when this
    runs, so partial intersections never vanish early."""
    total = len(masks)
    if size > total:
        return None
    chosen: list[int] = []

    def scan(start: int, acc: int) -> bool:
        need = size - len(chosen)
        for i in range(start, total - need + 1):
            joint = acc & masks[i]
            chosen.append(i)
            if need == 1:
                if joint == 0:
                    return True
            elif scan(i + 1, joint):
                return True
            chosen.pop()
        return False

    return tuple(chosen) if scan(0, -1) else None


def find_unsat_conjunction(
    S: FiniteStructure,
    max_atoms: int,
    max_vars: int,
    max_term_depth: int = 0,
) -> tuple[Atom, ...] | None:
    """Smallest unsatisfiable conjunction of individually satisfiable atoms
    within the bounds, or None.

    Atoms are enumerated canonically over the fixed variable pool; the
    search precomputes each candidate's truth over all pool assignments as
    a bit vector, scans conjunction sizes ascending and combinations in
    lexicographic order, and re-checks the winner with solve_pp.  Smallest
    size makes the result minimal: dropping any conjunct leaves a
    satisfiable conjunction.
    """
    bounds = SearchBounds(max_atoms, max_vars, max_term_depth)
    pool = variable_pool(bounds.max_vars)
    terms, depths = _term_pool(S, pool, bounds.max_term_depth)
    envs = [
        dict(zip(pool, values))
        for values in itertools.product(range(S.domain_size), repeat=len(pool))
    ]

    atoms: list[Atom] = []
    masks: list[int] = []
    for atom in _candidate_atoms(S, terms, depths):
        mask = 0
        for bit, env in enumerate(envs):
            if eval_atom(S, atom, env):
                mask |= 1 << bit
        if mask:
            atoms.append(atom)
            masks.append(mask)

    for size in range(1, bounds.max_atoms + 1):
        found = _first_empty_combination(masks, size)
        if found is not None:
            conjunction = tuple(atoms[i] for i in found)
            if solve_pp(S, _conjunction_pp(conjunction)) is not None:
                raise RuntimeError("witness search and PP solver disagree")
            return conjunction
    return None


def _conjunction_variables(conjunction: tuple[Atom, ...]) -> tuple[str, ...]:
    out: list[str] = []
    for atom in conjunction:
        for v in atom_variables(atom):
            if v not in out:
                out.append(v)
    return tuple(out)


def _conjunction_pp(conjunction: tuple[Atom, ...]) -> PPSentence:
    return PPSentence(_conjunction_variables(conjunction), conjunction)


# ---------------------------------------------------------------------------
# Witness pairs


def derive_witness_pair(S: FiniteStructure, conjunction: tuple[Atom, ...]) -> WitnessPair:
    """Split a minimal unsatisfiable conjunction of satisfiable atoms into
    (first conjunct, conjunction of the rest) and verify both define
    non-empty relations with empty intersection."""
    conjunction = tuple(conjunction)
    if len(conjunction) < 2:
        raise ValueError("a witness conjunction needs at least two conjuncts")
    if solve_pp(S, _conjunction_pp(conjunction)) is not None:
        raise ValueError("conjunction is satisfiable; no witness pair exists")
    for i in range(len(conjunction)):
        rest = conjunction[:i] + conjunction[i + 1 :]
        if solve_pp(S, _conjunction_pp(rest)) is None:
            raise ValueError(f"conjunction is not minimal: conjunct {i} is redundant")

    variables = _conjunction_variables(conjunction)
    psi0: Formula = conjunction[0]
    psi1: Formula = conjunction[1]
    for atom in conjunction[2:]:
        psi1 = And(psi1, atom)
    pair = WitnessPair(psi0=psi0, psi1=psi1, variables=variables)
    verify_witness_pair(S, pair)
    return pair


def verify_witness_pair(S: FiniteStructure, pair: WitnessPair) -> None:
    """Raise unless psi0 and psi1 define non-empty relations whose
    intersection is empty on the shared tuple."""
    for psi in (pair.psi0, pair.psi1):
        outside = [v for v in free_variables(psi) if v not in pair.variables]
        if outside:
            raise ValueError(f"witness formula has variables {outside} outside the shared tuple")
    r0 = defined_relation(S, pair.psi0, pair.variables)
    r1 = defined_relation(S, pair.psi1, pair.variables)
    if not r0 or not r1:
        raise ValueError("witness formulas must define non-empty relations")
    if r0 & r1:
        raise ValueError("witness conjunction defines a non-empty relation")


# ---------------------------------------------------------------------------
# Classification


def classify(S: FiniteStructure, bounds: SearchBounds | None = None) -> ClassificationResult:
    """Classify a finite structure.

    Relational structures are decided exactly through a-validity; the
    witness evidence search is bounded and may come back empty without
    affecting the verdict.  For structures with function symbols the
    bounded search is all there is, so it either exhibits a witness or
    reports unknown-at-bound.  The search deepens the variable count one
    at a time, which keeps the reported witness minimal in variables too.
    """
    bounds = bounds or SearchBounds()
    relational = not S.signature.functions
    if relational:
        witnesses = a_valid_witnesses(S)
        if witnesses:
            return ClassificationResult(
                verdict=Verdict.LOCALLY_REFUTABLE,
                a_valid_elements=witnesses,
            )

    conjunction = None
    for nvars in range(1, bounds.max_vars + 1):
        conjunction = find_unsat_conjunction(
            S, bounds.max_atoms, nvars, bounds.max_term_depth
        )
        if conjunction is not None:
            break

    if conjunction is not None:
        return ClassificationResult(
            verdict=Verdict.NOT_LOCALLY_REFUTABLE,
            witness_conjunction=conjunction,
            witness_pair=derive_witness_pair(S, conjunction),
            bounds=bounds,
        )
    if relational:
        # The verdict is exact even when no witness fits the bounds.
        return ClassificationResult(verdict=Verdict.NOT_LOCALLY_REFUTABLE, bounds=bounds)
    return ClassificationResult(verdict=Verdict.UNKNOWN_AT_BOUND, bounds=bounds)


# ---------------------------------------------------------------------------
# The pigeonhole sentence


def pigeonhole_choices(S: FiniteStructure) -> tuple[tuple[int, str, int], ...]:
    """Per element, the smallest-arity non-empty relation missing its
    diagonal tuple (ties by declaration order)."""
    if S.signature.functions:
        raise ValueError("the pigeonhole sentence is defined for relational structures")
    if a_valid_witnesses(S):
        raise ValueError(f"structure {S.name!r} is a-valid; no pigeonhole sentence exists")
    choices = []
    for a in range(S.domain_size):
        best = None
        for position, (rel, arity) in enumerate(S.signature.relations.items()):
            ext = S.relations[rel]
            if ext and (a,) * arity not in ext:
                if best is None or (arity, position) < best[:2]:
                    best = (arity, position, rel)
        assert best is not None
        choices.append((a, best[2], best[0]))
    return tuple(choices)


def pigeonhole_sentence(
    S: FiniteStructure,
    *,
    max_variables: int = DEFAULT_MAX_PIGEONHOLE_VARS,
    max_conjuncts: int = DEFAULT_MAX_PIGEONHOLE_CONJUNCTS,
) -> tuple[Formula, PigeonholeSpec]:
    """The sentence that is false in a non-a-valid structure yet has a true
    localizer.

    With R_1..R_n the chosen relations (r_i = arity, r their sum) and rn
    fresh variables, it conjoins R_1(y_1..y_r1) & ... & R_n(...) for every
    injective r-tuple of variables: any assignment maps some r variables
    to one value a_i, and that tuple's R_i conjunct fails, while every
    conjunct in isolation is satisfiable because the relations are
    non-empty.
    """
    from .evaluator import LimitError

    choices = pigeonhole_choices(S)
    total_arity = sum(arity for _, _, arity in choices)
    n = S.domain_size
    var_count = total_arity * n
    if var_count > max_variables:
        raise LimitError(
            f"pigeonhole variable limit exceeded: r*n={var_count} > max_variables={max_variables}"
        )
    groups_count = math.perm(var_count, total_arity)
    if groups_count > max_conjuncts:
        raise LimitError(
            f"pigeonhole conjunct limit exceeded: {groups_count} > max_conjuncts={max_conjuncts}"
        )
    variables = tuple(f"x{i}" for i in range(1, var_count + 1))
    groups: list[Formula] = []
    for ybar in itertools.permutations(variables, total_arity):
        offset = 0
        atoms: list[Formula] = []
        for _, rel, arity in choices:
            atoms.append(Atom(rel, tuple(Var(v) for v in ybar[offset : offset + arity])))
            offset += arity
        groups.append(and_all(atoms))
    sentence = exists_chain(variables, and_all(groups))
    spec = PigeonholeSpec(
        choices=choices,
        total_arity=total_arity,
        variables=variables,
        domain_size=n,
    )
    return sentence, spec
