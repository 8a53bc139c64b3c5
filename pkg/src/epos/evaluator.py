"""Ground-truth model checking and primitive positive solving.

brute_force_eval is the independent oracle every other decision path is
checked against: direct recursive semantics over a finite structure.
solve_pp decides primitive positive sentences by backtracking, and
enumerate_branches resolves each disjunction both ways, turning an
existential positive sentence into the set of primitive positive
sentences of which it is the disjunction.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .structures import FiniteStructure, eval_atom
from .syntax import (
    And,
    Atom,
    Exists,
    Formula,
    Or,
    PPSentence,
    atom_variables,
    count_exists,
    count_or,
    free_variables,
    to_prenex_pp,
    validate_formula,
)

DEFAULT_MAX_BOUND_VARS = 24
DEFAULT_MAX_BRANCHES = 1 << 20
DEFAULT_MAX_DEFINED_VARS = 12

_MISSING = object()


class LimitError(RuntimeError):
    """A configured hard limit would be exceeded; the message names the limit."""


def _require_sentence(f: Formula) -> None:
    free = free_variables(f)
    if free:
        raise ValueError(f"expected a sentence, found free variables {free}")


def _eval(S: FiniteStructure, f: Formula, env: dict[str, int]) -> bool:
    if isinstance(f, Atom):
        return eval_atom(S, f, env)
    if isinstance(f, And):
        return _eval(S, f.left, env) and _eval(S, f.right, env)
    if isinstance(f, Or):
        return _eval(S, f.left, env) or _eval(S, f.right, env)
    saved = env.get(f.var, _MISSING)
    try:
        for element in range(S.domain_size):
            env[f.var] = element
            if _eval(S, f.body, env):
                return True
        return False
    finally:
        if saved is _MISSING:
            del env[f.var]
        else:
            env[f.var] = saved


def brute_force_eval(
    S: FiniteStructure, f: Formula, *, max_vars: int = DEFAULT_MAX_BOUND_VARS
) -> bool:
    """Truth of a sentence by direct recursive semantics; the reference oracle."""
    if not isinstance(S, FiniteStructure):
        raise TypeError("brute force evaluation requires a finite structure")
    validate_formula(f, S.signature)
    _require_sentence(f)
    bound = count_exists(f)
    if bound > max_vars:
        raise LimitError(f"bound-variable limit exceeded: {bound} > max_vars={max_vars}")
    return _eval(S, f, {})


def eval_with_assignment(S: FiniteStructure, f: Formula, assignment: dict[str, int]) -> bool:
    """Truth of a formula whose free variables are fixed by the assignment."""
    validate_formula(f, S.signature)
    missing = [v for v in free_variables(f) if v not in assignment]
    if missing:
        raise ValueError(f"assignment does not cover free variables {missing}")
    return _eval(S, f, dict(assignment))


# ---------------------------------------------------------------------------
# Primitive positive solving


def solve_pp(S: FiniteStructure, pp: PPSentence) -> dict[str, int] | None:
    """A satisfying assignment for a primitive positive sentence, or None.

    Backtracking: variables ordered by descending number of atom
    occurrences (ties by name), values ascending; each atom is checked as
    soon as its last variable is assigned.  Any returned assignment is
    re-verified against every conjunct.
    """
    for atom in pp.atoms:
        validate_formula(atom, S.signature)

    occurrences: Counter[str] = Counter()
    for atom in pp.atoms:
        occurrences.update(atom_variables(atom))
    order = sorted(pp.variables, key=lambda v: (-occurrences[v], v))
    index = {v: i for i, v in enumerate(order)}

    # Atoms become checkable once their deepest variable is assigned;
    # ground atoms are checked up front.
    checks_at: list[list[Atom]] = [[] for _ in order]
    env: dict[str, int] = {}
    for atom in pp.atoms:
        variables = atom_variables(atom)
        if not variables:
            if not eval_atom(S, atom, env):
                return None
        else:
            checks_at[max(index[v] for v in variables)].append(atom)

    def backtrack(depth: int) -> bool:
        if depth == len(order):
            return True
        var = order[depth]
        for value in range(S.domain_size):
            env[var] = value
            if all(eval_atom(S, atom, env) for atom in checks_at[depth]):
                if backtrack(depth + 1):
                    return True
        del env[var]
        return False

    if not backtrack(0):
        return None
    assert all(eval_atom(S, atom, env) for atom in pp.atoms)
    return dict(env)


# ---------------------------------------------------------------------------
# Branch enumeration (resolving every disjunction both ways)


@dataclass(frozen=True)
class Branch:
    """One choice-resolved primitive positive sentence.

    choices holds one 'L'/'R' per disjunction of the source sentence, in
    depth-first traversal order; it uniquely identifies the branch.
    """

    sentence: PPSentence
    choices: str


@dataclass(frozen=True)
class BranchSet:
    branches: tuple[Branch, ...]
    or_count: int


def _resolve(f: Formula, choices: str, i: int) -> tuple[Formula, int]:
    """Resolve disjunctions per the choice vector; unchosen subtrees still
    consume their choice positions so every vector indexes the same nodes."""
    if isinstance(f, Atom):
        return f, i
    if isinstance(f, Exists):
        body, i = _resolve(f.body, choices, i)
        return Exists(f.var, body), i
    if isinstance(f, And):
        left, i = _resolve(f.left, choices, i)
        right, i = _resolve(f.right, choices, i)
        return And(left, right), i
    choice = choices[i]
    i += 1
    if choice == "L":
        resolved, i = _resolve(f.left, choices, i)
        return resolved, i + count_or(f.right)
    i += count_or(f.left)
    return _resolve(f.right, choices, i)


def enumerate_branches(f: Formula, *, max_branches: int = DEFAULT_MAX_BRANCHES) -> BranchSet:
    """All 2^(#Or) branches of a sentence, left choice first, each prenexed."""
    _require_sentence(f)
    ors = count_or(f)
    if 2**ors > max_branches:
        raise LimitError(f"branch limit exceeded: 2^{ors} > max_branches={max_branches}")
    branches = []
    for vector in itertools.product("LR", repeat=ors):
        choices = "".join(vector)
        resolved, used = _resolve(f, choices, 0)
        assert used == ors
        branches.append(Branch(to_prenex_pp(resolved), choices))
    return BranchSet(tuple(branches), ors)


def eval_via_branches(
    S: FiniteStructure,
    f: Formula,
    *,
    max_branches: int = DEFAULT_MAX_BRANCHES,
) -> bool:
    """True iff some branch is satisfiable; agrees with brute_force_eval."""
    validate_formula(f, S.signature)
    branch_set = enumerate_branches(f, max_branches=max_branches)
    return any(solve_pp(S, b.sentence) is not None for b in branch_set.branches)


# ---------------------------------------------------------------------------
# Defined relations


def defined_relation(
    S: FiniteStructure,
    f: Formula,
    variables: tuple[str, ...] | list[str],
    *,
    max_vars: int = DEFAULT_MAX_DEFINED_VARS,
) -> frozenset[tuple[int, ...]]:
    """The relation a formula defines on the given variable tuple."""
    validate_formula(f, S.signature)
    variables = tuple(variables)
    if len(variables) > max_vars:
        raise LimitError(
            f"defined-relation arity limit exceeded: {len(variables)} > max_vars={max_vars}"
        )
    outside = [v for v in free_variables(f) if v not in variables]
    if outside:
        raise ValueError(f"free variables {outside} are not in the relation tuple")
    held = set()
    for values in itertools.product(range(S.domain_size), repeat=len(variables)):
        if _eval(S, f, dict(zip(variables, values))):
            held.add(values)
    return frozenset(held)
