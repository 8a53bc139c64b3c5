"""Seeded random structures, sentences, and CNFs.

Everything here is driven by an explicit seed (or an already-seeded
random.Random), so corpora are reproducible across runs and platforms.
"""

from __future__ import annotations

import itertools
import random

from .classifier import a_valid_witnesses
from .reductions import Prop, PropAnd, PropOr
from .structures import FiniteStructure
from .syntax import And, Atom, CNF, Exists, Formula, Fun, Or, Signature, Term, Var

_NAMES = ["x", "y", "z", "u", "v", "w"]


def rng_from(seed: int | random.Random) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def random_structure(
    seed: int | random.Random,
    *,
    domain_size: int | None = None,
    num_relations: int | None = None,
    max_arity: int = 3,
    density: float = 0.5,
    ensure: str | None = None,
    name: str | None = None,
) -> FiniteStructure:
    """A random relational structure; ensure forces 'a-valid' or 'non-a-valid'.

    A-validity is forced by inserting one element's diagonal into every
    non-empty relation; non-a-validity by knocking diagonals out (with
    rejection sampling as a backstop, so the result always re-verifies).
    """
    rng = rng_from(seed)
    if ensure not in (None, "a-valid", "non-a-valid"):
        raise ValueError(f"unknown ensure mode {ensure!r}")
    for _ in range(200):
        n = domain_size if domain_size is not None else rng.randint(1, 3)
        if ensure == "non-a-valid" and n < 2:
            n = rng.randint(2, 3)
        m = num_relations if num_relations is not None else rng.randint(1, 2)
        arities = [rng.randint(1, max_arity) for _ in range(m)]
        relations = {}
        for idx, arity in enumerate(arities):
            ext = {
                t
                for t in itertools.product(range(n), repeat=arity)
                if rng.random() < density
            }
            relations[f"R{idx + 1}"] = ext

        if ensure == "a-valid":
            a = rng.randrange(n)
            for idx, arity in enumerate(arities):
                if relations[f"R{idx + 1}"]:
                    relations[f"R{idx + 1}"].add((a,) * arity)
        elif ensure == "non-a-valid":
            for a in range(n):
                rel = f"R{rng.randrange(m) + 1}"
                arity = arities[int(rel[1:]) - 1]
                relations[rel].discard((a,) * arity)
                if not relations[rel]:
                    candidates = [
                        t
                        for t in itertools.product(range(n), repeat=arity)
                        if len(set(t)) > 1 or (arity == 1 and t != (a,))
                    ]
                    relations[rel].add(rng.choice(candidates))

        structure = FiniteStructure(
            signature=Signature(relations={r: arities[int(r[1:]) - 1] for r in relations}),
            domain_size=n,
            relations={r: frozenset(ext) for r, ext in relations.items()},
            name=name or "G",
        )
        witnesses = a_valid_witnesses(structure)
        if ensure == "a-valid" and not witnesses:
            continue
        if ensure == "non-a-valid" and witnesses:
            continue
        return structure
    raise RuntimeError(f"could not generate a structure with ensure={ensure!r}")


def random_term(rng: random.Random, sig: Signature, scope: list[str], max_depth: int) -> Term:
    constants = [f for f, a in sig.functions.items() if a == 0]
    if max_depth <= 0 or not sig.functions or rng.random() < 0.5:
        if scope and (not constants or rng.random() < 0.7):
            return Var(rng.choice(scope))
        if constants:
            return Fun(rng.choice(constants))
        return Var(rng.choice(scope))
    name, arity = rng.choice(list(sig.functions.items()))
    if arity == 0:
        return Fun(name)
    return Fun(name, tuple(random_term(rng, sig, scope, max_depth - 1) for _ in range(arity)))


def random_sentence(
    seed: int | random.Random,
    sig: Signature,
    *,
    max_bound_vars: int = 6,
    max_atoms: int = 8,
    max_or_nodes: int = 3,
    max_term_depth: int = 0,
) -> Formula:
    """A random existential positive sentence over the signature.

    Bound-variable, atom, and disjunction counts stay within the caps;
    variable names are reused from a small pool so shadowing shows up.
    """
    rng = rng_from(seed)
    if not sig.relations:
        raise ValueError("the signature declares no relations")
    relations = list(sig.relations.items())
    atom_goal = rng.randint(1, max_atoms)
    or_budget = rng.randint(0, max_or_nodes)
    var_budget = rng.randint(1, max_bound_vars)

    def atom(scope: list[str]) -> Atom:
        rel, arity = rng.choice(relations)
        return Atom(rel, tuple(random_term(rng, sig, scope, max_term_depth) for _ in range(arity)))

    def gen(scope: list[str], atoms: int, vars_left: int, ors: int) -> tuple[Formula, int, int]:
        """Returns (formula, disjunctions used, quantifiers used)."""
        if not scope or (atoms == 1 and vars_left and rng.random() < 0.3):
            v = rng.choice(_NAMES)
            body, ou, vu = gen(scope + [v], atoms, vars_left - 1, ors)
            return Exists(v, body), ou, vu + 1
        if atoms == 1:
            return atom(scope), 0, 0
        roll = rng.random()
        if vars_left and roll < 0.25:
            v = rng.choice(_NAMES)
            body, ou, vu = gen(scope + [v], atoms, vars_left - 1, ors)
            return Exists(v, body), ou, vu + 1
        split = rng.randint(1, atoms - 1)
        is_or = bool(ors) and roll < 0.6
        child_ors = ors - 1 if is_or else ors
        left_ors = rng.randint(0, child_ors)
        left_vars = rng.randint(0, vars_left)
        left, lo, lv = gen(scope, split, left_vars, left_ors)
        right, ro, rv = gen(scope, atoms - split, vars_left - lv, child_ors - lo)
        if is_or:
            return Or(left, right), lo + ro + 1, lv + rv
        return And(left, right), lo + ro, lv + rv

    sentence, _, _ = gen([], atom_goal, var_budget, or_budget)
    return sentence


def random_cnf(
    seed: int | random.Random,
    *,
    max_vars: int = 3,
    max_clauses: int = 3,
    width: int = 3,
    num_vars: int | None = None,
    num_clauses: int | None = None,
) -> CNF:
    rng = rng_from(seed)
    nv = num_vars if num_vars is not None else rng.randint(1, max_vars)
    nc = num_clauses if num_clauses is not None else rng.randint(0, max_clauses)
    clauses = tuple(
        tuple(rng.choice((-1, 1)) * rng.randint(1, nv) for _ in range(width)) for _ in range(nc)
    )
    return CNF(nv, clauses)


def random_nnf(seed: int | random.Random, *, max_vars: int = 4, max_leaves: int = 6) -> Prop:
    rng = rng_from(seed)
    nv = rng.randint(1, max_vars)

    def gen(leaves: int) -> Prop:
        if leaves == 1:
            return rng.choice((-1, 1)) * rng.randint(1, nv)
        split = rng.randint(1, leaves - 1)
        node = PropAnd if rng.random() < 0.5 else PropOr
        return node(gen(split), gen(leaves - split))

    return gen(rng.randint(1, max_leaves))
