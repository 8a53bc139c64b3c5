"""Constructive reductions between satisfiability problems.

The 3-SAT gadget and the general NNF embedding encode Boolean structure
through a witness pair (psi0, psi1): a variable block satisfies psi1 for
"true" and psi0 for "false", and can always do one of the two.  The
product reduction collapses several relations into their Cartesian
product, and the Boolean-algebra bridge turns CNF satisfiability into a
single disequality over a powerset algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .classifier import WitnessPair
from .evaluator import LimitError
from .structures import FiniteStructure
from .syntax import (
    And,
    Atom,
    CNF,
    Exists,
    Formula,
    Fun,
    Or,
    Signature,
    Term,
    Var,
    all_names,
    and_all,
    exists_chain,
    free_variables,
    fresh_name,
    rename_free,
    term_variables,
    validate_formula,
)

DEFAULT_MAX_PRODUCT_ARITY = 16
DEFAULT_MAX_PRODUCT_TUPLES = 200_000

_BA_FUNCTIONS = {"meet": 2, "join": 2, "c": 1, "zero": 0, "one": 0}


# ---------------------------------------------------------------------------
# Propositional formulas in negation normal form

# Leaves are nonzero ints, DIMACS style: +i is the variable, -i its negation.


@dataclass(frozen=True)
class PropAnd:
    left: "Prop"
    right: "Prop"


@dataclass(frozen=True)
class PropOr:
    left: "Prop"
    right: "Prop"


Prop = int | PropAnd | PropOr


def prop_variables(prop: Prop) -> list[int]:
    """Sorted variable indices occurring in the formula."""
    seen: set[int] = set()

    def go(p: Prop) -> None:
        if isinstance(p, int):
            if p == 0:
                raise ValueError("literal 0 is not allowed")
            seen.add(abs(p))
        elif isinstance(p, (PropAnd, PropOr)):
            go(p.left)
            go(p.right)
        else:
            raise ValueError(f"not a negation normal form node: {p!r}")

    go(prop)
    return sorted(seen)


def prop_satisfiable(prop: Prop) -> bool:
    """Brute-force satisfiability over the formula's variables."""
    variables = prop_variables(prop)

    def holds(p: Prop, values: dict[int, bool]) -> bool:
        if isinstance(p, int):
            return values[abs(p)] if p > 0 else not values[abs(p)]
        if isinstance(p, PropAnd):
            return holds(p.left, values) and holds(p.right, values)
        return holds(p.left, values) or holds(p.right, values)

    for bits in itertools.product((False, True), repeat=len(variables)):
        if holds(prop, dict(zip(variables, bits))):
            return True
    return False


def cnf_to_prop(cnf: CNF) -> Prop:
    """Read a CNF as an NNF formula: conjunction of disjunctions of literals."""
    if not cnf.clauses:
        raise ValueError("an empty CNF has no formula form")
    clause_props: list[Prop] = []
    for clause in cnf.clauses:
        p: Prop = clause[0]
        for lit in clause[1:]:
            p = PropOr(p, lit)
        clause_props.append(p)
    out = clause_props[0]
    for p in clause_props[1:]:
        out = PropAnd(out, p)
    return out


def cnf_satisfiable(cnf: CNF) -> bool:
    """Brute-force DIMACS satisfiability; the reference for every reduction."""
    for bits in itertools.product((False, True), repeat=cnf.num_vars):
        if all(any((lit > 0) == bits[abs(lit) - 1] for lit in clause) for clause in cnf.clauses):
            return True
    return False


# ---------------------------------------------------------------------------
# Witness-pair plumbing


@dataclass(frozen=True)
class GadgetInstance:
    """A reduction output formula plus the fresh variable block introduced
    for each Boolean variable index."""

    formula: Formula
    blocks: Mapping[int, tuple[str, ...]]


def _check_pair(pair: WitnessPair) -> None:
    if pair.arity < 1:
        raise ValueError("witness pair must have a non-empty shared variable tuple")
    if len(set(pair.variables)) != pair.arity:
        raise ValueError("witness pair variables must be distinct")
    for psi in (pair.psi0, pair.psi1):
        outside = [v for v in free_variables(psi) if v not in pair.variables]
        if outside:
            raise ValueError(f"unverified witness pair: free variables {outside} escape the tuple")


def _block_namer(pair: WitnessPair) -> tuple[set[str], "callable"]:
    used = all_names(pair.psi0) | all_names(pair.psi1) | set(pair.variables)

    def block(index: int) -> tuple[str, ...]:
        names = []
        for j in range(1, pair.arity + 1):
            name = fresh_name(f"v{index}_b{j}", used)
            used.add(name)
            names.append(name)
        return tuple(names)

    return used, block


def _instantiate(psi: Formula, pair: WitnessPair, block: tuple[str, ...]) -> Formula:
    return rename_free(psi, dict(zip(pair.variables, block)))


# ---------------------------------------------------------------------------
# 3-SAT gadget


def threesat_to_expos(cnf: CNF, pair: WitnessPair, *, pad: bool = True) -> GadgetInstance:
    """Encode a 3-CNF as an existential positive sentence over the pair's
    structure.

    One fresh d-variable block per Boolean variable; per variable the
    conjunct psi0(block) | psi1(block); per clause the disjunction
    psi_i1(block_j1) | psi_i2(block_j2) | psi_i3(block_j3) with index 1
    for positive and 0 for negated literals.  Clauses shorter than three
    literals are padded by repeating the first literal (pad=False rejects
    them); longer clauses are always rejected.  The sentence is true in
    the source structure iff the CNF is satisfiable.
    """
    _check_pair(pair)
    used, make_block = _block_namer(pair)

    clauses = []
    for clause in cnf.clauses:
        if len(clause) > 3:
            raise ValueError(f"clause {clause} has more than 3 literals")
        if len(clause) < 3:
            if not pad:
                raise ValueError(f"clause {clause} has fewer than 3 literals and padding is off")
            clause = clause + (clause[0],) * (3 - len(clause))
        clauses.append(clause)

    blocks = {i: make_block(i) for i in range(1, cnf.num_vars + 1)}
    if not blocks and not clauses:
        # Degenerate empty CNF: satisfiable, so emit an always-true gadget.
        block = make_block(0)
        body = Or(_instantiate(pair.psi0, pair, block), _instantiate(pair.psi1, pair, block))
        return GadgetInstance(formula=exists_chain(block, body), blocks={})

    parts: list[Formula] = []
    for i in range(1, cnf.num_vars + 1):
        parts.append(
            Or(
                _instantiate(pair.psi0, pair, blocks[i]),
                _instantiate(pair.psi1, pair, blocks[i]),
            )
        )
    for clause in clauses:
        literals = [
            _instantiate(pair.psi1 if lit > 0 else pair.psi0, pair, blocks[abs(lit)])
            for lit in clause
        ]
        parts.append(Or(Or(literals[0], literals[1]), literals[2]))

    quantified: list[str] = [v for i in sorted(blocks) for v in blocks[i]]
    return GadgetInstance(formula=exists_chain(quantified, and_all(parts)), blocks=blocks)


# ---------------------------------------------------------------------------
# General NNF embedding


def boolean_embed(prop: Prop, pair: WitnessPair) -> Formula:
    """Embed an NNF propositional formula: literal v becomes psi1 on v's
    block, a negated literal psi0 (negation removed by exchanging the two
    formulas), and per variable the conjunct psi0 | psi1 keeps every block
    decodable.  True in the source structure iff prop is satisfiable."""
    _check_pair(pair)
    variables = prop_variables(prop)
    used, make_block = _block_namer(pair)
    blocks = {v: make_block(v) for v in variables}

    def skeleton(p: Prop) -> Formula:
        if isinstance(p, int):
            psi = pair.psi1 if p > 0 else pair.psi0
            return _instantiate(psi, pair, blocks[abs(p)])
        if isinstance(p, PropAnd):
            return And(skeleton(p.left), skeleton(p.right))
        return Or(skeleton(p.left), skeleton(p.right))

    parts: list[Formula] = [
        Or(
            _instantiate(pair.psi0, pair, blocks[v]),
            _instantiate(pair.psi1, pair, blocks[v]),
        )
        for v in variables
    ]
    parts.append(skeleton(prop))
    quantified = [name for v in variables for name in blocks[v]]
    return exists_chain(quantified, and_all(parts))


# ---------------------------------------------------------------------------
# Product reduction


def product_structure(
    S: FiniteStructure,
    *,
    max_arity: int = DEFAULT_MAX_PRODUCT_ARITY,
    max_tuples: int = DEFAULT_MAX_PRODUCT_TUPLES,
) -> FiniteStructure:
    """Collapse all relations into their Cartesian product R, concatenating
    tuples in declaration order.  Every relation must be non-empty."""
    if S.signature.functions:
        raise ValueError("the product reduction is defined for relational structures")
    names = list(S.signature.relations)
    if not names:
        raise ValueError("the product reduction needs at least one relation")
    for rel in names:
        if not S.relations[rel]:
            raise ValueError(f"relation {rel!r} is empty")
    total_arity = sum(S.signature.relations[rel] for rel in names)
    if total_arity > max_arity:
        raise LimitError(f"product arity limit exceeded: {total_arity} > max_arity={max_arity}")
    size = 1
    for rel in names:
        size *= len(S.relations[rel])
    if size > max_tuples:
        raise LimitError(f"product size limit exceeded: {size} > max_tuples={max_tuples}")
    extension = frozenset(
        tuple(itertools.chain.from_iterable(parts))
        for parts in itertools.product(*(sorted(S.relations[rel]) for rel in names))
    )
    return FiniteStructure(
        signature=Signature(relations={"R": total_arity}),
        domain_size=S.domain_size,
        relations={"R": extension},
        name=f"{S.name}_product",
    )


def product_rewrite(f: Formula, S: FiniteStructure) -> Formula:
    """Rewrite a formula over S into one over the product structure.

    Each atom R_i(t) becomes the product atom with t in R_i's slice and
    existentially quantified fresh padding variables everywhere else;
    padding is fresh per atom occurrence so atoms stay independent.  The
    rewrite of a sentence is true in product_structure(S) iff the
    original is true in S.
    """
    validate_formula(f, S.signature)
    names = list(S.signature.relations)
    for rel in names:
        if not S.relations[rel]:
            raise ValueError(f"relation {rel!r} is empty")
    arities = [S.signature.relations[rel] for rel in names]
    used = set(all_names(f))
    counter = itertools.count(1)

    def rewrite(node: Formula) -> Formula:
        if isinstance(node, Atom):
            ordinal = next(counter)
            slot = 0
            padding: list[str] = []
            args: list[Term] = []
            for rel, arity in zip(names, arities):
                if rel == node.relation:
                    args.extend(node.args)
                    slot += arity
                else:
                    for _ in range(arity):
                        slot += 1
                        name = fresh_name(f"p{ordinal}_{slot}", used)
                        used.add(name)
                        padding.append(name)
                        args.append(Var(name))
            return exists_chain(padding, Atom("R", tuple(args)))
        if isinstance(node, Exists):
            return Exists(node.var, rewrite(node.body))
        if isinstance(node, And):
            return And(rewrite(node.left), rewrite(node.right))
        return Or(rewrite(node.left), rewrite(node.right))

    return rewrite(f)


# ---------------------------------------------------------------------------
# SAT over powerset algebras


def sat_to_ba_expos(cnf: CNF) -> Formula:
    """Mirror a CNF as a term over {meet, join, c} and assert it differs
    from zero: true in every powerset algebra (any k >= 1) iff the CNF is
    satisfiable, because base points act independently."""
    if not cnf.clauses:
        raise ValueError("the reduction needs at least one clause")

    def literal(lit: int) -> Term:
        v = Var(f"v{abs(lit)}")
        return v if lit > 0 else Fun("c", (v,))

    clause_terms: list[Term] = []
    for clause in cnf.clauses:
        t = literal(clause[0])
        for lit in clause[1:]:
            t = Fun("join", (t, literal(lit)))
        clause_terms.append(t)
    body = clause_terms[0]
    for t in clause_terms[1:]:
        body = Fun("meet", (body, t))
    atom = Atom("NEQ", (body, Fun("zero")))
    variables = [f"v{i}" for i in range(1, cnf.num_vars + 1)]
    return exists_chain(variables, atom)


def normalize_diseq(lhs: Term, rhs: Term) -> Atom:
    """Rewrite lhs != rhs as symmetric-difference(lhs, rhs) != zero, the
    canonical expansion join(meet(lhs, c(rhs)), meet(c(lhs), rhs))."""
    for term in (lhs, rhs):
        _check_ba_term(term)
    diff = Fun(
        "join",
        (
            Fun("meet", (lhs, Fun("c", (rhs,)))),
            Fun("meet", (Fun("c", (lhs,)), rhs)),
        ),
    )
    return Atom("NEQ", (diff, Fun("zero")))


def _check_ba_term(term: Term) -> None:
    if isinstance(term, Var):
        return
    arity = _BA_FUNCTIONS.get(term.name)
    if arity is None or len(term.args) != arity:
        raise ValueError(f"foreign symbol {term.name!r} in Boolean-algebra term")
    for arg in term.args:
        _check_ba_term(arg)


def ba_term_variables(term: Term) -> list[str]:
    return term_variables(term)
