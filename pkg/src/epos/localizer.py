"""Boolean skeletons of existential positive formulas.

localize maps a formula to a quantifier-free true/false tree by deciding
each atom's satisfiability in isolation.  A false skeleton always means
the sentence is false; on locally refutable structures the skeleton value
equals the truth value, which decide_fast_path exploits (and it refuses
to answer for structures not known to be locally refutable).
"""

from __future__ import annotations

from dataclasses import dataclass

from .structures import AtomOracle, FiniteStructure, Structure, atom_satisfiable
from .syntax import And, Atom, Exists, Formula, Fun, Or, Term, Var, free_variables, validate_formula


@dataclass(frozen=True)
class TrueLeaf:
    pass


@dataclass(frozen=True)
class FalseLeaf:
    pass


@dataclass(frozen=True)
class BoolAnd:
    left: "BoolFormula"
    right: "BoolFormula"


@dataclass(frozen=True)
class BoolOr:
    left: "BoolFormula"
    right: "BoolFormula"


BoolFormula = TrueLeaf | FalseLeaf | BoolAnd | BoolOr

TRUE = TrueLeaf()
FALSE = FalseLeaf()


class NotLocallyRefutableError(RuntimeError):
    """The fast path was asked to decide over a structure not known locally refutable."""


def _atom_pattern(atom: Atom) -> Atom:
    """Canonical form of an atom up to injective variable renaming."""
    seen: dict[str, str] = {}

    def canon(t: Term) -> Term:
        if isinstance(t, Var):
            if t.name not in seen:
                seen[t.name] = f"_{len(seen)}"
            return Var(seen[t.name])
        return Fun(t.name, tuple(canon(a) for a in t.args))

    return Atom(atom.relation, tuple(canon(t) for t in atom.args))


def localize(G: Structure, f: Formula) -> BoolFormula:
    """The structure's localizer: quantifiers dropped, connectives kept,
    atoms replaced by their isolated satisfiability.

    Satisfiability is memoized per atom pattern within the call, so
    repeated atoms (up to variable renaming) cost one check.
    """
    validate_formula(f, G.signature)
    memo: dict[Atom, bool] = {}

    def go(node: Formula) -> BoolFormula:
        if isinstance(node, Atom):
            pattern = _atom_pattern(node)
            if pattern not in memo:
                memo[pattern] = atom_satisfiable(G, node)
            return TRUE if memo[pattern] else FALSE
        if isinstance(node, Exists):
            return go(node.body)
        if isinstance(node, And):
            return BoolAnd(go(node.left), go(node.right))
        return BoolOr(go(node.left), go(node.right))

    return go(f)


def eval_bool(b: BoolFormula) -> bool:
    if isinstance(b, TrueLeaf):
        return True
    if isinstance(b, FalseLeaf):
        return False
    if isinstance(b, BoolAnd):
        return eval_bool(b.left) and eval_bool(b.right)
    return eval_bool(b.left) or eval_bool(b.right)


def decide_fast_path(G: Structure, f: Formula) -> bool:
    """Decide a sentence via its localizer value.

    Sound only on locally refutable structures, so this refuses oracles
    without the flag, finite structures with function symbols (no finite
    verification exists), and finite relational structures that are not
    a-valid.
    """
    free = free_variables(f)
    if free:
        raise ValueError(f"expected a sentence, found free variables {free}")
    if isinstance(G, AtomOracle):
        if not G.locally_refutable:
            raise NotLocallyRefutableError(
                f"oracle {G.name!r} is not declared locally refutable"
            )
    elif isinstance(G, FiniteStructure):
        if G.signature.functions:
            raise NotLocallyRefutableError(
                "local refutability of structures with function symbols cannot be verified"
            )
        from .classifier import a_valid_witnesses

        if not a_valid_witnesses(G):
            raise NotLocallyRefutableError(
                f"structure {G.name!r} is not locally refutable (no a-valid element)"
            )
    else:
        raise TypeError(f"unsupported structure {G!r}")
    return eval_bool(localize(G, f))
