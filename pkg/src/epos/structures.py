"""Finite structures and symbolic atom oracles.

Explicit finite structures carry relation extensions as tuple sets and
total function tables; term/atom evaluation and per-atom satisfiability
run directly against them.  Infinite structures such as the naturals
with disequality appear only as AtomOracle values: a per-atom decision
rule plus a declared locally-refutable flag, which is all the localizer
path needs.  Domain elements are dense integers 0..n-1.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Mapping as MappingABC, Set as SetABC
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .syntax import (
    Atom,
    Fun,
    Signature,
    SignatureError,
    Term,
    Var,
    atom_variables,
)

Assignment = Mapping[str, int]

POWERSET_MAX_K = 16
# Tables are materialized up to this k and computed on demand beyond it.
_POWERSET_EXPLICIT_K = 8

_SERIALIZE_LIMIT = 100_000


@dataclass(frozen=True)
class FiniteStructure:
    """Finite structure: relation extensions plus total function tables.

    Explicit extensions (set/frozenset/list) and tables (dict) are copied
    and fully validated; other set-like / mapping-like values are trusted
    to be internally consistent and are only checked for size, which lets
    large powerset algebras stay lazy.
    """

    signature: Signature
    domain_size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    functions: Mapping[str, Mapping[tuple[int, ...], int]] = field(default_factory=dict)
    name: str = "S"

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValueError("domain_size must be positive")
        n = self.domain_size
        if set(self.relations) != set(self.signature.relations):
            raise SignatureError("relation extensions must match the declared relations")
        if set(self.functions) != set(self.signature.functions):
            raise SignatureError("function tables must match the declared functions")
        relations = {}
        for rel, arity in self.signature.relations.items():
            ext = self.relations[rel]
            if isinstance(ext, (set, frozenset, list, tuple)):
                ext = frozenset(tuple(t) for t in ext)
                for t in ext:
                    if len(t) != arity:
                        raise ValueError(f"tuple {t} in {rel!r} has arity {len(t)}, expected {arity}")
                    if any(not (0 <= e < n) for e in t):
                        raise ValueError(f"tuple {t} in {rel!r} leaves the domain 0..{n - 1}")
            relations[rel] = ext
        functions = {}
        for fn, arity in self.signature.functions.items():
            table = self.functions[fn]
            if isinstance(table, dict):
                table = dict(table)
                for key, value in table.items():
                    if len(key) != arity or any(not (0 <= e < n) for e in key):
                        raise ValueError(f"bad argument tuple {key} in table of {fn!r}")
                    if not (0 <= value < n):
                        raise ValueError(f"value {value} of {fn!r}{key} leaves the domain")
            if len(table) != n**arity:
                raise ValueError(f"function table of {fn!r} is not total")
            functions[fn] = table
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "functions", functions)


@dataclass(frozen=True)
class AtomOracle:
    """Per-atom satisfiability rule standing in for an infinite structure.

    The rule must be invariant under injective renaming of variables; the
    locally_refutable flag is declared, not computed.
    """

    signature: Signature
    rule: Callable[[Atom], bool]
    locally_refutable: bool
    name: str = "oracle"


Structure = FiniteStructure | AtomOracle


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(S: FiniteStructure, term: Term, assignment: Assignment) -> int:
    if isinstance(term, Var):
        try:
            return assignment[term.name]
        except KeyError:
            raise SignatureError(f"unbound variable {term.name!r}") from None
    table = S.functions.get(term.name)
    if table is None:
        raise SignatureError(f"unknown function symbol {term.name!r}")
    return table[tuple(eval_term(S, a, assignment) for a in term.args)]


def eval_atom(S: FiniteStructure, atom: Atom, assignment: Assignment) -> bool:
    ext = S.relations.get(atom.relation)
    if ext is None:
        raise SignatureError(f"unknown relation symbol {atom.relation!r}")
    return tuple(eval_term(S, t, assignment) for t in atom.args) in ext


def atom_satisfiable(S: Structure, atom: Atom) -> bool:
    """True iff some assignment to the atom's own variables satisfies it.

    Enumerates only the variables of this atom, never a surrounding
    formula's; oracles answer through their decision rule.
    """
    if isinstance(S, AtomOracle):
        return S.rule(atom)
    variables = atom_variables(atom)
    for values in itertools.product(range(S.domain_size), repeat=len(variables)):
        if eval_atom(S, atom, dict(zip(variables, values))):
            return True
    return False


# ---------------------------------------------------------------------------
# Powerset algebras


class _BitwiseTable(MappingABC):
    """Total function table computed on demand from a bitmask operation."""

    def __init__(self, domain_size: int, arity: int, op: Callable[..., int], label: str):
        self._n = domain_size
        self._arity = arity
        self._op = op
        self._label = label

    def __getitem__(self, key):
        if len(key) != self._arity or any(not (0 <= e < self._n) for e in key):
            raise KeyError(key)
        return self._op(*key)

    def __len__(self):
        return self._n**self._arity

    def __iter__(self):
        return itertools.product(range(self._n), repeat=self._arity)

    def __repr__(self):
        return f"<{self._label} table on {self._n} elements>"


class _DistinctPairs(SetABC):
    """The disequality extension {(i, j) : i != j} without materializing it."""

    def __init__(self, domain_size: int):
        self._n = domain_size

    def __contains__(self, pair):
        if not isinstance(pair, tuple) or len(pair) != 2:
            return False
        i, j = pair
        return 0 <= i < self._n and 0 <= j < self._n and i != j

    def __len__(self):
        return self._n * self._n - self._n

    def __iter__(self):
        return (
            (i, j)
            for i in range(self._n)
            for j in range(self._n)
            if i != j
        )

    def __repr__(self):
        return f"<NEQ on {self._n} elements>"


def powerset_signature() -> Signature:
    return Signature(
        relations={"NEQ": 2},
        functions={"meet": 2, "join": 2, "c": 1, "zero": 0, "one": 0},
    )


def powerset_algebra(k: int) -> FiniteStructure:
    """The algebra of subsets of a k-element set, elements encoded as bitmasks.

    meet/join/c are intersection/union/complement, zero/one the empty and
    full set, NEQ all pairs of distinct elements.  Supports 1 <= k <=
    POWERSET_MAX_K (16); big instances use lazy tables.
    """
    if not isinstance(k, int) or not 1 <= k <= POWERSET_MAX_K:
        raise ValueError(f"k must be an integer between 1 and {POWERSET_MAX_K}")
    n = 1 << k
    full = n - 1
    if k <= _POWERSET_EXPLICIT_K:
        pairs = range(n)
        relations = {"NEQ": frozenset((i, j) for i in pairs for j in pairs if i != j)}
        functions = {
            "meet": {(i, j): i & j for i in pairs for j in pairs},
            "join": {(i, j): i | j for i in pairs for j in pairs},
            "c": {(i,): full ^ i for i in pairs},
            "zero": {(): 0},
            "one": {(): full},
        }
    else:
        relations = {"NEQ": _DistinctPairs(n)}
        functions = {
            "meet": _BitwiseTable(n, 2, lambda a, b: a & b, "meet"),
            "join": _BitwiseTable(n, 2, lambda a, b: a | b, "join"),
            "c": _BitwiseTable(n, 1, lambda a: full ^ a, "c"),
            "zero": _BitwiseTable(n, 0, lambda: 0, "zero"),
            "one": _BitwiseTable(n, 0, lambda: full, "one"),
        }
    return FiniteStructure(
        signature=powerset_signature(),
        domain_size=n,
        relations=relations,
        functions=functions,
        name=f"powerset_{k}",
    )


# ---------------------------------------------------------------------------
# Oracles for the disequality examples over the naturals


def nat_neq_oracle(with_equality: bool = False) -> AtomOracle:
    """Oracle for (N; !=), optionally extended with an EQ relation.

    NEQ(x, y) is satisfiable exactly when the two argument variables are
    distinct names; EQ atoms are always satisfiable.  Without equality the
    structure is locally refutable, with it the flag is off.
    """
    relations = {"NEQ": 2}
    if with_equality:
        relations["EQ"] = 2
    sig = Signature(relations=relations)

    def rule(atom: Atom) -> bool:
        if atom.relation not in sig.relations:
            raise SignatureError(f"unknown relation symbol {atom.relation!r}")
        if len(atom.args) != 2 or any(not isinstance(t, Var) for t in atom.args):
            raise SignatureError("the naturals oracle only handles binary atoms over variables")
        if atom.relation == "EQ":
            return True
        left, right = atom.args
        return left.name != right.name

    return AtomOracle(
        signature=sig,
        rule=rule,
        locally_refutable=not with_equality,
        name="nat_neq_eq" if with_equality else "nat_neq",
    )


def builtin_structure(name: str) -> Structure | None:
    """Resolve a catalog name: powerset:k, nat_neq, nat_neq_eq."""
    if name == "nat_neq":
        return nat_neq_oracle(False)
    if name == "nat_neq_eq":
        return nat_neq_oracle(True)
    m = re.fullmatch(r"powerset:(\d+)", name)
    if m:
        return powerset_algebra(int(m.group(1)))
    return None


# ---------------------------------------------------------------------------
# Structure text format


class StructureFormatError(ValueError):
    """Text does not conform to the structure file format."""


def parse_structure(text: str) -> FiniteStructure:
    """Read the line-oriented structure format ('#' starts a comment).

    Directives: ``structure IDENT``, ``domain INT``, ``rel IDENT INT {
    t1 ; t2 ; ... }``, ``fun IDENT INT { a1 -> v ; ... }``, and ``const
    IDENT INT`` as sugar for a 0-ary function.  Brace blocks may span
    lines.  Relations of arity 0 are not expressible in this format.
    """
    tokens: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        line = line.replace("->", " -> ")
        for ch in "{};":
            line = line.replace(ch, f" {ch} ")
        tokens.extend((tok, lineno) for tok in line.split())

    pos = 0

    def take(what: str) -> tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise StructureFormatError(f"unexpected end of input, expected {what}")
        tok = tokens[pos]
        pos += 1
        return tok

    def take_int(what: str) -> int:
        tok, line = take(what)
        try:
            return int(tok)
        except ValueError:
            raise StructureFormatError(f"expected {what}, found {tok!r} (line {line})") from None

    def take_block() -> list[list[str]]:
        tok, line = take("'{'")
        if tok != "{":
            raise StructureFormatError(f"expected '{{', found {tok!r} (line {line})")
        groups: list[list[str]] = [[]]
        while True:
            tok, line = take("'}'")
            if tok == "}":
                break
            if tok == ";":
                groups.append([])
            else:
                groups[-1].append(tok)
        if groups and not groups[-1]:
            groups.pop()
        if any(not g for g in groups):
            raise StructureFormatError(f"empty entry in block ending on line {line}")
        return groups

    name: str | None = None
    domain: int | None = None
    rel_decls: dict[str, int] = {}
    fun_decls: dict[str, int] = {}
    relations: dict[str, frozenset] = {}
    functions: dict[str, dict] = {}

    def declare(kind: dict, ident: str, arity: int, line: int) -> None:
        if ident in rel_decls or ident in fun_decls:
            raise StructureFormatError(f"duplicate symbol {ident!r} (line {line})")
        kind[ident] = arity

    while pos < len(tokens):
        directive, line = take("a directive")
        if directive == "structure":
            name, _ = take("a structure name")
        elif directive == "domain":
            domain = take_int("the domain size")
        elif directive == "rel":
            ident, dline = take("a relation name")
            arity = take_int("the relation arity")
            if arity < 1:
                raise StructureFormatError(
                    f"relation {ident!r}: the text format requires arity >= 1 (line {dline})"
                )
            declare(rel_decls, ident, arity, dline)
            tuples = []
            for group in take_block():
                if len(group) != arity:
                    raise StructureFormatError(
                        f"tuple {' '.join(group)!r} in {ident!r} has {len(group)} elements, expected {arity}"
                    )
                tuples.append(tuple(int(g) for g in group))
            relations[ident] = frozenset(tuples)
        elif directive == "fun":
            ident, dline = take("a function name")
            arity = take_int("the function arity")
            declare(fun_decls, ident, arity, dline)
            table = {}
            for group in take_block():
                if len(group) != arity + 2 or group[-2] != "->":
                    raise StructureFormatError(
                        f"bad table entry {' '.join(group)!r} for {ident!r} (line {dline})"
                    )
                key = tuple(int(g) for g in group[:arity])
                table[key] = int(group[-1])
            functions[ident] = table
        elif directive == "const":
            ident, dline = take("a constant name")
            value = take_int("the constant value")
            declare(fun_decls, ident, 0, dline)
            functions[ident] = {(): value}
        else:
            raise StructureFormatError(f"unknown directive {directive!r} (line {line})")

    if domain is None:
        raise StructureFormatError("missing 'domain' directive")
    try:
        return FiniteStructure(
            signature=Signature(relations=rel_decls, functions=fun_decls),
            domain_size=domain,
            relations=relations,
            functions=functions,
            name=name or "S",
        )
    except (ValueError, SignatureError) as exc:
        raise StructureFormatError(str(exc)) from exc


def format_structure(S: FiniteStructure) -> str:
    """Canonical text form of an explicit structure; inverse of parse_structure."""
    name = re.sub(r"[^A-Za-z0-9_]", "_", S.name) or "S"
    if not _IDENT_START.match(name):
        name = f"S_{name}"
    lines = [f"structure {name}", f"domain {S.domain_size}"]
    for rel, arity in S.signature.relations.items():
        if arity < 1:
            raise ValueError(f"relation {rel!r} of arity 0 is not expressible in the text format")
        ext = S.relations[rel]
        if len(ext) > _SERIALIZE_LIMIT:
            raise ValueError(f"relation {rel!r} is too large to serialize")
        entries = " ; ".join(" ".join(str(e) for e in t) for t in sorted(ext))
        body = f"{{ {entries} }}" if entries else "{ }"
        lines.append(f"rel {rel} {arity} {body}")
    for fn, arity in S.signature.functions.items():
        table = S.functions[fn]
        if len(table) > _SERIALIZE_LIMIT:
            raise ValueError(f"function {fn!r} is too large to serialize")
        if arity == 0:
            lines.append(f"const {fn} {table[()]}")
        else:
            entries = " ; ".join(
                f"{' '.join(str(e) for e in key)} -> {table[key]}" for key in sorted(table)
            )
            lines.append(f"fun {fn} {arity} {{ {entries} }}")
    return "\n".join(lines) + "\n"


_IDENT_START = re.compile(r"[A-Za-z_]")
