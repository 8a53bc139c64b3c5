"""Syntax of existential positive formulas.

Terms, atoms and formula trees, the text grammar with its parser and
canonical printer, prenex/primitive-positive normal form, and a DIMACS
CNF reader.

The formula grammar (whitespace insignificant, '&' binds tighter than
'|', 'E' scopes maximally to the right):

    formula := 'E' IDENT '.' formula | or_expr
    or_expr := and_expr ( '|' and_expr )*
    and_expr := unit ( '&' unit )*
    unit := atom | '(' formula ')' | 'E' IDENT '.' formula
    atom := IDENT '(' term ( ',' term )* ')'
    term := IDENT | IDENT '(' term ( ',' term )* ')'
    IDENT := [A-Za-z_][A-Za-z0-9_]*

A bare identifier in term position denotes a constant when the signature
declares a 0-ary function of that name, and a variable otherwise.
Equality is not built in; declare an explicit relation if you need it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping


class ParseError(ValueError):
    """Input text does not conform to the formula or DIMACS grammar."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class SignatureError(ValueError):
    """A symbol is used inconsistently with its declaration."""


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Signature:
    """Relation and function symbols with their arities (arity 0 = constant)."""

    relations: Mapping[str, int]
    functions: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "functions", dict(self.functions))
        shared = self.relations.keys() & self.functions.keys()
        if shared:
            raise SignatureError(
                f"relation and function names must be disjoint: {sorted(shared)}"
            )
        for name, arity in [*self.relations.items(), *self.functions.items()]:
            if not _IDENT_RE.match(name):
                raise SignatureError(f"invalid symbol name {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"arity of {name!r} must be a non-negative integer")

    def rel_arity(self, name: str) -> int:
        try:
            return self.relations[name]
        except KeyError:
            raise SignatureError(f"undeclared relation symbol {name!r}") from None

    def fun_arity(self, name: str) -> int:
        try:
            return self.functions[name]
        except KeyError:
            raise SignatureError(f"undeclared function symbol {name!r}") from None


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Fun:
    name: str
    args: tuple["Term", ...] = ()


Term = Var | Fun


@dataclass(frozen=True)
class Atom:
    """Relation applied to terms; doubles as the leaf node of formulas."""

    relation: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Atom | And | Or | Exists


@dataclass(frozen=True)
class PPSentence:
    """Primitive positive sentence: a quantifier prefix over a conjunction of atoms."""

    variables: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("quantified variables must be distinct")
        bound = set(self.variables)
        for atom in self.atoms:
            for v in atom_variables(atom):
                if v not in bound:
                    raise ValueError(f"atom variable {v!r} is not quantified")


@dataclass(frozen=True)
class CNF:
    """A DIMACS-style CNF: clauses are tuples of nonzero signed variable indices."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("variable count must be non-negative")
        for clause in self.clauses:
            if not clause:
                raise ValueError("clauses must be non-empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")


# ---------------------------------------------------------------------------
# Traversals


def term_variables(term: Term) -> list[str]:
    """Variable names of a term in first-occurrence order."""
    out: list[str] = []

    def go(t: Term) -> None:
        if isinstance(t, Var):
            if t.name not in out:
                out.append(t.name)
        else:
            for a in t.args:
                go(a)

    go(term)
    return out


def atom_variables(atom: Atom) -> list[str]:
    out: list[str] = []
    for t in atom.args:
        for v in term_variables(t):
            if v not in out:
                out.append(v)
    return out


def free_variables(f: Formula) -> list[str]:
    """Free variables in first-occurrence order of a left-to-right traversal."""
    out: list[str] = []

    def go(node: Formula, bound: frozenset[str]) -> None:
        if isinstance(node, Atom):
            for v in atom_variables(node):
                if v not in bound and v not in out:
                    out.append(v)
        elif isinstance(node, Exists):
            go(node.body, bound | {node.var})
        else:
            go(node.left, bound)
            go(node.right, bound)

    go(f, frozenset())
    return out


def all_names(f: Formula) -> set[str]:
    """Every variable name occurring in the formula, bound or free."""
    names: set[str] = set()

    def go(node: Formula) -> None:
        if isinstance(node, Atom):
            for t in node.args:
                names.update(term_variables(t))
        elif isinstance(node, Exists):
            names.add(node.var)
            go(node.body)
        else:
            go(node.left)
            go(node.right)

    go(f)
    return names


def formula_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Exists):
        yield from formula_atoms(f.body)
    else:
        yield from formula_atoms(f.left)
        yield from formula_atoms(f.right)


def count_exists(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Exists):
        return 1 + count_exists(f.body)
    return count_exists(f.left) + count_exists(f.right)


def count_or(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Exists):
        return count_or(f.body)
    n = count_or(f.left) + count_or(f.right)
    return n + 1 if isinstance(f, Or) else n


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten nested conjunctions into the list of top-level conjuncts."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def validate_formula(f: Formula, sig: Signature) -> None:
    """Raise SignatureError unless every symbol in f is declared with matching arity."""

    def check_term(t: Term) -> None:
        if isinstance(t, Fun):
            arity = sig.fun_arity(t.name)
            if len(t.args) != arity:
                raise SignatureError(
                    f"function {t.name!r} expects {arity} arguments, got {len(t.args)}"
                )
            for a in t.args:
                check_term(a)

    for atom in formula_atoms(f):
        arity = sig.rel_arity(atom.relation)
        if len(atom.args) != arity:
            raise SignatureError(
                f"relation {atom.relation!r} expects {arity} arguments, got {len(atom.args)}"
            )
        for t in atom.args:
            check_term(t)


# ---------------------------------------------------------------------------
# Builders


def exists_chain(variables: tuple[str, ...] | list[str], body: Formula) -> Formula:
    f = body
    for v in reversed(list(variables)):
        f = Exists(v, f)
    return f


def and_all(parts: list[Formula]) -> Formula:
    """Balanced conjunction of one or more formulas (keeps recursion shallow)."""
    if not parts:
        raise ValueError("cannot build an empty conjunction")
    if len(parts) == 1:
        return parts[0]
    mid = (len(parts) + 1) // 2
    return And(and_all(parts[:mid]), and_all(parts[mid:]))


def or_all(parts: list[Formula]) -> Formula:
    if not parts:
        raise ValueError("cannot build an empty disjunction")
    if len(parts) == 1:
        return parts[0]
    mid = (len(parts) + 1) // 2
    return Or(or_all(parts[:mid]), or_all(parts[mid:]))


def rename_free(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free variable occurrences; bound variables shadow as usual."""

    def rename_term(t: Term, active: Mapping[str, str]) -> Term:
        if isinstance(t, Var):
            return Var(active.get(t.name, t.name))
        return Fun(t.name, tuple(rename_term(a, active) for a in t.args))

    def go(node: Formula, active: dict[str, str]) -> Formula:
        if isinstance(node, Atom):
            return Atom(node.relation, tuple(rename_term(t, active) for t in node.args))
        if isinstance(node, Exists):
            if node.var in active.values():
                raise ValueError(f"renaming would capture variable {node.var!r}")
            inner = {k: v for k, v in active.items() if k != node.var}
            return Exists(node.var, go(node.body, inner))
        if isinstance(node, And):
            return And(go(node.left, active), go(node.right, active))
        return Or(go(node.left, active), go(node.right, active))

    return go(f, dict(mapping))


def fresh_name(base: str, used: set[str]) -> str:
    """base itself if unused, else base_k with the smallest k making it fresh."""
    if base not in used:
        return base
    k = 1
    while f"{base}_{k}" in used:
        k += 1
    return f"{base}_{k}"


# ---------------------------------------------------------------------------
# Prenex / primitive positive form


def to_prenex_pp(f: Formula) -> PPSentence:
    """Pull all quantifiers of a disjunction-free formula to the front.

    Free variables are existentially closed first (in first-occurrence
    order), colliding binders are renamed by appending ``_k`` with the
    smallest fresh ``k``, and the conjuncts appear in left-to-right order.
    """
    if count_or(f) > 0:
        raise ValueError("primitive positive form requires a disjunction-free formula")
    closed = exists_chain(free_variables(f), f)

    used: set[str] = set()
    variables: list[str] = []
    atoms: list[Atom] = []

    def rename_term(t: Term, scope: dict[str, str]) -> Term:
        if isinstance(t, Var):
            return Var(scope[t.name])
        return Fun(t.name, tuple(rename_term(a, scope) for a in t.args))

    def go(node: Formula, scope: dict[str, str]) -> None:
        if isinstance(node, Exists):
            name = fresh_name(node.var, used)
            used.add(name)
            variables.append(name)
            go(node.body, {**scope, node.var: name})
        elif isinstance(node, And):
            go(node.left, scope)
            go(node.right, scope)
        else:
            atoms.append(Atom(node.relation, tuple(rename_term(t, scope) for t in node.args)))

    go(closed, {})
    return PPSentence(tuple(variables), tuple(atoms))


def pp_to_formula(pp: PPSentence) -> Formula:
    if not pp.atoms:
        raise ValueError("cannot render a sentence with no atoms")
    return exists_chain(pp.variables, and_all(list(pp.atoms)))


# ---------------------------------------------------------------------------
# Printing


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.name
    return f"{t.name}({','.join(print_term(a) for a in t.args)})"


def print_atom(atom: Atom) -> str:
    return f"{atom.relation}({','.join(print_term(t) for t in atom.args)})"


def print_formula(f: Formula) -> str:
    """Canonical text form; parse_formula inverts it on the same signature."""
    if isinstance(f, Atom):
        return print_atom(f)
    if isinstance(f, Exists):
        return f"E {f.var}. {print_formula(f.body)}"
    if isinstance(f, And):
        left = _child(f.left, And, right_side=False)
        right = _child(f.right, And, right_side=True)
        return f"{left} & {right}"
    left = _child(f.left, Or, right_side=False)
    right = _child(f.right, Or, right_side=True)
    return f"{left} | {right}"


def _child(node: Formula, parent: type, right_side: bool) -> str:
    text = print_formula(node)
    # The grammar is left-associative and 'E' scopes maximally right, so a
    # quantifier is always bracketed under a connective, a same-connective
    # child only on the right, and Or always under And.
    needs = isinstance(node, Exists)
    if parent is And:
        needs = needs or isinstance(node, Or) or (right_side and isinstance(node, And))
    else:
        needs = needs or (right_side and isinstance(node, Or))
    return f"({text})" if needs else text


def print_pp(pp: PPSentence) -> str:
    if not pp.atoms:
        raise ValueError("cannot print a sentence with no atoms")
    prefix = "".join(f"E {v}. " for v in pp.variables)
    return prefix + " & ".join(print_atom(a) for a in pp.atoms)


# ---------------------------------------------------------------------------
# Parsing


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[().,&|]")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        tokens.append((m.group(), i))
        i = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _tokenize(text)
        self.sig = sig
        self.pos = 0
        self.end = len(text)

    def _peek(self, ahead: int = 0) -> str | None:
        i = self.pos + ahead
        return self.tokens[i][0] if i < len(self.tokens) else None

    def _here(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else self.end

    def _take(self, expected: str | None = None) -> str:
        if self.pos >= len(self.tokens):
            raise ParseError(f"unexpected end of input, expected {expected or 'more input'}", self.end)
        tok, at = self.tokens[self.pos]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", at)
        self.pos += 1
        return tok

    def _take_ident(self, what: str) -> str:
        tok = self._peek()
        if tok is None or not _IDENT_RE.match(tok):
            raise ParseError(f"expected {what}, found {tok!r}", self._here())
        return self._take()

    def _at_quantifier(self) -> bool:
        nxt = self._peek(1)
        return self._peek() == "E" and nxt is not None and bool(_IDENT_RE.match(nxt))

    def formula(self) -> Formula:
        if self._at_quantifier():
            self._take("E")
            var = self._take_ident("a variable name")
            self._take(".")
            return Exists(var, self.formula())
        return self.or_expr()

    def or_expr(self) -> Formula:
        f = self.and_expr()
        while self._peek() == "|":
            self._take("|")
            f = Or(f, self.and_expr())
        return f

    def and_expr(self) -> Formula:
        f = self.unit()
        while self._peek() == "&":
            self._take("&")
            f = And(f, self.unit())
        return f

    def unit(self) -> Formula:
        if self._at_quantifier():
            return self.formula()
        if self._peek() == "(":
            self._take("(")
            f = self.formula()
            self._take(")")
            return f
        return self.atom()

    def atom(self) -> Atom:
        at = self._here()
        name = self._take_ident("a relation symbol")
        if name not in self.sig.relations:
            raise SignatureError(f"undeclared relation symbol {name!r} (at position {at})")
        self._take("(")
        args = [self.term()]
        while self._peek() == ",":
            self._take(",")
            args.append(self.term())
        self._take(")")
        arity = self.sig.relations[name]
        if len(args) != arity:
            raise SignatureError(
                f"relation {name!r} expects {arity} arguments, got {len(args)} (at position {at})"
            )
        return Atom(name, tuple(args))

    def term(self) -> Term:
        at = self._here()
        name = self._take_ident("a term")
        if self._peek() == "(":
            if name not in self.sig.functions:
                raise SignatureError(f"undeclared function symbol {name!r} (at position {at})")
            self._take("(")
            args = [self.term()]
            while self._peek() == ",":
                self._take(",")
                args.append(self.term())
            self._take(")")
            arity = self.sig.functions[name]
            if len(args) != arity:
                raise SignatureError(
                    f"function {name!r} expects {arity} arguments, got {len(args)} (at position {at})"
                )
            return Fun(name, tuple(args))
        # Bare identifier: constant if declared 0-ary, variable otherwise.
        if self.sig.functions.get(name) == 0:
            return Fun(name)
        return Var(name)


def parse_formula(text: str, sig: Signature) -> Formula:
    parser = _Parser(text, sig)
    f = parser.formula()
    if parser.pos < len(parser.tokens):
        raise ParseError(f"trailing input {parser.tokens[parser.pos][0]!r}", parser._here())
    return f


# ---------------------------------------------------------------------------
# DIMACS


def parse_dimacs(text: str) -> CNF:
    """Read DIMACS cnf text; 'c' comment lines ignored, clauses in file order."""
    num_vars: int | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise ParseError("duplicate DIMACS header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ParseError(f"malformed DIMACS header {line!r}")
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed DIMACS header {line!r}") from None
            if num_vars < 0 or declared < 0:
                raise ParseError(f"malformed DIMACS header {line!r}")
            continue
        if num_vars is None:
            raise ParseError("clause data before the DIMACS header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause")
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > num_vars:
                    raise ParseError(
                        f"literal {lit} out of range (header declares {num_vars} variables)"
                    )
                current.append(lit)
    if num_vars is None:
        raise ParseError("missing DIMACS header")
    if current:
        raise ParseError("missing terminating 0 in final clause")
    return CNF(num_vars, tuple(clauses))
