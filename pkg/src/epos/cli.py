"""Command-line front end.

Commands: eval, classify, reduce, gen, branches.  Truth-reporting exits
follow SAT-solver convention (10 = true, 20 = false); usage and parse
problems exit 2, limit exhaustion and fast-path refusals exit 3.  Output
is deterministic: identical inputs produce byte-identical output, and
--verify only adds a report on stderr, never changes the artifact.

Default limits may be overridden via the EPOS_LIMITS environment
variable, a comma-separated list of key=value pairs (keys: max_vars,
max_branches, max_atoms, max_term_depth, max_pigeonhole_vars,
max_pigeonhole_conjuncts).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import classifier, evaluator, localizer, reductions
from .classifier import SearchBounds, Verdict, classify
from .generate import random_sentence, random_structure
from .structures import (
    AtomOracle,
    FiniteStructure,
    StructureFormatError,
    builtin_structure,
    format_structure,
    parse_structure,
)
from .syntax import (
    CNF,
    ParseError,
    SignatureError,
    parse_dimacs,
    parse_formula,
    print_atom,
    print_formula,
    print_pp,
)

EXIT_TRUE = 10
EXIT_FALSE = 20
EXIT_USAGE = 2
EXIT_LIMIT = 3

_LIMIT_KEYS = (
    "max_vars",
    "max_branches",
    "max_atoms",
    "max_term_depth",
    "max_pigeonhole_vars",
    "max_pigeonhole_conjuncts",
)

_DEFAULTS = {
    "max_vars": evaluator.DEFAULT_MAX_BOUND_VARS,
    "max_branches": evaluator.DEFAULT_MAX_BRANCHES,
    "max_atoms": SearchBounds().max_atoms,
    "max_term_depth": SearchBounds().max_term_depth,
    "max_pigeonhole_vars": classifier.DEFAULT_MAX_PIGEONHOLE_VARS,
    "max_pigeonhole_conjuncts": classifier.DEFAULT_MAX_PIGEONHOLE_CONJUNCTS,
}


def _env_limits() -> tuple[dict[str, int], set[str]]:
    raw = os.environ.get("EPOS_LIMITS", "")
    limits = dict(_DEFAULTS)
    explicit: set[str] = set()
    if not raw.strip():
        return limits, explicit
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep or key not in _LIMIT_KEYS:
            raise ValueError(f"bad EPOS_LIMITS entry {item!r}")
        try:
            limits[key] = int(value)
        except ValueError:
            raise ValueError(f"bad EPOS_LIMITS value {item!r}") from None
        explicit.add(key)
    return limits, explicit


def _load_structure(source: str | None):
    if not source:
        raise ValueError("--structure is required")
    built_in = builtin_structure(source)
    if built_in is not None:
        return built_in
    path = Path(source)
    if not path.exists():
        raise ValueError(f"structure {source!r} is neither a catalog name nor a file")
    return parse_structure(path.read_text())


def _load_formula(args, sig):
    if getattr(args, "formula", None):
        return parse_formula(args.formula, sig)
    if getattr(args, "formula_file", None):
        return parse_formula(Path(args.formula_file).read_text(), sig)
    raise ValueError("a formula is required (--formula or --formula-file)")


def _load_cnf(args) -> CNF:
    if not getattr(args, "cnf", None):
        raise ValueError("a CNF file is required (--cnf)")
    return parse_dimacs(Path(args.cnf).read_text())


def _emit(args, pairs: list[tuple[str, str]]) -> None:
    if args.format == "kv":
        for key, value in pairs:
            print(f"{key}={value}")
    else:
        first = True
        for key, value in pairs:
            if first:
                print(value)
                first = False
            else:
                print(f"{key}: {value}")


# ---------------------------------------------------------------------------
# Commands


def _cmd_eval(args, limits) -> int:
    structure = _load_structure(args.structure)
    sentence = _load_formula(args, structure.signature)
    method = args.method
    if method == "auto":
        if isinstance(structure, AtomOracle):
            if not structure.locally_refutable:
                raise ValueError(
                    f"oracle {structure.name!r} is not locally refutable and has no finite domain"
                )
            method = "localizer"
        elif structure.signature.functions:
            method = "branch"
        else:
            method = "localizer" if classifier.a_valid_witnesses(structure) else "branch"

    if method == "localizer":
        value = localizer.decide_fast_path(structure, sentence)
    elif method in ("brute", "branch"):
        if not isinstance(structure, FiniteStructure):
            raise ValueError(f"method {method!r} requires a finite structure")
        if method == "brute":
            value = evaluator.brute_force_eval(structure, sentence, max_vars=limits["max_vars"])
        else:
            value = evaluator.eval_via_branches(
                structure, sentence, max_branches=limits["max_branches"]
            )
    else:
        raise ValueError(f"unknown method {method!r}")

    _emit(args, [("result", "true" if value else "false"), ("method", method)])
    return EXIT_TRUE if value else EXIT_FALSE


def _classification_pairs(result) -> list[tuple[str, str]]:
    pairs = [("verdict", result.verdict.value)]
    if result.a_valid_elements is not None:
        pairs.append(("a", ",".join(str(a) for a in sorted(result.a_valid_elements))))
    if result.witness_conjunction is not None:
        pairs.append(("witness", " & ".join(print_atom(a) for a in result.witness_conjunction)))
    if result.witness_pair is not None:
        pair = result.witness_pair
        pairs.append(("psi0", print_formula(pair.psi0)))
        pairs.append(("psi1", print_formula(pair.psi1)))
        pairs.append(("vars", ",".join(pair.variables)))
    if result.verdict is not Verdict.LOCALLY_REFUTABLE and result.bounds is not None:
        b = result.bounds
        pairs.append(
            ("bounds", f"max_atoms={b.max_atoms} max_vars={b.max_vars} max_term_depth={b.max_term_depth}")
        )
    return pairs


def _search_bounds(structure, limits, explicit) -> SearchBounds:
    # Witness searches over function terms blow up quickly, so their
    # variable deepening is conservative unless the caller raises it.
    if "max_vars" in explicit:
        search_vars = limits["max_vars"]
    else:
        search_vars = 2 if structure.signature.functions else 6
    return SearchBounds(
        max_atoms=limits["max_atoms"],
        max_vars=search_vars,
        max_term_depth=limits["max_term_depth"],
    )


def _cmd_classify(args, limits, explicit) -> int:
    structure = _load_structure(args.structure)
    if isinstance(structure, AtomOracle):
        verdict = Verdict.LOCALLY_REFUTABLE if structure.locally_refutable else Verdict.NOT_LOCALLY_REFUTABLE
        if args.format == "kv":
            print(f"verdict={verdict.value}")
            print("evidence=declared")
        else:
            print(f"{verdict.value} declared")
        return 0
    result = classify(structure, _search_bounds(structure, limits, explicit))
    pairs = _classification_pairs(result)
    if args.format == "kv":
        for key, value in pairs:
            print(f"{key}={value}")
    else:
        head = pairs[0][1]
        if result.a_valid_elements is not None:
            head += f" a={pairs[1][1]}"
        print(head)
        for key, value in pairs[1:]:
            if key != "a":
                print(f"{key}: {value}")
    return 0


def _cmd_branches(args, limits) -> int:
    structure = _load_structure(args.structure)
    sentence = _load_formula(args, structure.signature)
    branch_set = evaluator.enumerate_branches(sentence, max_branches=limits["max_branches"])
    total = len(branch_set.branches)
    print(f"{total} branch" + ("es" if total != 1 else ""))
    if args.dedup:
        seen: dict[str, list[str]] = {}
        for branch in branch_set.branches:
            seen.setdefault(print_pp(branch.sentence), []).append(branch.choices or "-")
        for text, vectors in seen.items():
            print(f"{','.join(vectors)}: {text}")
    else:
        for branch in branch_set.branches:
            print(f"{branch.choices or '-'}: {print_pp(branch.sentence)}")
    return 0


def _require_witness_pair(structure, limits, explicit):
    result = classify(structure, _search_bounds(structure, limits, explicit))
    if result.verdict is Verdict.LOCALLY_REFUTABLE:
        raise ValueError(f"structure {structure.name!r} is locally refutable; no witness pair exists")
    if result.witness_pair is None:
        raise ValueError(
            f"no witness pair found for {structure.name!r} within the search bounds"
        )
    return result.witness_pair


def _cmd_reduce(args, limits, explicit) -> int:
    if args.kind in ("3sat", "embed"):
        cnf = _load_cnf(args)
        structure = _load_structure(args.structure) if args.structure else None
        if not isinstance(structure, FiniteStructure):
            raise ValueError("this reduction requires a finite structure (--structure)")
        pair = _require_witness_pair(structure, limits, explicit)
        if args.kind == "3sat":
            formula = reductions.threesat_to_expos(cnf, pair).formula
        else:
            formula = reductions.boolean_embed(reductions.cnf_to_prop(cnf), pair)
        print(print_formula(formula))
        if args.verify:
            truth = evaluator.brute_force_eval(structure, formula, max_vars=limits["max_vars"])
            sat = reductions.cnf_satisfiable(cnf)
            print(
                f"verify: formula={'true' if truth else 'false'} cnf={'sat' if sat else 'unsat'} "
                f"agree={'yes' if truth == sat else 'NO'}",
                file=sys.stderr,
            )
            if truth != sat:
                return 1
        return 0
    if args.kind == "product":
        structure = _load_structure(args.structure)
        if not isinstance(structure, FiniteStructure):
            raise ValueError("the product reduction requires a finite structure")
        product = reductions.product_structure(structure)
        sys.stdout.write(format_structure(product))
        rewritten = None
        original = None
        if args.formula or args.formula_file:
            original = _load_formula(args, structure.signature)
            rewritten = reductions.product_rewrite(original, structure)
            print()
            print(print_formula(rewritten))
        if args.verify:
            expected = 1
            for rel in structure.signature.relations:
                expected *= len(structure.relations[rel])
            size_ok = len(product.relations["R"]) == expected
            report = f"verify: product-size={'ok' if size_ok else 'NO'}"
            agree = True
            if rewritten is not None:
                left = evaluator.brute_force_eval(structure, original, max_vars=limits["max_vars"])
                right = evaluator.brute_force_eval(product, rewritten, max_vars=limits["max_vars"])
                agree = left == right
                report += f" round-trip={'ok' if agree else 'NO'}"
            print(report, file=sys.stderr)
            if not (size_ok and agree):
                return 1
        return 0
    if args.kind == "sat2ba":
        cnf = _load_cnf(args)
        formula = reductions.sat_to_ba_expos(cnf)
        print(print_formula(formula))
        if args.verify:
            from .structures import powerset_algebra

            truth = evaluator.brute_force_eval(
                powerset_algebra(2), formula, max_vars=limits["max_vars"]
            )
            sat = reductions.cnf_satisfiable(cnf)
            print(
                f"verify: formula-on-powerset:2={'true' if truth else 'false'} "
                f"cnf={'sat' if sat else 'unsat'} agree={'yes' if truth == sat else 'NO'}",
                file=sys.stderr,
            )
            if truth != sat:
                return 1
        return 0
    raise ValueError(f"unknown reduction {args.kind!r}")


def _cmd_gen(args, limits) -> int:
    if args.kind == "pigeonhole":
        structure = _load_structure(args.structure)
        if not isinstance(structure, FiniteStructure):
            raise ValueError("the pigeonhole sentence requires a finite structure")
        sentence, spec = classifier.pigeonhole_sentence(
            structure,
            max_variables=limits["max_pigeonhole_vars"],
            max_conjuncts=limits["max_pigeonhole_conjuncts"],
        )
        if args.format == "kv":
            print(f"variables={len(spec.variables)}")
            print(f"groups={_perm(len(spec.variables), spec.total_arity)}")
            print(f"formula={print_formula(sentence)}")
        else:
            print(print_formula(sentence))
        return 0
    if args.kind == "random-structure":
        structure = random_structure(
            args.seed,
            domain_size=args.domain_size,
            num_relations=args.relations,
            max_arity=args.max_arity,
            name=f"G{args.seed}",
        )
        sys.stdout.write(format_structure(structure))
        return 0
    if args.kind == "random-formula":
        structure = _load_structure(args.structure)
        sentence = random_sentence(
            args.seed,
            structure.signature,
            max_bound_vars=4,
            max_atoms=6,
            max_or_nodes=2,
            max_term_depth=2 if structure.signature.functions else 0,
        )
        print(print_formula(sentence))
        return 0
    raise ValueError(f"unknown generator {args.kind!r}")


def _perm(n: int, k: int) -> int:
    import math

    return math.perm(n, k)


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epos",
        description="Decide existential positive sentences over finite structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formula=False, cnf=False, structure=True):
        if structure:
            p.add_argument("--structure", help="structure file or catalog name (powerset:k, nat_neq, nat_neq_eq)")
        if formula:
            p.add_argument("--formula", help="formula text")
            p.add_argument("--formula-file", help="file containing a formula")
        if cnf:
            p.add_argument("--cnf", help="DIMACS CNF file")
        p.add_argument("--max-vars", type=int, help="bound-variable / search-variable limit")
        p.add_argument("--max-branches", type=int, help="branch count limit")
        p.add_argument("--max-atoms", type=int, help="witness search atom limit")
        p.add_argument("--format", choices=("text", "kv"), default="text")

    p_eval = sub.add_parser("eval", help="decide a sentence")
    common(p_eval, formula=True)
    p_eval.add_argument(
        "--method", choices=("brute", "localizer", "branch", "auto"), default="auto"
    )

    p_classify = sub.add_parser("classify", help="classify local refutability")
    common(p_classify)

    p_reduce = sub.add_parser("reduce", help="run a reduction")
    p_reduce.add_argument("kind", choices=("3sat", "embed", "product", "sat2ba"))
    common(p_reduce, formula=True, cnf=True)
    p_reduce.add_argument("--verify", action="store_true", help="add a check report on stderr")

    p_gen = sub.add_parser("gen", help="generate sentences and structures")
    p_gen.add_argument("kind", choices=("pigeonhole", "random-structure", "random-formula"))
    common(p_gen)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--domain-size", type=int)
    p_gen.add_argument("--relations", type=int)
    p_gen.add_argument("--max-arity", type=int, default=2)

    p_branches = sub.add_parser("branches", help="list the disjunction branches")
    common(p_branches, formula=True)
    p_branches.add_argument("--dedup", action="store_true", help="collapse duplicate branches in the listing")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        limits, explicit = _env_limits()
        for key in ("max_vars", "max_branches", "max_atoms"):
            value = getattr(args, key, None)
            if value is not None:
                limits[key] = value
                explicit.add(key)
        if getattr(args, "structure", None) is None and args.command in ("classify", "branches"):
            raise ValueError("--structure is required")
        if args.command == "eval":
            if args.structure is None:
                raise ValueError("--structure is required")
            return _cmd_eval(args, limits)
        if args.command == "classify":
            return _cmd_classify(args, limits, explicit)
        if args.command == "reduce":
            return _cmd_reduce(args, limits, explicit)
        if args.command == "gen":
            return _cmd_gen(args, limits)
        if args.command == "branches":
            return _cmd_branches(args, limits)
        raise ValueError(f"unknown command {args.command!r}")
    except (ParseError, SignatureError, StructureFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (evaluator.LimitError, localizer.NotLocallyRefutableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    raise SystemExit(main())
