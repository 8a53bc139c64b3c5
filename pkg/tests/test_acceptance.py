"""Acceptance criteria, one test per criterion.

The brute-force evaluator is the independent oracle throughout.  Every
test prints a `criterion-N ... PASS/FAIL` line (visible with -s or -rP)
and enforces its runtime budget.  Corpora are seeded and shared across
criteria through module-scoped fixtures, so criterion 4's dichotomy
check refers to the same structures whose empirical behaviour criteria
1-3 establish.
"""

import itertools
import subprocess
import sys
import time

import pytest

from epos.classifier import Verdict, classify, pigeonhole_sentence, verify_witness_pair
from epos.evaluator import brute_force_eval, enumerate_branches, eval_via_branches
from epos.generate import random_cnf, random_sentence, random_structure, random_term, rng_from
from epos.localizer import decide_fast_path, eval_bool, localize
from epos.reductions import product_rewrite, product_structure, sat_to_ba_expos, threesat_to_expos
from epos.structures import FiniteStructure, eval_term, powerset_algebra
from epos.syntax import CNF, Signature, count_or, parse_formula, print_formula

SENTENCES_PER_STRUCTURE = 200
A_VALID_COUNT = 50
NON_A_VALID_COUNT = 20


def report(name: str, ok: bool, detail: str) -> None:
    print(f"criterion-{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {name} failed: {detail}"


def brute_cnf(cnf: CNF) -> bool:
    """Independent DIMACS oracle: direct truth-table enumeration."""
    for bits in itertools.product((False, True), repeat=cnf.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in clause) for clause in cnf.clauses):
            return True
    return False


@pytest.fixture(scope="module")
def s1():
    return FiniteStructure(
        Signature({"NEQ": 2}), 2, {"NEQ": {(0, 1), (1, 0)}}, name="S1"
    )


@pytest.fixture(scope="module")
def a_valid_corpus():
    return [
        random_structure(1000 + i, ensure="a-valid") for i in range(A_VALID_COUNT)
    ]


@pytest.fixture(scope="module")
def non_a_valid_corpus():
    # Domain 2, arities <= 2 keeps the pigeonhole size r*n <= 8.
    return [
        random_structure(2000 + i, domain_size=2, max_arity=2, ensure="non-a-valid")
        for i in range(NON_A_VALID_COUNT)
    ]


def corpus_sentences(structure_index: int, sig):
    base = 100_000 + structure_index * SENTENCES_PER_STRUCTURE
    return (
        random_sentence(base + j, sig, max_bound_vars=6, max_atoms=8, max_or_nodes=3)
        for j in range(SENTENCES_PER_STRUCTURE)
    )


def test_criterion_1_localizer_completeness(a_valid_corpus):
    start = time.monotonic()
    checked = disagreements = 0
    for i, S in enumerate(a_valid_corpus):
        for f in corpus_sentences(i, S.signature):
            checked += 1
            if decide_fast_path(S, f) != brute_force_eval(S, f):
                disagreements += 1
    elapsed = time.monotonic() - start
    report(
        "1 localizer completeness",
        disagreements == 0 and elapsed < 60,
        f"{checked - disagreements}/{checked} agreements in {elapsed:.1f}s",
    )


def test_criterion_2_localizer_soundness_half(a_valid_corpus, non_a_valid_corpus):
    start = time.monotonic()
    checked = violations = false_skeletons = 0
    for i, S in enumerate(a_valid_corpus + non_a_valid_corpus):
        for f in corpus_sentences(i, S.signature):
            checked += 1
            if not eval_bool(localize(S, f)):
                false_skeletons += 1
                if brute_force_eval(S, f):
                    violations += 1
    elapsed = time.monotonic() - start
    report(
        "2 localizer soundness",
        violations == 0 and elapsed < 60,
        f"{false_skeletons} false skeletons, 0 expected violations, "
        f"{checked} sentences in {elapsed:.1f}s",
    )


def test_criterion_3_pigeonhole_witness(s1, non_a_valid_corpus):
    start = time.monotonic()
    failures = 0
    corpus = [s1] + non_a_valid_corpus
    for S in corpus:
        sentence, spec = pigeonhole_sentence(S)
        assert len(spec.variables) <= 8
        if brute_force_eval(S, sentence) or not eval_bool(localize(S, sentence)):
            failures += 1
    elapsed = time.monotonic() - start
    report(
        "3 pigeonhole witness",
        failures == 0 and elapsed < 120,
        f"{len(corpus) - failures}/{len(corpus)} false-yet-localizer-true in {elapsed:.1f}s",
    )


def test_criterion_4_a_validity_dichotomy(a_valid_corpus, non_a_valid_corpus):
    # Criteria 1 and 3 establish the empirical sides for these corpora;
    # here every verdict must match corpus membership exactly.
    disagreements = 0
    for S in a_valid_corpus:
        if classify(S).verdict is not Verdict.LOCALLY_REFUTABLE:
            disagreements += 1
    for S in non_a_valid_corpus:
        if classify(S).verdict is not Verdict.NOT_LOCALLY_REFUTABLE:
            disagreements += 1
    total = len(a_valid_corpus) + len(non_a_valid_corpus)
    report(
        "4 a-validity dichotomy",
        disagreements == 0,
        f"{total - disagreements}/{total} verdicts match the empirical corpus split",
    )


def all_threesat_instances(num_vars: int, num_clauses: int):
    literals = [l for v in range(1, num_vars + 1) for l in (v, -v)]
    patterns = list(itertools.product(literals, repeat=3))
    for clauses in itertools.product(patterns, repeat=num_clauses):
        yield CNF(num_vars, clauses)


def test_criterion_5_threesat_gadget(s1):
    start = time.monotonic()
    pair = classify(s1).witness_pair
    verify_witness_pair(s1, pair)
    checked = failures = 0
    for nv in (1, 2):
        for nc in (1, 2):
            for cnf in all_threesat_instances(nv, nc):
                gadget = threesat_to_expos(cnf, pair)
                checked += 1
                if brute_force_eval(s1, gadget.formula) != brute_cnf(cnf):
                    failures += 1
    for seed in range(200):
        cnf = random_cnf(40_000 + seed, max_vars=3, max_clauses=3)
        gadget = threesat_to_expos(cnf, pair)
        checked += 1
        if brute_force_eval(s1, gadget.formula) != brute_cnf(cnf):
            failures += 1
    elapsed = time.monotonic() - start
    report(
        "5 3-SAT gadget",
        failures == 0 and elapsed < 60,
        f"{checked - failures}/{checked} instances agree in {elapsed:.1f}s",
    )


def test_criterion_6_branch_transform():
    start = time.monotonic()
    failures = 0
    for seed in range(300):
        S = random_structure(50_000 + seed, max_arity=2)
        f = random_sentence(
            60_000 + seed, S.signature, max_bound_vars=5, max_atoms=6, max_or_nodes=4
        )
        branch_count = len(enumerate_branches(f).branches)
        if branch_count != 2 ** count_or(f):
            failures += 1
        elif eval_via_branches(S, f) != brute_force_eval(S, f):
            failures += 1
    elapsed = time.monotonic() - start
    report(
        "6 branch transform",
        failures == 0 and elapsed < 30,
        f"{300 - failures}/300 sentences agree with counts 2^#or in {elapsed:.1f}s",
    )


def test_criterion_7_product_reduction():
    start = time.monotonic()
    collected = failures = 0
    seed = 0
    while collected < 200:
        seed += 1
        S = random_structure(
            70_000 + seed, num_relations=2 + seed % 2, max_arity=2, density=0.7
        )
        if any(not ext for ext in S.relations.values()):
            continue
        collected += 1
        product = product_structure(S)
        expected_size = 1
        for ext in S.relations.values():
            expected_size *= len(ext)
        if len(product.relations["R"]) != expected_size:
            failures += 1
            continue
        f = random_sentence(
            80_000 + seed, S.signature, max_bound_vars=3, max_atoms=4, max_or_nodes=1
        )
        if brute_force_eval(S, f) != brute_force_eval(product, product_rewrite(f, S)):
            failures += 1
    elapsed = time.monotonic() - start
    report(
        "7 product reduction",
        failures == 0 and elapsed < 30,
        f"{collected - failures}/{collected} round-trips and sizes agree in {elapsed:.1f}s",
    )


def test_criterion_8_sat_to_boolean_algebra():
    start = time.monotonic()
    algebras = {k: powerset_algebra(k) for k in (1, 2, 3)}
    failures = 0
    for seed in range(100):
        cnf = random_cnf(90_000 + seed, max_vars=4, max_clauses=5, num_clauses=seed % 5 + 1)
        formula = sat_to_ba_expos(cnf)
        expected = brute_cnf(cnf)
        verdicts = {k: brute_force_eval(algebras[k], formula) for k in (1, 2, 3)}
        if set(verdicts.values()) != {expected}:
            failures += 1
    elapsed = time.monotonic() - start
    report(
        "8 SAT to Boolean algebra",
        failures == 0 and elapsed < 60,
        f"{100 - failures}/100 CNFs agree and are k-independent in {elapsed:.1f}s",
    )


def test_criterion_9_disequality_normalization():
    from epos.reductions import normalize_diseq

    start = time.monotonic()
    P = powerset_algebra(3)
    sig = P.signature
    scope = ["x", "y", "z"]
    failures = 0
    for seed in range(100):
        rng = rng_from(95_000 + seed)
        lhs = random_term(rng, sig, scope, 4)
        rhs = random_term(rng, sig, scope, 4)
        atom = normalize_diseq(lhs, rhs)
        for values in itertools.product(range(P.domain_size), repeat=3):
            env = dict(zip(scope, values))
            direct = eval_term(P, lhs, env) != eval_term(P, rhs, env)
            if direct != (eval_term(P, atom.args[0], env) != 0):
                failures += 1
                break
    elapsed = time.monotonic() - start
    report(
        "9 disequality normalization",
        failures == 0 and elapsed < 30,
        f"{100 - failures}/100 term pairs equivalent under all assignments in {elapsed:.1f}s",
    )


def test_criterion_10_witness_pair_validity(s1, non_a_valid_corpus):
    from epos.boolalg import ba_catalog_entry

    pairs = []
    for S in [s1] + non_a_valid_corpus:
        result = classify(S)
        if result.witness_pair is not None:
            pairs.append((S, result.witness_pair))
    for k in (1, 2):
        S, result = ba_catalog_entry(k)
        pairs.append((S, result.witness_pair))
    failures = 0
    for S, pair in pairs:
        try:
            verify_witness_pair(S, pair)
        except ValueError:
            failures += 1
    report(
        "10 witness pair validity",
        failures == 0 and len(pairs) >= 3,
        f"{len(pairs) - failures}/{len(pairs)} pairs re-verify "
        "(non-empty, non-empty, empty intersection)",
    )


def test_criterion_11_determinism(tmp_path):
    sig = Signature({"NEQ": 2, "A": 1, "B": 1})
    mismatches = 0
    for seed in range(500):
        f = random_sentence(99_000 + seed, sig, max_bound_vars=5, max_atoms=6, max_or_nodes=3)
        if parse_formula(print_formula(f), sig) != f:
            mismatches += 1

    (tmp_path / "S1.str").write_text("structure S1\ndomain 2\nrel NEQ 2 { 0 1 ; 1 0 }\n")
    (tmp_path / "f.cnf").write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n")
    commands = [
        ("classify", "--structure", str(tmp_path / "S1.str")),
        ("gen", "random-structure", "--seed", "11"),
        ("gen", "pigeonhole", "--structure", str(tmp_path / "S1.str")),
        ("reduce", "3sat", "--cnf", str(tmp_path / "f.cnf"),
         "--structure", str(tmp_path / "S1.str")),
        ("eval", "--structure", str(tmp_path / "S1.str"),
         "--formula", "E x. E y. NEQ(x,y)"),
    ]
    cli_mismatches = 0
    for argv in commands:
        runs = [
            subprocess.run([sys.executable, "-m", "epos", *argv], capture_output=True, timeout=120)
            for _ in range(2)
        ]
        if runs[0].stdout != runs[1].stdout or runs[0].returncode != runs[1].returncode:
            cli_mismatches += 1
    report(
        "11 determinism and round-trip",
        mismatches == 0 and cli_mismatches == 0,
        f"500/500 round-trips, {len(commands)}/{len(commands)} byte-identical CLI reruns",
    )
