import pytest

from epos.evaluator import brute_force_eval
from epos.generate import random_sentence, random_structure
from epos.localizer import (
    FALSE,
    TRUE,
    BoolAnd,
    BoolOr,
    NotLocallyRefutableError,
    decide_fast_path,
    eval_bool,
    localize,
)
from epos.structures import nat_neq_oracle, powerset_algebra
from epos.syntax import And, Atom, Exists, Or, SignatureError, Var, parse_formula


def neq(a, b):
    return Atom("NEQ", (Var(a), Var(b)))


class TestLocalize:
    def test_oracle_atoms_become_leaves(self):
        oracle = nat_neq_oracle()
        f = parse_formula("E x. E y. NEQ(x,y) & NEQ(x,x)", oracle.signature)
        assert localize(oracle, f) == BoolAnd(TRUE, FALSE)

    def test_nonempty_relation_atom_is_true(self, s2):
        assert localize(s2, Atom("R", (Var("x"), Var("y")))) == TRUE

    def test_or_shape_preserved(self, s1):
        f = Or(neq("x", "y"), neq("x", "x"))
        assert localize(s1, f) == BoolOr(TRUE, FALSE)

    def test_signature_mismatch(self, s1):
        with pytest.raises(SignatureError):
            localize(s1, Atom("R", (Var("x"),)))

    @pytest.mark.parametrize("seed", range(50))
    def test_shape_preservation(self, seed):
        S = random_structure(seed, max_arity=2)
        f = random_sentence(seed + 100, S.signature, max_bound_vars=3, max_atoms=5, max_or_nodes=2)
        skeleton = localize(S, f)

        def shape(node):
            if isinstance(node, (And, BoolAnd)):
                kind = "&"
                children = (node.left, node.right)
            elif isinstance(node, (Or, BoolOr)):
                kind = "|"
                children = (node.left, node.right)
            elif isinstance(node, Exists):
                return shape(node.body)
            else:
                return "*"
            return (kind, *(shape(c) for c in children))

        assert shape(f) == shape(skeleton)


class TestEvalBool:
    def test_values(self):
        assert eval_bool(BoolAnd(TRUE, FALSE)) is False
        assert eval_bool(BoolOr(FALSE, TRUE)) is True
        assert eval_bool(TRUE) is True


class TestMemoization:
    def test_one_check_per_atom_pattern(self):
        from epos.structures import AtomOracle
        from epos.syntax import Signature

        seen = []

        def rule(atom):
            seen.append(atom)
            return True

        oracle = AtomOracle(Signature({"NEQ": 2}), rule, locally_refutable=True)
        # Four atoms, but only two patterns: distinct-distinct and repeated.
        f = parse_formula(
            "E x. E y. E u. E v. NEQ(x,y) & NEQ(u,v) & NEQ(x,x) & NEQ(v,v)",
            oracle.signature,
        )
        localize(oracle, f)
        assert len(seen) == 2


class TestFastPath:
    def test_oracle_decision(self):
        oracle = nat_neq_oracle()
        f = parse_formula("E x. E y. NEQ(x,y) & NEQ(x,x)", oracle.signature)
        assert decide_fast_path(oracle, f) is False

    def test_agrees_with_brute_force_on_a_valid_structure(self, s2):
        f = parse_formula("E x. R(x,x) & R(x,x)", s2.signature)
        assert decide_fast_path(s2, f) is True
        assert brute_force_eval(s2, f) is True

    def test_refuses_non_locally_refutable_structure(self, s1):
        f = parse_formula("E x. NEQ(x,x)", s1.signature)
        with pytest.raises(NotLocallyRefutableError):
            decide_fast_path(s1, f)

    def test_refuses_unflagged_oracle(self):
        oracle = nat_neq_oracle(with_equality=True)
        f = parse_formula("E x. E y. NEQ(x,y)", oracle.signature)
        with pytest.raises(NotLocallyRefutableError):
            decide_fast_path(oracle, f)

    def test_refuses_structures_with_functions(self):
        P = powerset_algebra(1)
        f = parse_formula("E x. NEQ(x,zero)", P.signature)
        with pytest.raises(NotLocallyRefutableError):
            decide_fast_path(P, f)


class TestSoundnessAndCompleteness:
    @pytest.mark.parametrize("seed", range(80))
    def test_false_skeleton_implies_false_everywhere(self, seed):
        # The "only if" half holds for every structure, locally refutable or not.
        S = random_structure(seed, max_arity=2)
        f = random_sentence(seed + 300, S.signature, max_bound_vars=4, max_atoms=6, max_or_nodes=2)
        if not eval_bool(localize(S, f)):
            assert brute_force_eval(S, f) is False

    @pytest.mark.parametrize("seed", range(80))
    def test_fast_path_complete_on_a_valid_structures(self, seed):
        S = random_structure(seed, ensure="a-valid", max_arity=2)
        f = random_sentence(seed + 700, S.signature, max_bound_vars=4, max_atoms=6, max_or_nodes=2)
        assert decide_fast_path(S, f) == brute_force_eval(S, f)
