import pytest

from epos.classifier import a_valid_witnesses
from epos.generate import random_cnf, random_sentence, random_structure
from epos.syntax import Signature, count_exists, count_or, formula_atoms, free_variables

SIG = Signature({"NEQ": 2, "A": 1})


class TestDeterminism:
    @pytest.mark.parametrize("seed", [0, 7, 123])
    def test_same_seed_same_output(self, seed):
        assert random_structure(seed) == random_structure(seed)
        assert random_sentence(seed, SIG) == random_sentence(seed, SIG)
        assert random_cnf(seed) == random_cnf(seed)


class TestStructureGeneration:
    @pytest.mark.parametrize("seed", range(30))
    def test_a_valid_mode(self, seed):
        S = random_structure(seed, ensure="a-valid")
        assert a_valid_witnesses(S)

    @pytest.mark.parametrize("seed", range(30))
    def test_non_a_valid_mode(self, seed):
        S = random_structure(seed, ensure="non-a-valid")
        assert not a_valid_witnesses(S)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            random_structure(0, ensure="sometimes")


class TestSentenceGeneration:
    @pytest.mark.parametrize("seed", range(50))
    def test_budgets_respected(self, seed):
        f = random_sentence(seed, SIG, max_bound_vars=4, max_atoms=5, max_or_nodes=2)
        assert free_variables(f) == []
        assert 1 <= count_exists(f) <= 4
        assert 1 <= len(list(formula_atoms(f))) <= 5
        assert count_or(f) <= 2
