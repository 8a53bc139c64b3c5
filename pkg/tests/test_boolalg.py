import pytest

from epos.boolalg import ba_catalog_entry, ba_signature
from epos.classifier import Verdict, verify_witness_pair
from epos.evaluator import brute_force_eval
from epos.reductions import cnf_satisfiable, sat_to_ba_expos, threesat_to_expos
from epos.syntax import Atom, Fun, Var, parse_dimacs


class TestSignature:
    def test_fixed_symbols(self):
        sig = ba_signature()
        assert sig.relations == {"NEQ": 2}
        assert sig.functions == {"meet": 2, "join": 2, "c": 1, "zero": 0, "one": 0}


class TestCatalog:
    def test_k1_entry(self):
        structure, result = ba_catalog_entry(1)
        assert structure.domain_size == 2
        assert result.verdict is Verdict.NOT_LOCALLY_REFUTABLE
        assert result.witness_conjunction == (
            Atom("NEQ", (Var("x"), Fun("zero"))),
            Atom("NEQ", (Var("x"), Fun("one"))),
        )
        verify_witness_pair(structure, result.witness_pair)

    def test_k2_entry(self):
        structure, result = ba_catalog_entry(2)
        assert result.verdict is Verdict.NOT_LOCALLY_REFUTABLE
        assert result.witness_pair is not None
        verify_witness_pair(structure, result.witness_pair)

    def test_k3_entry(self):
        structure, result = ba_catalog_entry(3)
        assert result.verdict is Verdict.NOT_LOCALLY_REFUTABLE
        verify_witness_pair(structure, result.witness_pair)

    def test_out_of_bounds(self):
        with pytest.raises(ValueError):
            ba_catalog_entry(0)
        with pytest.raises(ValueError):
            ba_catalog_entry(4)

    def test_k1_gadget_pipeline_agrees_with_ba_reduction(self):
        # The same CNF through both hardness carriers must match plain
        # DIMACS satisfiability.
        structure, result = ba_catalog_entry(1)
        for text, expected in [
            ("p cnf 2 2\n1 2 2 0\n-1 -2 -2 0", True),
            ("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0", False),
        ]:
            cnf = parse_dimacs(text)
            assert cnf_satisfiable(cnf) is expected
            gadget = threesat_to_expos(cnf, result.witness_pair)
            assert brute_force_eval(structure, gadget.formula) is expected
            assert brute_force_eval(structure, sat_to_ba_expos(cnf)) is expected
