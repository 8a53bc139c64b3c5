"""epos: existential positive sentences over finite structures.

Parse and print EP formulas, evaluate them by brute force or through the
per-atom localizer, classify structures as locally refutable (with
machine-checkable evidence either way), and build the 3-SAT gadget,
general Boolean embedding, product, and Boolean-algebra reductions.
"""

from .classifier import (
    ClassificationResult,
    PigeonholeSpec,
    SearchBounds,
    Verdict,
    WitnessPair,
    a_valid_witnesses,
    classify,
    derive_witness_pair,
    find_unsat_conjunction,
    pigeonhole_sentence,
    verify_witness_pair,
)
from .evaluator import (
    Branch,
    BranchSet,
    LimitError,
    brute_force_eval,
    defined_relation,
    enumerate_branches,
    eval_via_branches,
    solve_pp,
)
from .boolalg import ba_catalog_entry, ba_signature
from .localizer import (
    BoolAnd,
    BoolFormula,
    BoolOr,
    FalseLeaf,
    NotLocallyRefutableError,
    TrueLeaf,
    decide_fast_path,
    eval_bool,
    localize,
)
from .reductions import (
    GadgetInstance,
    PropAnd,
    PropOr,
    boolean_embed,
    cnf_satisfiable,
    cnf_to_prop,
    normalize_diseq,
    product_rewrite,
    product_structure,
    prop_satisfiable,
    sat_to_ba_expos,
    threesat_to_expos,
)
from .structures import (
    AtomOracle,
    FiniteStructure,
    StructureFormatError,
    atom_satisfiable,
    builtin_structure,
    eval_atom,
    eval_term,
    format_structure,
    nat_neq_oracle,
    parse_structure,
    powerset_algebra,
)
from .syntax import (
    And,
    Atom,
    CNF,
    Exists,
    Formula,
    Fun,
    Or,
    ParseError,
    PPSentence,
    Signature,
    SignatureError,
    Term,
    Var,
    free_variables,
    parse_dimacs,
    parse_formula,
    print_formula,
    to_prenex_pp,
)

__version__ = "0.1.0"
