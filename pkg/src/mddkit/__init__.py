"""Multi-valued decision diagrams as compressed tuple stores for constraint solving."""
from .core import (ChangeSummary, DescriptorError, Mdd, MddError, ParseError, Scope,
                   ScopeError, TupleTable, ValidationReport, complement, equivalent,
                   full_mdd, validate)
from .builders import (Gcs, NotDisjointError, Trie, TupleSequence, build_from_disjoint_sequences,
                       build_from_gcs, build_from_sorted_table, build_from_tuple_sequence,
                       build_from_tuples, build_trie, trie_to_mdd, tuple_mdd)
from .editops import (IsolationFrontier, add_set, add_tuple, delete_set, delete_tuple,
                      duality_check, incremental_reduce)
from .propagation import Counters, MddPropagator, TablePropagator
from .solver import Constraint, Deletion, PersistenceViolation, Problem, solve_all, solve_one

__all__ = [
    "ChangeSummary", "DescriptorError", "Mdd", "MddError", "ParseError", "Scope", "ScopeError",
    "TupleTable", "ValidationReport", "complement", "equivalent", "full_mdd", "validate",
    "Gcs", "NotDisjointError", "Trie", "TupleSequence", "build_from_disjoint_sequences",
    "build_from_gcs", "build_from_sorted_table", "build_from_tuple_sequence",
    "build_from_tuples", "build_trie", "trie_to_mdd", "tuple_mdd",
    "IsolationFrontier", "add_set", "add_tuple", "delete_set", "delete_tuple",
    "duality_check", "incremental_reduce",
    "Counters", "MddPropagator", "TablePropagator",
    "Constraint", "Deletion", "PersistenceViolation", "Problem", "solve_all", "solve_one",
]
