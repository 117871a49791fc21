"""Desk-scale constructions of cofinitary permutation groups.

Permutations of N are eventually periodic, so fixed-point sets are decided
exactly; "fewer than kappa" becomes "finite".  The package provides exact
permutation arithmetic, reduced words, word evaluation against finite
partial injections, the forcing poset with a deterministic scheduler, greedy
orbit-connecting permutations, depth-bounded certificates, and a command
line that writes replayable traces.
"""

from .analysis import Certificate, cofinitary_certificate, hitable_certificate, spectrum
from .evaluate import GenericState, eval_relation, eval_word, ground_perm, substitute, word_fixed_points, word_graph
from .forcing import (
    EMBED,
    FREE,
    Condition,
    DomainHit,
    FunctionHit,
    RangeHit,
    RelationClosure,
    RunTrace,
    TargetHit,
    WordAdd,
    apply_relations,
    empty_condition,
    extend_hit,
    forbidden_values,
    generic_run,
    is_condition,
    leq,
)
from .orbits import (
    OrbitGraph,
    PartitionSpec,
    PeriodicSet,
    check_claims,
    greedy_build,
    greedy_step,
    min_of_orbit,
    next_disjoint_orbit,
    orbit_graph,
    orbit_of,
)
from .perm import ExactPerm, FixedPointReport, PartialInj, PeriodicMap, block_cycle3, block_swap
from .stage import stage_step
from .words import FiniteGroupTable, Letter, Word, enumerate_good, is_good, parse_word, reduce

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "cofinitary_certificate",
    "hitable_certificate",
    "spectrum",
    "GenericState",
    "eval_relation",
    "eval_word",
    "ground_perm",
    "substitute",
    "word_fixed_points",
    "word_graph",
    "EMBED",
    "FREE",
    "Condition",
    "DomainHit",
    "FunctionHit",
    "RangeHit",
    "RelationClosure",
    "RunTrace",
    "TargetHit",
    "WordAdd",
    "apply_relations",
    "empty_condition",
    "extend_hit",
    "forbidden_values",
    "generic_run",
    "is_condition",
    "leq",
    "OrbitGraph",
    "PartitionSpec",
    "PeriodicSet",
    "check_claims",
    "greedy_build",
    "greedy_step",
    "min_of_orbit",
    "next_disjoint_orbit",
    "orbit_graph",
    "orbit_of",
    "ExactPerm",
    "FixedPointReport",
    "PartialInj",
    "PeriodicMap",
    "block_cycle3",
    "block_swap",
    "stage_step",
    "FiniteGroupTable",
    "Letter",
    "Word",
    "enumerate_good",
    "is_good",
    "parse_word",
    "reduce",
]
