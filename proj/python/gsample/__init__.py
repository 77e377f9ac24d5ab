"""Graph-signal sampling allocation."""

from ._core import (
    DomainError,
    InfeasibleError,
    ProblemInstance,
    StructuralError,
    WeightedGraph,
    cost,
    csv_header,
    gradient,
    greedy_select,
    pgd_solve,
    run_experiment,
)

__all__ = [
    "DomainError",
    "InfeasibleError",
    "ProblemInstance",
    "StructuralError",
    "WeightedGraph",
    "cost",
    "csv_header",
    "gradient",
    "greedy_select",
    "pgd_solve",
    "run_experiment",
]
