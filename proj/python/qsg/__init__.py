"""Most-similar subgraph search under fixed edge removal."""

from ._qsg import (
    Error,
    Graph,
    InvalidArgument,
    MalformedInput,
    ResourceCapError,
    argmin,
    configurations,
    cost_model,
    exact_distances,
    find_minimum,
    frobenius_distance,
    label_table,
    quadratic_form_classical,
    quadratic_form_quantum,
    sample_distances,
)

__all__ = [
    "Error",
    "Graph",
    "InvalidArgument",
    "MalformedInput",
    "ResourceCapError",
    "argmin",
    "configurations",
    "cost_model",
    "exact_distances",
    "find_minimum",
    "frobenius_distance",
    "label_table",
    "quadratic_form_classical",
    "quadratic_form_quantum",
    "sample_distances",
]
