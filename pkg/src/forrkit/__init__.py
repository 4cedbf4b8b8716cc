"""Boolean-function spectra and Forrelation circuits on a statevector simulator."""
from .boolfn import (
    TruthTable,
    bent_family,
    constant,
    dual,
    indicator_negated,
    is_balanced,
    is_bent,
    linear,
    parse_truth_table,
    weight_threshold,
    xor,
)
from .spectra import (
    auto_correlation,
    cross_correlation,
    forrelation2,
    forrelation3,
    forrelation_k,
    is_m_resilient,
    resiliency_order,
    uncorrelated_degree,
    walsh_mass,
    walsh_transform,
)

__version__ = "0.1.0"

__all__ = [
    "TruthTable",
    "bent_family",
    "constant",
    "dual",
    "indicator_negated",
    "is_balanced",
    "is_bent",
    "linear",
    "parse_truth_table",
    "weight_threshold",
    "xor",
    "auto_correlation",
    "cross_correlation",
    "forrelation2",
    "forrelation3",
    "forrelation_k",
    "is_m_resilient",
    "resiliency_order",
    "uncorrelated_degree",
    "walsh_mass",
    "walsh_transform",
]
