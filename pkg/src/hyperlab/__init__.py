"""Numerical toolkit for hyperbolic polynomials: eigenvalues, norms, and concentration experiments."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetError,
    DimensionError,
    GeneratorContractError,
    HyperlabError,
    InfeasibleError,
    NotHyperbolicAtPoint,
    NumericalFailure,
    PreconditionError,
)
from .forms import (  # noqa: E402
    DenseHomogeneous,
    DeterminantSymmetric,
    ElementarySymmetric,
    HyperbolicForm,
    LorentzQuadratic,
    Product,
    check_hyperbolicity,
    directional_derivative,
    evaluate,
    form_from_descriptor,
)
from .spectra import (  # noqa: E402
    Spectrum,
    cone_position,
    eigenvalues,
    eigenvalues_batch,
    hp_norm,
    rank,
    restrict,
    spectral_norm,
    symmetric_coefficients,
    trace,
)

__all__ = [
    "BudgetError",
    "DenseHomogeneous",
    "DeterminantSymmetric",
    "DimensionError",
    "ElementarySymmetric",
    "GeneratorContractError",
    "HyperbolicForm",
    "HyperlabError",
    "InfeasibleError",
    "LorentzQuadratic",
    "NotHyperbolicAtPoint",
    "NumericalFailure",
    "PreconditionError",
    "Product",
    "Spectrum",
    "check_hyperbolicity",
    "cone_position",
    "directional_derivative",
    "eigenvalues",
    "eigenvalues_batch",
    "evaluate",
    "form_from_descriptor",
    "hp_norm",
    "rank",
    "restrict",
    "spectral_norm",
    "symmetric_coefficients",
    "trace",
]
