"""Orthonormal polynomial bases in one complex variable from recurrence tables."""
from .core import (
    BasisVector,
    InsufficientTableError,
    RecurrenceTable,
    TableError,
    apply_D,
    apply_Dstar,
    eval_sequence,
    evaluate,
    inner,
    monomial_coeffs,
)
from .determinacy import DeterminacyReport, classify_determinacy, partial_mass
from .spectral import (
    DiscreteMeasure,
    Tridiagonal,
    eig_tridiagonal,
    gauss_measure,
    moments,
    truncate_jacobi,
    verify_orthonormality,
)
from .structure import (
    AnalysisReport,
    BandProfile,
    DecompositionError,
    ThreeTermForm,
    analyze,
    band_profile,
    check_formal_normality,
    check_irreducible,
    decompose,
    form_table,
    rotate_table,
    symmetric_table,
    verify_normality_relations,
)

__version__ = "0.1.0"
