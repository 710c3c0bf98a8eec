"""Exact graded Poisson / Poisson-Nijenhuis computations and descendant recursions."""
from .graded import (
    GradedAlgebraError,
    Polynomial,
    TableMismatchError,
    TruncationWindow,
    UnknownVariableError,
    Variable,
    VariableTable,
    mul,
    normalize_monomial,
    partial_derivative,
    truncate,
)
from .parser import ParseError, format_polynomial, parse_expression
from .tensors import (
    Bivector,
    Endomorphism11,
    OneForm,
    Tensor12,
    TensorError,
    VectorField,
    apply_endomorphism,
    contract_bivector,
    differential,
    lie_bracket,
    lie_derivative_bivector,
    lie_derivative_endomorphism,
    magri_morosi_compatibility,
    nijenhuis_torsion,
)
from .poisson import (
    AmbiguousSolution,
    CasimirTower,
    InconsistentSystem,
    NoSolutionWithinDegree,
    PoissonPencil,
    SeedNotCasimir,
    StructuralPoisson,
    casimir_expand,
    hamiltonian_vector_field,
    integrate_hamiltonian,
    jacobiator,
    poisson_bracket,
)
from .recursion import (
    CohomologyRing,
    DescendantTower,
    WindowTooSmall,
    c_coefficients,
    ch_closed_form,
    ch_step,
    euler_operator,
    sft_step,
    verify_commuting,
)
from .models import (
    Model,
    ModelError,
    build_s1_ch_model,
    build_s1_sft_model,
    dump_model,
    load_model,
    s1_closed_forms,
)

__version__ = "0.1.0"
