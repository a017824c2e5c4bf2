"""Orthogonal decompositions of sl_n over finite commutative rings into abelian Cartan subalgebras."""

from .errors import (
    BudgetExceeded,
    CartanForgeError,
    DimensionError,
    PreconditionError,
    RingError,
    RingMismatchError,
    SchemaError,
)
from .rings import (
    GF,
    LocalFactor,
    Product,
    Ring,
    RingElement,
    Zn,
    crt_decompose,
    field_trace,
    find_primitive_root,
    is_unit,
    parse_ring_spec,
    trace_dual_basis,
)
from .matlin import (
    Matrix,
    Submodule,
    canonical_span,
    charpoly_coefficients,
    commutator,
    contains,
    determinant,
    howell_form,
    inverse,
    is_free_basis,
    is_submodule,
    kronecker,
    matmul,
    module_equal,
    rref,
    solve_kernel,
    solve_kernel_crt,
    trace,
)
from .sln import (
    Decomposition,
    SlnAlgebra,
    Subalgebra,
    VerificationReport,
    center,
    conjugate_decomposition,
    conjugate_subalgebra,
    eigenvalues,
    is_abelian,
    is_cartan_abelian,
    is_classical_cartan,
    is_nondegenerate,
    is_self_normalizing,
    killing_ad_form,
    killing_gram,
    killing_trace_form,
    normalizer,
    root_space_decomposition,
    verify_odac,
)
from .construct import (
    JIndex,
    Obstruction,
    SymplecticSpace,
    Verdict,
    build_generators,
    build_weyl,
    build_weyl_tensor,
    check_root,
    cocycle,
    construct_odac,
    construct_prime,
    construct_prime_power,
    coord_pairing,
    coords_of,
    shift_matrix,
    sl3_monomial_decomposition,
    symplectic_basis,
)
from .search import (
    LemmaHCandidate,
    OracleInstance,
    classical_odac_search_sl3,
    commuting_partners,
    degeneracy_oracle,
    exhaustive_shape_check,
    lemma_matrices_sl2,
    lemma_matrices_sl3,
    lemma_span_survivors,
    sl2_orthogonality_analysis,
    verify_no_classical_pair,
)
from .serialize import decomposition_from_json, decomposition_to_json, matrix_from_json, matrix_to_json

# names used by the published operation list
build_J = build_weyl
build_J_w = build_weyl_tensor
shift_matrix_X = shift_matrix
lemma_h_oracle = degeneracy_oracle
exhaustive_lemma_shape_check = exhaustive_shape_check
verify_remark_no_pair = verify_no_classical_pair

__version__ = "0.1.0"
