"""Exact weak Jacobi forms and lattice VOA characters with numeric transformation checks."""

from .errors import (
    BadWeight,
    HypothesisViolated,
    InfiniteOrder,
    IntegralityViolation,
    InvalidLattice,
    JacobiVOAError,
    NonInvertible,
    NotPolynomialInX,
    PermutationMismatch,
    PrecisionLoss,
    PreconditionError,
    UnstableFit,
    VerificationError,
    WeightMismatch,
)
from .jacobi import (
    JacobiSeries,
    LeadingPolynomial,
    Verdict,
    classify,
    codim_sum,
    dim_true,
    dim_weak,
    elliptic_symmetry_check,
    eta_multiply,
    gen_phi_0_1,
    gen_phi_m2_1,
    leading_polynomial,
    prop2_criterion,
    q_basis,
    structure_map,
)
from .lattice import (
    CosetModule,
    EvenLattice,
    LatticeVector,
    character,
    characters,
    discriminant_group,
    enumerate_vectors,
    index_integrality,
    phi_miyamoto,
    trace_Z,
    twisted_character,
)
from .modular import ModularForm, basis_Mk, delta, dim_Mk, eisenstein
from .series import PhasedSeries, QSeries, arith, eta, eval_numeric, pow_invert

__version__ = "0.1.0"
