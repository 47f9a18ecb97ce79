"""Exact section counts on curves over finite fields and their Fourier reconstruction."""

from .circle import (
    ArcClass,
    CircleSetup,
    Functional,
    arc_sums,
    circle_setup,
    classify_arc,
    deg_alpha,
    degree_table,
    dual_enumerate,
    exp_sum,
    fourier_count,
    fourier_sweep,
    residue_rep,
)
from .counting import CountResult, EquationSpec, brute_force_count, count_by_jets, count_slope, nodal_fiber_product_count
from .curve import (
    ClosedPoint,
    CurveModel,
    DivisorSpec,
    LineBundleSpec,
    Node,
    Section,
    SectionSpace,
    closed_points,
    lift_jets,
    restrict,
    section_space,
)
from .cyclotomic import CycInt, cyc_as_integer, cyc_eval_abs
from .errors import (
    BudgetExceeded,
    FFCircleError,
    IdentityViolation,
    NonpositiveDenominator,
    NonRationalValue,
    NotFactoring,
    NoWitness,
    SpecialRange,
    ValidationError,
)
from .field import FieldElem, FieldSpec, embed, make_field, psi, trace
from .gate import (
    HypothesisVerdict,
    WitnessChain,
    as_genus,
    contradiction_margin,
    expected_affine_exponent,
    expected_moduli_dim,
    find_witness,
    gate_thm31,
    mor_lower_bound,
    verify_witness,
)
from .singular import GammaInterval, SingProfile, gamma_interval, katz_bound_check, minor_envelope_exponent, nbound_rhs, sing_count, sing_dim

__version__ = "0.1.0"
