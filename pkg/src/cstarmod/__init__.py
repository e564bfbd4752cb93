"""Hilbert C*-modules over finite-dimensional C*-algebras and exact piecewise polynomials."""

from .algebra import AlgebraDescriptor, AlgElement, hermitian_eig, is_positive, norm, sqrt_positive
from .duality import DualFunctional, hat, omega, reflexivity_check, riesz_solve, self_duality_check
from .errors import CStarModError, DegreeError, DomainError, GrammarError, InvariantError, ShapeError
from .gallery import DEMOS, DemoCertificate, replay, run_demo
from .linking import LinkingElement, embed_algebra, embed_module, embed_operator
from .module import (
    ModuleSpace,
    ModuleVector,
    direct_sum,
    free_module,
    ideal_module,
    inner,
    parse_module,
    scalar_norm,
    tensor_module,
)
from .operators import AdjointableOp, compact_ideal, operator_norm, theta
from .polyfun import IntervalUnion, PiecewisePoly, annihilator_is_trivial, sup_norm
from .submodule import Submodule, orthogonal_complement, submodule_generate
from .suites import SUITES, SuiteConfig, VerificationReport, run_suite
from .tolerances import DEFAULT_TOL, Tolerances

__version__ = "0.1.0"
