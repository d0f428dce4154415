"""prenexify: a first-order-formula toolkit for the semi-classical prenex
hierarchy.

Decides membership in the classes J_k^n / R_k^n, performs degree-n
restricted prenex normalization with verifiable rewrite traces, and
cross-validates the characterization by exhaustive rewrite search on
small formulas.
"""

from .formula import (
    FALSUM,
    And,
    Exists,
    Falsum,
    Forall,
    Formula,
    Imp,
    Or,
    Prime,
    alpha_canonical,
    alpha_equivalent,
    free_vars,
    fresh_variable,
    is_quantifier_free,
    positions,
    replace_at,
    subformula_at,
)
from .hierarchy import (
    PrenexShape,
    classify_prenex,
    in_pi,
    in_pi_plus,
    in_sigma,
    in_sigma_plus,
    is_prenex,
)
from .normalizer import NormalizationResult, NotInClassError, normalize_J, normalize_R
from .oracle import ReachableSet, SearchResult, Signature, can_reach, enumerate_formulas, reachable_set
from .parser import ArityError, ParseError, parse, render
from .rewrite import (
    RewriteStep,
    Trace,
    applicable_steps,
    apply_step,
    lifts_to_degree,
    verify_trace,
)
from .semiclassical import (
    ClassVerdict,
    Classifier,
    Witness,
    in_D,
    in_E_plus,
    in_J,
    in_R,
    in_U_plus,
    min_levels,
    verdict,
)

__version__ = "0.1.0"
