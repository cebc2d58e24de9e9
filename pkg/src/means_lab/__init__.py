"""Bivariate means, signed inequality margins and certified counterexample search."""

__version__ = "0.1.0"

from .errors import DomainError, OutOfRangeError
from .means import (
    DEFAULT_POLICY,
    EvalPolicy,
    MeanKind,
    PositivePair,
    RatioForm,
    eval_all,
    eval_classical,
    eval_identric,
    eval_logarithmic,
    eval_mean,
    eval_seiffert,
    normalize,
)
from .inequalities import (
    REL_TOL,
    ChainMargins,
    IdentityResiduals,
    InequalityId,
    MarginRecord,
    chain_margins,
    lemma_gap,
    margin,
    margin_p_le_i,
    margin_product,
    margin_record,
    margin_sandor,
    margin_seiffert_conj,
    margin_sum,
    power_gap,
    power_sum_recurrence,
    proof_identity_residuals,
)
from .oracle import (
    CertifiedSign,
    HPValue,
    SignOutcome,
    certify_sign,
    eval_mean_hp,
    margin_hp,
)
from .explorer import (
    Bracket,
    CriticalProfile,
    HuntResult,
    ScanConfig,
    SignMap,
    Witness,
    assess_margin,
    bracket_ratio_crossing,
    exponent_profile,
    hunt,
    min_margin_over_ratio,
    scan,
)
