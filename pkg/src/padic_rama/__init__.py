"""Exact-arithmetic toolkit for Ramanujan-like hypergeometric series: modular
truncated sums, prime-power congruence templates, high-precision x-shift
expansions, and recovery of unknown rational coefficients from multi-prime
residue data.
"""

from .constants import ONE, ConstantTag, Lquad, One, PiPower, SqrtDisc, Zeta, constant_value
from .congruence import (
    CongruenceReport,
    ExpansionTemplate,
    FitResult,
    Kron,
    LQp,
    ScanReport,
    TemplateTerm,
    ZetaP,
    fit_unknowns,
    scan_next_term,
    template_rhs_mod,
    verify_congruence,
)
from .exactnum import (
    PadicResidue,
    Rational,
    ResidueClass,
    crt_combine,
    kronecker,
    padic_add,
    padic_inv,
    padic_mul,
    primes_in_range,
    rational_reconstruct,
    reduce_rational,
    valuation,
)
from .expansion import (
    ExpansionClaim,
    ExpansionReport,
    TruncatedSeries,
    recognize,
    shifted_expansion,
    verify_expansion,
)
from .lfunctions import (
    BernoulliTableModP,
    L_nonpositive,
    L_p_mod_p,
    QuadCharacter,
    bernoulli_all_mod_p,
    bernoulli_exact,
    generalized_bernoulli,
    zeta_nonpositive,
    zeta_p_mod_p,
)
from .series import (
    ClosedForm,
    SeriesSpec,
    numeric_sum,
    pochhammer,
    rhs_value,
    term_exact,
    truncated_sum_exact,
    truncated_sum_mod,
)

__version__ = "0.1.0"
