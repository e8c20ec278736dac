"""p-adic side: expansion templates r_1 c_1(p) p^{e_1} + ... modulo p^M,
verification of congruence claims over prime ranges, recovery of unknown
rational coefficients from multi-prime residues, and scanning for the next
term beyond a verified modulus.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from .constants import One
from .errors import (
    BadPrime,
    InconsistentResidues,
    InvariantViolation,
    PrecisionUnavailable,
    ReconstructionFailed,
    UnknownCoefficient,
)
from .exactnum import (
    PadicResidue,
    ResidueClass,
    crt_combine,
    kronecker,
    rational_reconstruct,
)
from .lfunctions import L_p_mod_p, QuadCharacter, zeta_p_mod_p
from .series import SeriesSpec, truncated_sum_mod


@dataclass(frozen=True)
class Kron:
    """The Kronecker symbol (disc|p) as a template constant."""

    disc: int


@dataclass(frozen=True)
class ZetaP:
    """zeta_p(k); only its mod-p digit is available."""

    k: int


@dataclass(frozen=True)
class LQp:
    """L_{D,p}(k); only its mod-p digit is available."""

    disc: int
    k: int


TemplateConstant = Union[One, Kron, ZetaP, LQp]


def is_structural_zero(constant: TemplateConstant) -> bool:
    """True when the constant vanishes for every admissible prime
    (the parity zeros: zeta_p at even k, L_{D,p} with chi(-1) = (-1)^k)."""
    if isinstance(constant, ZetaP):
        return constant.k % 2 == 0
    if isinstance(constant, LQp):
        return (constant.disc > 0) == (constant.k % 2 == 0)
    return False


def constant_mod_p(constant: TemplateConstant, p: int) -> int:
    """The constant's value at p: exactly +-1/1 for One/Kron (valid modulo
    every power of p), and the single mod-p digit for ZetaP/LQp (which is
    all that exists of them)."""
    if isinstance(constant, One):
        return 1
    if isinstance(constant, Kron):
        value = kronecker(constant.disc, p)
        if value == 0:
            raise BadPrime(f"p={p} divides the discriminant {constant.disc}")
        return value
    if isinstance(constant, ZetaP):
        return zeta_p_mod_p(constant.k, p)
    if isinstance(constant, LQp):
        return L_p_mod_p(QuadCharacter(constant.disc), constant.k, p)
    raise TypeError(f"unknown template constant {constant!r}")


def _constant_k(constant: TemplateConstant) -> Optional[int]:
    if isinstance(constant, (ZetaP, LQp)):
        return constant.k
    return None


def _constant_disc(constant: TemplateConstant) -> Optional[int]:
    if isinstance(constant, Kron):
        return constant.disc
    if isinstance(constant, LQp):
        return constant.disc
    return None


@dataclass(frozen=True)
class TemplateTerm:
    exponent: int
    constant: TemplateConstant
    coefficient: Optional[Fraction]  # None marks an unknown to be fitted

    @property
    def known(self) -> bool:
        return self.coefficient is not None


@dataclass(frozen=True)
class ExpansionTemplate:
    """Ordered sum of terms coefficient * constant(p) * p^exponent, asserted
    modulo p^modulus_power for the truncated sum rescaled by ``scale``.

    scale is a global unit prefactor: the claim reads
        scale * (truncated sum) == template  (mod p^M).
    """

    terms: tuple[TemplateTerm, ...]
    modulus_power: int
    scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        M = self.modulus_power
        if M < 1:
            raise InvariantViolation("mod_power", "must be >= 1")
        exps = [t.exponent for t in self.terms]
        if any(e < 0 for e in exps):
            raise InvariantViolation("exponent", "must be >= 0")
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise InvariantViolation("exponents", "must be strictly increasing")
        if self.terms and exps[-1] >= M:
            raise InvariantViolation("exponents", f"last exponent must be < {M}")
        for t in self.terms:
            if isinstance(t.constant, (ZetaP, LQp)) and M - t.exponent > 1:
                raise InvariantViolation(
                    "exponent",
                    f"term at p^{t.exponent} carries a one-digit constant but "
                    f"M - e = {M - t.exponent} > 1",
                )
        if self.scale <= 0:
            raise InvariantViolation("scale", "must be a positive rational")

    @property
    def fully_known(self) -> bool:
        return all(t.known for t in self.terms)

    def with_coefficients(self, values: Sequence[Fraction]) -> "ExpansionTemplate":
        """Fill the unknown slots, in order, with the given rationals."""
        values = list(values)
        new_terms = []
        for t in self.terms:
            if t.known:
                new_terms.append(t)
            else:
                new_terms.append(replace(t, coefficient=Fraction(values.pop(0))))
        if values:
            raise ValueError("more coefficients than unknown slots")
        return replace(self, terms=tuple(new_terms))

    def admissibility_exclusions(self) -> set[int]:
        """Small primes that can never be used with this template."""
        out: set[int] = set()
        for t in self.terms:
            disc = _constant_disc(t.constant)
            if disc is not None:
                out.update(_prime_factors(abs(disc)))
            if t.coefficient is not None:
                out.update(_prime_factors(t.coefficient.denominator))
        out.update(_prime_factors(self.scale.denominator))
        out.update(_prime_factors(self.scale.numerator))
        return out

    def min_prime(self) -> int:
        """Smallest p compatible with the one-digit constants (p >= k+2)."""
        lo = 2
        for t in self.terms:
            k = _constant_k(t.constant)
            if k is not None and not is_structural_zero(t.constant):
                lo = max(lo, k + 2)
        return lo


def _prime_factors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.add(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.add(n)
    return out


def template_rhs_mod(tpl: ExpansionTemplate, p: int) -> PadicResidue:
    """Evaluate the template right side modulo p^M.  One-digit constants
    (zeta_p, L_p) enter at slot e with M - e = 1, so a single digit is all
    the modulus can see.
    """
    if not tpl.fully_known:
        raise UnknownCoefficient("template has unresolved coefficients")
    M = tpl.modulus_power
    pM = p**M
    total = 0
    for t in tpl.terms:
        width = M - t.exponent
        if is_structural_zero(t.constant):
            continue
        c = constant_mod_p(t.constant, p)
        coeff = t.coefficient
        if coeff.denominator % p == 0:
            raise BadPrime(f"p={p} divides a template coefficient denominator")
        pw = p**width
        r = coeff.numerator * pow(coeff.denominator, -1, pw) % pw
        total = (total + r * c % pw * p**t.exponent) % pM
    return PadicResidue.from_int_mod(total, p, M)


@dataclass(frozen=True)
class CongruenceRow:
    p: int
    lhs: Optional[int]
    rhs: Optional[int]
    passed: bool
    defect_valuation: Optional[int]  # < M iff failing; None when skipped/passing
    note: str = ""

    @property
    def skipped(self) -> bool:
        return self.lhs is None


@dataclass(frozen=True)
class CongruenceReport:
    series: str
    modulus_power: int
    rows: tuple[CongruenceRow, ...]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows if not r.skipped)

    @property
    def counts(self) -> dict[str, int]:
        return {
            "pass": sum(1 for r in self.rows if r.passed),
            "fail": sum(1 for r in self.rows if not r.passed and not r.skipped),
            "skip": sum(1 for r in self.rows if r.skipped),
        }

    def as_dict(self) -> dict:
        return {
            "series": self.series,
            "mod_power": self.modulus_power,
            "counts": self.counts,
            "all_pass": self.all_pass,
            "rows": [
                {
                    "p": r.p,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "pass": r.passed,
                    "defect_valuation": r.defect_valuation,
                    "note": r.note,
                }
                for r in self.rows
            ],
        }


def _int_val_capped(x: int, p: int, cap: int) -> int:
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def verify_congruence(
    spec: SeriesSpec,
    tpl: ExpansionTemplate,
    primes: Sequence[int],
) -> CongruenceReport:
    """Compare scale * truncated sum against the template modulo p^M for
    every prime given.  Per-prime errors (bad prime, unavailable precision)
    become skipped rows, never exceptions.
    """
    M = tpl.modulus_power
    scaled = spec.scaled(tpl.scale)
    rows = []
    for p in sorted(primes):
        try:
            lhs = truncated_sum_mod(scaled, p, M).residue(M)
            rhs = template_rhs_mod(tpl, p).residue(M)
        except (BadPrime, PrecisionUnavailable) as exc:
            rows.append(
                CongruenceRow(p=p, lhs=None, rhs=None, passed=False,
                              defect_valuation=None, note=str(exc))
            )
            continue
        if lhs == rhs:
            rows.append(CongruenceRow(p=p, lhs=lhs, rhs=rhs, passed=True,
                                      defect_valuation=None))
        else:
            dv = _int_val_capped((lhs - rhs) % p**M, p, M)
            rows.append(CongruenceRow(p=p, lhs=lhs, rhs=rhs, passed=False,
                                      defect_valuation=dv))
    return CongruenceReport(series=spec.name, modulus_power=M, rows=tuple(rows))


LhsProvider = Union[Callable[[int], int], Mapping[int, int]]


def _lhs_residues(
    spec: SeriesSpec,
    tpl: ExpansionTemplate,
    primes: Sequence[int],
    lhs: Optional[LhsProvider],
    mod_power: int,
) -> dict[int, int]:
    out = {}
    scaled = spec.scaled(tpl.scale)
    for p in primes:
        if lhs is None:
            out[p] = truncated_sum_mod(scaled, p, mod_power).residue(mod_power)
        elif callable(lhs):
            out[p] = lhs(p) % p**mod_power
        else:
            out[p] = lhs[p] % p**mod_power
    return out


@dataclass(frozen=True)
class FitResult:
    coefficients: tuple[Fraction, ...]
    template: ExpansionTemplate
    fit_primes: tuple[int, ...]
    held_out_primes: tuple[int, ...]
    held_out_report: Optional[CongruenceReport]

    @property
    def held_out_ok(self) -> bool:
        return self.held_out_report is None or self.held_out_report.all_pass


def fit_unknowns(
    spec: SeriesSpec,
    tpl: ExpansionTemplate,
    primes: Sequence[int],
    *,
    held_out_fraction: float = 0.2,
    lhs: Optional[LhsProvider] = None,
) -> FitResult:
    """Recover the unknown rational coefficients by digit peeling.

    Stage i isolates r_i modulo p^(e_{i+1} - e_i) at every fit prime (the
    final stage uses M - e_t), CRT-combines across primes, and applies
    rational reconstruction; the exact value is substituted before the next
    stage.  The completed template is then re-verified on the held-out top
    slice of the prime range.  ``lhs`` optionally overrides the truncated-sum
    left side (used for synthetic data).
    """
    known_terms = []
    for t in tpl.terms:
        if is_structural_zero(t.constant):
            if not t.known:
                raise InvariantViolation(
                    "template",
                    f"unknown coefficient on the structurally zero constant "
                    f"{t.constant!r}",
                )
            continue  # drop: contributes nothing at any prime
        known_terms.append(t)
    work = replace(tpl, terms=tuple(known_terms))
    if work.fully_known:
        raise ValueError("template has no unknown coefficients to fit")

    primes = sorted(set(primes))
    if len(primes) < 2:
        raise ValueError("need at least two primes")
    n_held = max(1, int(round(held_out_fraction * len(primes))))
    fit_primes, held_out = primes[:-n_held], primes[-n_held:]

    M = work.modulus_power
    residues = _lhs_residues(spec, work, fit_primes, lhs, M)
    exps = [t.exponent for t in work.terms]
    windows = [b - a for a, b in zip(exps, exps[1:])] + [M - exps[-1]]

    recovered: list[Fraction] = []
    residual = dict(residues)
    for idx, term in enumerate(work.terms):
        e, w = term.exponent, windows[idx]
        if term.known:
            for p in fit_primes:
                residual[p] = _subtract_term(residual[p], term, p, M)
            continue
        classes = []
        for p in fit_primes:
            r = residual[p]
            if r % p**e != 0:
                raise InconsistentResidues(
                    f"residual at p={p} has valuation below the slot p^{e}"
                )
            c = constant_mod_p(term.constant, p)
            if c % p == 0:
                continue  # this prime carries no information for r_i
            pw = p**w
            q = r // p**e * pow(c, -1, pw) % pw
            classes.append(ResidueClass(q, pw))
        if not classes:
            raise ReconstructionFailed("no prime constrained the coefficient")
        combined = crt_combine(classes)
        value = rational_reconstruct(combined)
        if value is None:
            raise ReconstructionFailed(
                f"no bounded rational matches residue class mod {combined.modulus}; "
                "increase the prime count"
            )
        bad = [p for p in primes if value.denominator % p == 0]
        if bad:
            # re-run without the primes dividing the recovered denominator
            return fit_unknowns(
                spec, tpl, [p for p in primes if p not in bad],
                held_out_fraction=held_out_fraction, lhs=lhs,
            )
        recovered.append(value)
        solved = replace(term, coefficient=value)
        for p in fit_primes:
            residual[p] = _subtract_term(residual[p], solved, p, M)

    for p in fit_primes:
        if residual[p] % p**M != 0:
            raise InconsistentResidues(
                f"template does not explain the residue at p={p} modulo p^{M}"
            )

    completed = work.with_coefficients(recovered)
    report = None
    if held_out and lhs is None:
        report = verify_congruence(spec, completed, held_out)
    elif held_out:
        rows = []
        ho = _lhs_residues(spec, completed, held_out, lhs, M)
        for p in held_out:
            rhs = template_rhs_mod(completed, p).residue(M)
            ok = ho[p] == rhs
            dv = None if ok else _int_val_capped((ho[p] - rhs) % p**M, p, M)
            rows.append(CongruenceRow(p=p, lhs=ho[p], rhs=rhs, passed=ok,
                                      defect_valuation=dv))
        report = CongruenceReport(series=spec.name, modulus_power=M,
                                  rows=tuple(rows))
    return FitResult(
        coefficients=tuple(recovered),
        template=completed,
        fit_primes=tuple(fit_primes),
        held_out_primes=tuple(held_out),
        held_out_report=report,
    )


def _subtract_term(residual: int, term: TemplateTerm, p: int, M: int) -> int:
    width = M - term.exponent
    pw = p**width
    c = constant_mod_p(term.constant, p)
    r = term.coefficient.numerator * pow(term.coefficient.denominator, -1, pw) % pw
    return (residual - r * c % pw * p**term.exponent) % p**M


@dataclass(frozen=True)
class CandidateFit:
    constant: TemplateConstant
    coefficient: Optional[Fraction]
    primes_used: int
    note: str = ""


@dataclass(frozen=True)
class ScanReport:
    outcome: str  # "found" | "no_defect" | "indeterminate"
    defect_exponent: Optional[int]
    digits: dict[int, int]
    candidates: tuple[CandidateFit, ...]
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "defect_exponent": self.defect_exponent,
            "digits": {str(p): d for p, d in sorted(self.digits.items())},
            "note": self.note,
            "candidates": [
                {
                    "constant": repr(c.constant),
                    "coefficient": None if c.coefficient is None else str(c.coefficient),
                    "primes_used": c.primes_used,
                    "note": c.note,
                }
                for c in self.candidates
            ],
        }


def scan_next_term(
    spec: SeriesSpec,
    tpl: ExpansionTemplate,
    primes: Sequence[int],
    candidates: Sequence[TemplateConstant],
    *,
    max_power: Optional[int] = None,
) -> ScanReport:
    """Probe the defect sum - template beyond the verified modulus and try
    to express its first nonzero digit as rational * candidate(p).

    Templates whose last term carries a one-digit constant (zeta_p / L_p)
    cannot be probed past their modulus -- the constant's own next digit is
    unknown -- and the scan reports that outcome instead of guessing.
    """
    if not tpl.fully_known:
        raise UnknownCoefficient("template has unresolved coefficients")
    M = tpl.modulus_power
    limit = max_power if max_power is not None else M + 4
    known_power = min(
        (t.exponent + 1 for t in tpl.terms
         if isinstance(t.constant, (ZetaP, LQp)) and not is_structural_zero(t.constant)),
        default=None,
    )
    if known_power is not None and known_power <= M:
        return ScanReport(
            outcome="indeterminate",
            defect_exponent=None,
            digits={},
            candidates=tuple(
                CandidateFit(constant=c, coefficient=None, primes_used=0,
                             note="template not evaluable past its modulus")
                for c in candidates
            ),
            note=(
                "the template's one-digit constant at slot "
                f"p^{known_power - 1} caps evaluation at p^{known_power}; "
                "the defect beyond the modulus is unknowable"
            ),
        )

    primes = sorted(set(primes))
    scaled = spec.scaled(tpl.scale)
    # all surviving constants are exact (One/Kron), so the template extends
    # to any modulus; structural zeros contribute nothing and are dropped
    deep = ExpansionTemplate(
        terms=tuple(t for t in tpl.terms if not is_structural_zero(t.constant)),
        modulus_power=limit,
        scale=tpl.scale,
    )
    defects: dict[int, int] = {}
    for p in primes:
        lhs = truncated_sum_mod(scaled, p, limit).residue(limit)
        rhs = _exact_template_value(deep, p, limit)
        defects[p] = (lhs - rhs) % p**limit

    exponent = None
    for e in range(M, limit):
        if any(d % p ** (e + 1) != 0 for p, d in defects.items()):
            exponent = e
            break
    if exponent is None:
        return ScanReport(
            outcome="no_defect",
            defect_exponent=None,
            digits={p: 0 for p in primes},
            candidates=tuple(
                CandidateFit(constant=c, coefficient=Fraction(0),
                             primes_used=len(primes))
                for c in candidates
            ),
            note=f"sum agrees with the template modulo p^{limit} at every prime",
        )

    digits = {p: defects[p] // p**exponent % p for p in primes}
    fits = []
    for cand in candidates:
        if is_structural_zero(cand):
            fits.append(CandidateFit(constant=cand, coefficient=None,
                                     primes_used=0,
                                     note="structurally zero constant"))
            continue
        classes = []
        used = 0
        mink = _constant_k(cand)
        for p in primes:
            if mink is not None and p < mink + 2:
                continue
            try:
                c = constant_mod_p(cand, p)
            except (BadPrime, PrecisionUnavailable):
                continue
            if c % p == 0:
                continue
            classes.append(ResidueClass(digits[p] * pow(c, -1, p) % p, p))
            used += 1
        if not classes:
            raise PrecisionUnavailable(
                f"candidate {cand!r} is not evaluable at any scan prime"
            )
        value = rational_reconstruct(crt_combine(classes))
        if value is None:
            fits.append(CandidateFit(constant=cand, coefficient=None,
                                     primes_used=used,
                                     note="no bounded rational fits"))
        else:
            fits.append(CandidateFit(constant=cand, coefficient=value,
                                     primes_used=used))
    return ScanReport(
        outcome="found",
        defect_exponent=exponent,
        digits=digits,
        candidates=tuple(fits),
    )


def _exact_template_value(tpl: ExpansionTemplate, p: int, mod_power: int) -> int:
    """Template value mod p^mod_power; valid only when every constant is
    exact (One/Kron) -- callers must have checked."""
    pM = p**mod_power
    total = 0
    for t in tpl.terms:
        if is_structural_zero(t.constant):
            continue
        c = constant_mod_p(t.constant, p)
        r = t.coefficient.numerator * pow(t.coefficient.denominator, -1, pM) % pM
        total = (total + r * c % pM * p**t.exponent) % pM
    return total
