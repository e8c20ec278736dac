"""High-precision evaluation of the archimedean constant library: powers of
1/pi, zeta values, quadratic Dirichlet L-values at positive integers, and
square roots.

mpmath supplies the arbitrary-precision substrate (pi, Hurwitz zeta,
digamma, sqrt); the quadratic L-values are assembled here from the
conductor-f Hurwitz decomposition L(k, chi) = f^-k sum_a chi(a) zeta(k, a/f),
with the k = 1 column handled through digamma since the Hurwitz poles cancel
against sum chi(a) = 0.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath import mp, mpf

from .lfunctions import QuadCharacter

_GUARD_BITS = 32


@dataclass(frozen=True)
class One:
    """The constant 1 (rational coefficients with no transcendental part)."""


@dataclass(frozen=True)
class PiPower:
    """pi^(-exponent), exponent >= 1."""

    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")


@dataclass(frozen=True)
class Zeta:
    """zeta(k) at an integer k >= 2."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be >= 2")


@dataclass(frozen=True)
class Lquad:
    """L(k, chi_D) for a fundamental discriminant D != 1 and k >= 1."""

    disc: int
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        QuadCharacter(self.disc)  # validates the discriminant
        if self.disc == 1:
            raise ValueError("use Zeta for the trivial character")


@dataclass(frozen=True)
class SqrtDisc:
    """sqrt(d) for a squarefree integer d >= 2."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("d must be >= 2")


ConstantTag = Union[One, PiPower, Zeta, Lquad, SqrtDisc]

ONE = One()

_cache: dict[tuple[ConstantTag, int], mpf] = {}
_cache_lock = threading.Lock()


def to_mpf(q: Fraction | int) -> mpf:
    """Exact rational -> mpf at the ambient working precision."""
    q = Fraction(q)
    return mpf(q.numerator) / q.denominator


def constant_value(tag: ConstantTag, precision_bits: int) -> mpf:
    """Value of a constant tag, accurate to ~2^-precision_bits.

    Results are memoized per (tag, precision); the cache is lock-protected
    so concurrent readers are safe.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    key = (tag, precision_bits)
    with _cache_lock:
        if key in _cache:
            return _cache[key]
    with mp.workprec(precision_bits + _GUARD_BITS):
        value = +_evaluate(tag)
    with _cache_lock:
        _cache[key] = value
    return value


def _evaluate(tag: ConstantTag) -> mpf:
    if isinstance(tag, One):
        return mp.one
    if isinstance(tag, PiPower):
        return 1 / mp.pi**tag.exponent
    if isinstance(tag, Zeta):
        return mp.zeta(tag.k)
    if isinstance(tag, SqrtDisc):
        return mp.sqrt(tag.d)
    if isinstance(tag, Lquad):
        return _l_value(QuadCharacter(tag.disc), tag.k)
    raise TypeError(f"unknown constant tag {tag!r}")


def _l_value(chi: QuadCharacter, k: int) -> mpf:
    f = chi.conductor
    total = mp.zero
    for a in range(1, f + 1):
        c = chi(a)
        if c == 0:
            continue
        x = mpf(a) / f
        if k == 1:
            total -= c * mp.digamma(x)
        else:
            total += c * mp.zeta(k, x)
    if k == 1:
        return total / f
    return total / mpf(f) ** k
