"""Residual congruence f1 = f2 mod p by comparing Hecke eigenvalues up to the Sturm bound."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .arith import factorize, is_prime, primes_in_range
from .forms import FormView, ReductionKind, as_form

logger = logging.getLogger(__name__)


class CongruenceError(ValueError):
    pass


class CheckKind(Enum):
    GOOD_GOOD = "good_good"
    GOOD_MULT = "good_mult"
    MULT_MULT = "mult_mult"
    SKIPPED_ADDITIVE = "skipped_additive"


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    PASS_WITH_SKIPS = "pass_with_skips"


class LevelChoice(Enum):
    LCM = "lcm"
    PRODUCT = "product"


def gamma0_index(M: int) -> int:
    """[SL2(Z) : Gamma0(M)] = M * prod_{ell | M} (1 + 1/ell)."""
    index = 1
    for ell, e in factorize(M).factors:
        index *= ell ** (e - 1) * (ell + 1)
    return index


def sturm_bound(M: int, k: int = 2) -> int:
    """floor(k * [SL2(Z) : Gamma0(M)] / 12)."""
    if M < 1:
        raise ValueError(f"level must be positive, got {M}")
    if k < 2 or k % 2:
        raise ValueError(f"weight must be even and >= 2, got {k}")
    return k * gamma0_index(M) // 12


@dataclass(frozen=True)
class CongruenceCheck:
    ell: int
    kind: CheckKind
    lhs: Optional[int]
    rhs: Optional[int]
    passed: bool

    @property
    def skipped(self) -> bool:
        return self.kind is CheckKind.SKIPPED_ADDITIVE

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "kind": self.kind.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class CongruenceReport:
    p: int
    sturm_bound: int
    level_used: int
    level_choice: LevelChoice
    checks: Tuple[CongruenceCheck, ...]

    @property
    def failures(self) -> Tuple[CongruenceCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    @property
    def skips(self) -> Tuple[CongruenceCheck, ...]:
        return tuple(c for c in self.checks if c.skipped)

    @property
    def verdict(self) -> Verdict:
        """fail on any mismatch, pass_with_skips when additive primes were skipped."""
        if self.failures:
            return Verdict.FAIL
        if self.skips:
            return Verdict.PASS_WITH_SKIPS
        return Verdict.PASS

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "sturm_bound": self.sturm_bound,
            "level_used": self.level_used,
            "level_choice": self.level_choice.value,
            "verdict": self.verdict.value,
            "checks": [c.to_dict() for c in self.checks],
        }


def _compare(f1: FormView, f2: FormView, ell: int, p: int) -> CongruenceCheck:
    k1, k2 = f1.kind(ell), f2.kind(ell)
    if ReductionKind.ADDITIVE in (k1, k2):
        return CongruenceCheck(ell, CheckKind.SKIPPED_ADDITIVE, None, None, True)
    a1, a2 = f1.a(ell), f2.a(ell)
    # a multiplicative a_ell stands in for a good one as a_ell * (ell + 1)
    lhs = a1 if k1 is ReductionKind.GOOD else a1 * (ell + 1)
    rhs = a2 if k2 is ReductionKind.GOOD else a2 * (ell + 1)
    if k1 is k2:
        kind = CheckKind.GOOD_GOOD if k1 is ReductionKind.GOOD else CheckKind.MULT_MULT
    else:
        kind = CheckKind.GOOD_MULT
    lhs, rhs = lhs % p, rhs % p
    return CongruenceCheck(ell, kind, lhs, rhs, lhs == rhs)


def check_congruence(f1, f2, p: int, level_choice: LevelChoice = LevelChoice.LCM) -> CongruenceReport:
    """Compare a_ell(f1) and a_ell(f2) mod p for every prime ell up to the Sturm bound, and at p."""
    f1, f2 = as_form(f1), as_form(f2)
    if not is_prime(p):
        raise CongruenceError(f"p = {p} is not prime")
    if f1.weight != f2.weight:
        raise CongruenceError(f"weights differ: {f1.weight} vs {f2.weight}")
    for f in (f1, f2):
        if f.level % p == 0:
            raise CongruenceError(f"p = {p} divides the level {f.level} of {f.label}")

    if level_choice is LevelChoice.LCM:
        M = f1.level * f2.level // math.gcd(f1.level, f2.level)
    else:
        M = f1.level * f2.level
    bound = sturm_bound(M, f1.weight)
    primes = sorted(set(primes_in_range(2, bound + 1)) | {p})
    logger.debug("congruence mod %d: level %d, Sturm bound %d, %d primes", p, M, bound, len(primes))

    checks = tuple(_compare(f1, f2, ell, p) for ell in primes)
    report = CongruenceReport(p, bound, M, level_choice, checks)
    for failure in report.failures:
        logger.debug("a_%d differs mod %d: %d vs %d", failure.ell, p, failure.lhs, failure.rhs)
    return report
