"""Weight-2r newforms as seen by the transfer machinery.

An elliptic curve and a user-supplied eigenform record expose the same
interface (level, weight, a(ell), kind(ell)) through FormView.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Tuple, Union

from .arith import factorize, is_prime
from .curves import EllipticCurveQ, Reduction, conductor, local_data, trace_of_frobenius


class ValidationError(ValueError):
    """A record violates a structural invariant.

    `key` names the offending field; `path` and `line` are filled in when
    the record came from disk.
    """

    def __init__(
        self,
        message: str,
        *,
        key: Optional[str] = None,
        path: Optional[str] = None,
        line: Optional[int] = None,
    ):
        self.message = message
        self.key = key
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)

    def located(self, path: str, line: Optional[int]) -> "ValidationError":
        return ValidationError(self.message, key=self.key, path=path, line=line)


class MissingCoefficient(LookupError):
    pass


class ReductionKind(Enum):
    GOOD = "good"
    MULTIPLICATIVE = "bad_multiplicative"
    ADDITIVE = "bad_additive"

    @classmethod
    def from_reduction(cls, reduction: Reduction) -> "ReductionKind":
        if reduction is Reduction.GOOD:
            return cls.GOOD
        if reduction.is_multiplicative:
            return cls.MULTIPLICATIVE
        return cls.ADDITIVE


@dataclass(frozen=True)
class EigenformRecord:
    level: int
    weight: int
    a_coeffs: Mapping[int, int]
    bad_prime_kinds: Mapping[int, ReductionKind]
    label: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def _fail(self, message: str, key: str) -> None:
        raise ValidationError(message, key=key)

    def validate(self) -> None:
        if self.level < 1:
            self._fail(f"level must be positive, got {self.level}", "level")
        if self.weight < 2 or self.weight % 2:
            self._fail(f"weight must be even and >= 2, got {self.weight}", "weight")
        level_primes = factorize(self.level).primes
        for ell in level_primes:
            if ell not in self.bad_prime_kinds:
                self._fail(f"no reduction kind given for {ell} | level {self.level}", "bad_prime_kinds")
        for ell, kind in self.bad_prime_kinds.items():
            if ell not in level_primes:
                self._fail(f"{ell} has a bad-prime kind but does not divide the level", "bad_prime_kinds")
            if kind is ReductionKind.GOOD:
                self._fail(f"bad prime {ell} marked good", "bad_prime_kinds")
        for ell, a in self.a_coeffs.items():
            if not is_prime(ell):
                self._fail(f"coefficient index {ell} is not prime", "a_coeffs")
            if ell in self.bad_prime_kinds:
                continue
            # |a_ell| <= 2 ell^((k-1)/2), squared to stay in integers
            if a * a > 4 * ell ** (self.weight - 1):
                self._fail(f"a_{ell} = {a} exceeds the Hasse-Deligne bound", "a_coeffs")


class FormView:
    label: str
    level: int
    weight: int

    def a(self, ell: int) -> int:
        raise NotImplementedError

    def kind(self, ell: int) -> ReductionKind:
        raise NotImplementedError

    @property
    def bad_primes(self) -> Tuple[int, ...]:
        return factorize(self.level).primes

    @property
    def curve(self) -> Optional[EllipticCurveQ]:
        return None


class CurveForm(FormView):
    """The weight-2 newform attached to an elliptic curve."""

    weight = 2

    def __init__(self, E: EllipticCurveQ):
        self.E = E
        self.label = E.label or str(E)
        self._conductor = conductor(E)
        self.level = self._conductor.value

    @property
    def curve(self) -> EllipticCurveQ:
        return self.E

    @property
    def bad_primes(self) -> Tuple[int, ...]:
        return self._conductor.primes

    def kind(self, ell: int) -> ReductionKind:
        if self.level % ell:
            return ReductionKind.GOOD
        return ReductionKind.from_reduction(local_data(self.E, ell).reduction)

    def a(self, ell: int) -> int:
        if self.level % ell:
            return trace_of_frobenius(self.E, ell)
        reduction = local_data(self.E, ell).reduction
        if reduction is Reduction.SPLIT_MULTIPLICATIVE:
            return 1
        if reduction is Reduction.NONSPLIT_MULTIPLICATIVE:
            return -1
        return 0


class EigenformView(FormView):
    def __init__(self, record: EigenformRecord):
        self.record = record
        self.label = record.label or f"f[{record.level},{record.weight}]"
        self.level = record.level
        self.weight = record.weight

    def kind(self, ell: int) -> ReductionKind:
        return self.record.bad_prime_kinds.get(ell, ReductionKind.GOOD)

    def a(self, ell: int) -> int:
        if self.kind(ell) is ReductionKind.ADDITIVE:
            return self.record.a_coeffs.get(ell, 0)
        try:
            return self.record.a_coeffs[ell]
        except KeyError:
            raise MissingCoefficient(f"{self.label} has no coefficient a_{ell}") from None


def as_form(obj: Union[FormView, EllipticCurveQ, EigenformRecord]) -> FormView:
    if isinstance(obj, FormView):
        return obj
    if isinstance(obj, EllipticCurveQ):
        return CurveForm(obj)
    if isinstance(obj, EigenformRecord):
        return EigenformView(obj)
    raise TypeError(f"cannot view {type(obj).__name__} as a modular form")
