"""Imaginary quadratic fields K = Q(sqrt -D).

Class numbers by reduced-form enumeration, prime splitting, exact arithmetic
in the maximal order Z[w] and the explicit decomposition count s_ell of a
split prime in the anticyclotomic Z_p-extension.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .arith import factorize, is_prime, kronecker, valuation

logger = logging.getLogger(__name__)


class QuadFieldError(ValueError):
    pass


class NoRepresentation(ValueError):
    pass


class DegenerateBrinkError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        if not abs(self.b) <= self.a <= self.c:
            return False
        if self.b < 0 and (-self.b == self.a or self.a == self.c):
            return False
        return True

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def _check_discriminant(disc: int) -> None:
    if disc >= 0 or disc % 4 not in (0, 1):
        raise QuadFieldError(f"{disc} is not a negative discriminant (need disc < 0, disc = 0 or 1 mod 4)")


def reduced_forms(disc: int) -> List[BinaryQuadraticForm]:
    """Primitive reduced forms of discriminant disc, ordered by (a, b)."""
    _check_discriminant(disc)
    forms = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            form = BinaryQuadraticForm(a, b, num // (4 * a))
            if form.is_reduced() and form.is_primitive:
                forms.append(form)
        a += 1
    return forms


def class_number(disc: int) -> int:
    """Number of primitive reduced forms of discriminant disc.

    Imprimitive forms are not counted, so a non-fundamental disc gives the class
    number of the order of that discriminant, not the raw count of reduced forms.
    """
    return len(reduced_forms(disc))


class Splitting(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


@dataclass(frozen=True)
class QuadInt:
    """x + y*w in the maximal order."""

    x: int
    y: int

    def __str__(self) -> str:
        sign = "-" if self.y < 0 else "+"
        return f"{self.x} {sign} {abs(self.y)}ω"


@dataclass(frozen=True)
class ImagQuadField:
    """Q(sqrt -D) for squarefree D > 0, with w^2 = trace*w - norm."""

    D: int
    disc: int = field(init=False)
    class_number: int = field(init=False)

    def __post_init__(self):
        if self.D <= 0:
            raise QuadFieldError(f"D must be positive, got {self.D}")
        if any(e > 1 for _, e in factorize(self.D).factors):
            raise QuadFieldError(f"D = {self.D} is not squarefree")
        disc = -self.D if self.D % 4 == 3 else -4 * self.D
        object.__setattr__(self, "disc", disc)
        object.__setattr__(self, "class_number", class_number(disc))

    @property
    def omega_trace(self) -> int:
        return 1 if self.D % 4 == 3 else 0

    @property
    def omega_norm(self) -> int:
        return (self.D + 1) // 4 if self.D % 4 == 3 else self.D

    def mul(self, z: QuadInt, w: QuadInt) -> QuadInt:
        t, n = self.omega_trace, self.omega_norm
        return QuadInt(
            z.x * w.x - n * z.y * w.y,
            z.x * w.y + z.y * w.x + t * z.y * w.y,
        )

    def norm(self, z: QuadInt) -> int:
        return z.x * z.x + self.omega_trace * z.x * z.y + self.omega_norm * z.y * z.y

    def conjugate(self, z: QuadInt) -> QuadInt:
        return QuadInt(z.x + self.omega_trace * z.y, -z.y)

    def __str__(self) -> str:
        return f"Q(sqrt -{self.D})"


def splitting_type(K: ImagQuadField, ell: int) -> Splitting:
    symbol = kronecker(K.disc, ell)
    if symbol == 0:
        return Splitting.RAMIFIED
    return Splitting.SPLIT if symbol == 1 else Splitting.INERT


def _representation_key(rep: Tuple[int, int], p: Optional[int]):
    a, b = rep
    primitive = math.gcd(a, b) == 1
    p_free = p is None or b % p != 0
    return (not primitive, not p_free, abs(b), a < 0, abs(a), b < 0)


def norm_form_representation(
    K: ImagQuadField, target: int, p: Optional[int] = None
) -> Tuple[int, int]:
    """Solve a^2 + t*a*b + n*b^2 = target over the integers.

    Primitive solutions win over rational multiples of smaller ones; then
    p not dividing b (when p is given), smallest |b|, a >= 0, smallest |a|.
    """
    if target < 1:
        raise NoRepresentation(f"target must be positive, got {target}")
    t = K.omega_trace
    depth = -K.disc
    solutions = []
    # 4*target = (2a + t*b)^2 + |disc| * b^2
    bound = math.isqrt(4 * target // depth)
    for b in range(-bound, bound + 1):
        rest = 4 * target - depth * b * b
        if rest < 0:
            continue
        u = math.isqrt(rest)
        if u * u != rest:
            continue
        for root in {u, -u}:
            if (root - t * b) % 2 == 0:
                solutions.append(((root - t * b) // 2, b))
    if not solutions:
        raise NoRepresentation(f"{target} is not a norm from {K}")
    return min(solutions, key=lambda rep: _representation_key(rep, p))


def quadint_pow(z: QuadInt, n: int, K: ImagQuadField) -> QuadInt:
    if n < 0:
        raise ValueError("negative exponent")
    result = QuadInt(1, 0)
    base = z
    while n:
        if n & 1:
            result = K.mul(result, base)
        base = K.mul(base, base)
        n >>= 1
    return result


@dataclass(frozen=True)
class BrinkResult:
    ell: int
    p: int
    rep: Tuple[int, int]
    power: QuadInt
    t: int
    s_ell: int
    flags: Tuple[str, ...] = ()

    @property
    def bstar(self) -> int:
        return self.power.y

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "a": self.rep[0],
            "b": self.rep[1],
            "astar": self.power.x,
            "bstar": self.bstar,
            "t": self.t,
            "s_ell": self.s_ell,
            "flags": list(self.flags),
        }


def brink_s_ell(K: ImagQuadField, ell: int, p: int) -> BrinkResult:
    """Number of primes above a prime of K over ell in the anticyclotomic tower.

    Write ell^h = a^2 + ab + ((D+1)/4) b^2, expand (a + b w)^(p-1) = a* + b* w,
    then s_ell = p^max(0, v_p(b*) - 1).
    """
    if K.D % 4 != 3:
        raise QuadFieldError(f"explicit decomposition recipe needs D = 3 mod 4, got D = {K.D}")
    if not (is_prime(ell) and is_prime(p)):
        raise QuadFieldError(f"ell = {ell} and p = {p} must be prime")
    for q in (ell, p):
        kind = splitting_type(K, q)
        if kind is not Splitting.SPLIT:
            raise QuadFieldError(f"{q} is {kind.value} in {K}, need split")
    h = K.class_number
    if h % p == 0:
        raise QuadFieldError(f"p = {p} divides the class number {h}")

    rep = norm_form_representation(K, ell ** h, p=p)
    power = quadint_pow(QuadInt(*rep), p - 1, K)
    logger.debug("ell=%d rep=%s power=%s", ell, rep, power)
    if power.y == 0:
        raise DegenerateBrinkError(f"b* = 0 for ell = {ell}, rep = {rep}")

    flags = []
    t = valuation(power.y, p)
    if t == 0:
        logger.warning("p = %d does not divide b* = %d at ell = %d; taking s_ell = 1", p, power.y, ell)
        flags.append("p_not_dividing_bstar")
    if h != 2:
        logger.warning("s_%d at class number %d is recipe-based", ell, h)
        flags.append("recipe_based")
    return BrinkResult(ell, p, rep, power, t, p ** max(0, t - 1), tuple(flags))
