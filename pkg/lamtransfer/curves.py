"""Elliptic curves over Q.

Naive point counting, Tate's algorithm (reduction type, conductor exponent,
Tamagawa number, local minimal model) and the p-torsion tests needed by the
hypothesis checks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Optional, Tuple, TYPE_CHECKING

from .arith import (
    PrimeFactorization,
    factorize,
    inverse_mod,
    kronecker,
    primes_in_range,
    valuation,
)

if TYPE_CHECKING:
    from .quadfield import ImagQuadField

logger = logging.getLogger(__name__)

TORSION_SAMPLE_SIZE = 20
TORSION_PRIME_BOUND = 1000
CACHE_SIZE = 4096


class SingularCurveError(ValueError):
    pass


class BadReductionError(ValueError):
    pass


class InsufficientPrimesError(RuntimeError):
    pass


class Reduction(Enum):
    GOOD = "good"
    SPLIT_MULTIPLICATIVE = "split_multiplicative"
    NONSPLIT_MULTIPLICATIVE = "nonsplit_multiplicative"
    ADDITIVE = "additive"

    @property
    def is_multiplicative(self) -> bool:
        return self in (Reduction.SPLIT_MULTIPLICATIVE, Reduction.NONSPLIT_MULTIPLICATIVE)


class TorsionVerdict(Enum):
    VERIFIED_TRIVIAL = "verified_trivial"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EllipticCurveQ:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: Optional[str] = None

    def __post_init__(self):
        if self.discriminant == 0:
            raise SingularCurveError(f"singular Weierstrass model {list(self.ainvs)}")

    @classmethod
    def from_ainvs(cls, ainvs, label: Optional[str] = None) -> "EllipticCurveQ":
        if len(ainvs) != 5:
            raise ValueError(f"expected 5 a-invariants, got {len(ainvs)}")
        return cls(*(int(a) for a in ainvs), label=label)

    @property
    def ainvs(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @cached_property
    def b_invariants(self) -> Tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @cached_property
    def c4(self) -> int:
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @cached_property
    def c6(self) -> int:
        b2, b4, b6, _ = self.b_invariants
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @cached_property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def quadratic_twist(self, d: int) -> "EllipticCurveQ":
        """Twist by Q(sqrt d), on the short model y^2 = x^3 - 27 d^2 c4 x - 54 d^3 c6."""
        label = f"{self.label}^({d})" if self.label else None
        return EllipticCurveQ(0, 0, 0, -27 * d * d * self.c4, -54 * d ** 3 * self.c6, label=label)

    def __str__(self) -> str:
        name = self.label or "E"
        return f"{name} {list(self.ainvs)}"


@dataclass(frozen=True)
class LocalReductionData:
    ell: int
    reduction: Reduction
    conductor_exponent: int
    tamagawa: int
    ord_min_disc: int
    kodaira: str
    minimal_model: EllipticCurveQ


def _count_affine_points(ainvs, ell: int) -> int:
    a1, a2, a3, a4, a6 = (a % ell for a in ainvs)
    count = 0
    if ell == 2 or ell == 3:
        for x in range(ell):
            rhs = (x ** 3 + a2 * x * x + a4 * x + a6) % ell
            for y in range(ell):
                if (y * y + a1 * x * y + a3 * y - rhs) % ell == 0:
                    count += 1
        return count
    for x in range(ell):
        # y^2 + (a1 x + a3) y - f(x) = 0 has 1 + (disc | ell) roots
        lin = a1 * x + a3
        disc = lin * lin + 4 * (x ** 3 + a2 * x * x + a4 * x + a6)
        count += 1 + kronecker(disc, ell)
    return count


@lru_cache(maxsize=CACHE_SIZE)
def trace_of_frobenius(E: EllipticCurveQ, ell: int) -> int:
    """a_ell = ell + 1 - #E(F_ell) for a prime of good reduction."""
    model = E
    if E.discriminant % ell == 0:
        data = local_data(E, ell)
        if data.reduction is not Reduction.GOOD:
            raise BadReductionError(f"{E} has bad reduction at {ell}")
        model = data.minimal_model
    return ell + 1 - (1 + _count_affine_points(model.ainvs, ell))


def point_count(E: EllipticCurveQ, q: int) -> int:
    """#E(F_q) for a prime power q at which E has good reduction."""
    fact = factorize(q)
    if len(fact.factors) != 1:
        raise ValueError(f"{q} is not a prime power")
    (ell, n), = fact.factors
    return reduced_point_count(trace_of_frobenius(E, ell), ell, n)


def reduced_point_count(a_ell: int, ell: int, n: int) -> int:
    """#E~(F_{ell^n}) from the trace a_ell via s_n = a s_{n-1} - ell s_{n-2}."""
    s_prev, s = 2, a_ell
    for _ in range(n - 1):
        s_prev, s = s, a_ell * s - ell * s_prev
    return ell ** n + 1 - s


def _transform(ainvs, r: int = 0, s: int = 0, t: int = 0, u: int = 1):
    a1, a2, a3, a4, a6 = ainvs
    b1 = a1 + 2 * s
    b2 = a2 - s * a1 + 3 * r - s * s
    b3 = a3 + r * a1 + 2 * t
    b4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    b6 = a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1
    if u == 1:
        return (b1, b2, b3, b4, b6)
    out = []
    for value, weight in zip((b1, b2, b3, b4, b6), (1, 2, 3, 4, 6)):
        q, rem = divmod(value, u ** weight)
        if rem:
            raise ArithmeticError("non-integral change of variables")
        out.append(q)
    return tuple(out)


def _quadratic_has_root(a: int, b: int, c: int, p: int) -> bool:
    """Whether a T^2 + b T + c has a root in F_p (a nonzero mod p)."""
    if p <= 3:
        return any((a * x * x + b * x + c) % p == 0 for x in range(p))
    return kronecker(b * b - 4 * a * c, p) != -1


def _cubic_root_count(b: int, c: int, d: int, p: int) -> int:
    """Number of roots of T^3 + b T^2 + c T + d in F_p."""
    return sum(1 for x in range(p) if (x ** 3 + b * x * x + c * x + d) % p == 0)


def _tate(ainvs, p: int) -> Tuple[Reduction, int, int, int, str, tuple]:
    """Tate's algorithm at p.

    Returns (reduction, conductor exponent, Tamagawa number, ord_p of the
    minimal discriminant, Kodaira symbol, local minimal model).
    """
    a = tuple(ainvs)
    while True:
        E = EllipticCurveQ(*a)
        n = valuation(E.discriminant, p)
        if n == 0:
            return Reduction.GOOD, 0, 1, 0, "I0", a
        b2, b4, b6, b8 = E.b_invariants
        c4, c6 = E.c4, E.c6
        a1, a2, a3, a4, a6 = a

        # Move the singular point of the reduction to (0, 0).
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            if c4 % p == 0:
                r = (-b2 * inverse_mod(12, p)) % p
            else:
                r = (-(c6 + b2 * c4) * inverse_mod(12 * c4, p)) % p
            t = (-(a1 * r + a3) * inverse_mod(2, p)) % p
        a = _transform(a, r=r, t=t)
        a1, a2, a3, a4, a6 = a

        if c4 % p != 0:
            # Tangents at the node: T^2 + a1 T - a2.
            if _quadratic_has_root(1, a1, -a2, p):
                return Reduction.SPLIT_MULTIPLICATIVE, 1, n, n, f"I{n}", a
            tamagawa = 2 if n % 2 == 0 else 1
            return Reduction.NONSPLIT_MULTIPLICATIVE, 1, tamagawa, n, f"I{n}", a

        if a6 % (p * p) != 0:
            return Reduction.ADDITIVE, n, 1, n, "II", a
        b8 = EllipticCurveQ(*a).b_invariants[3]
        if b8 % p ** 3 != 0:
            return Reduction.ADDITIVE, n - 1, 2, n, "III", a
        b6 = EllipticCurveQ(*a).b_invariants[2]
        if b6 % p ** 3 != 0:
            c = 3 if _quadratic_has_root(1, a3 // p, -(a6 // (p * p)), p) else 1
            return Reduction.ADDITIVE, n - 2, c, n, "IV", a

        # Now p | a1, a2; p^2 | a3, a4; p^3 | a6.
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            # Unreduced: a3 + 2t must gain a full factor of p.
            half = (p + 1) // 2
            s = -a1 * half
            t = -a3 * half
        a = _transform(a, s=s, t=t)
        a1, a2, a3, a4, a6 = a

        b, c, d = a2 // p, a4 // (p * p), a6 // p ** 3
        w = 27 * d * d - b * b * c * c + 4 * b ** 3 * d - 18 * b * c * d + 4 * c ** 3
        x = 3 * c - b * b
        if w % p != 0:
            roots = _cubic_root_count(b, c, d, p)
            return Reduction.ADDITIVE, n - 4, 1 + roots, n, "I0*", a

        if x % p != 0:
            # Double root: move it to 0, then peel off I_m^* one step at a time.
            if p == 2:
                r = c
            elif p == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) * inverse_mod(2 * x, p)
            a = _transform(a, r=p * (r % p))
            ix, iy, mx, my = 3, 3, p * p, p * p
            tamagawa = 0
            while not tamagawa:
                a1, a2, a3, a4, a6 = a
                xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
                if (xa3 * xa3 + 4 * xa6) % p != 0:
                    tamagawa = 4 if _quadratic_has_root(1, xa3, -xa6, p) else 2
                    break
                if p == 2:
                    t = my * (xa6 % 2)
                else:
                    t = my * ((-xa3 * inverse_mod(2, p)) % p)
                a = _transform(a, t=t)
                my *= p
                iy += 1
                a1, a2, a3, a4, a6 = a
                xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % p != 0:
                    tamagawa = 4 if _quadratic_has_root(xa2, xa4, xa6, p) else 2
                    break
                if p == 2:
                    r = mx * ((xa6 * xa2) % 2)
                else:
                    r = mx * ((-xa4 * inverse_mod(2 * xa2, p)) % p)
                a = _transform(a, r=r)
                mx *= p
                ix += 1
            m = ix + iy - 5
            return Reduction.ADDITIVE, n - m - 4, tamagawa, n, f"I{m}*", a

        # Triple root: move it to 0.
        if p == 2:
            r = b
        elif p == 3:
            r = -d
        else:
            r = -b * inverse_mod(3, p)
        a = _transform(a, r=p * (r % p))
        a1, a2, a3, a4, a6 = a
        x3, x6 = a3 // (p * p), a6 // p ** 4
        if (x3 * x3 + 4 * x6) % p != 0:
            c = 3 if _quadratic_has_root(1, x3, -x6, p) else 1
            return Reduction.ADDITIVE, n - 6, c, n, "IV*", a
        if p == 2:
            t = x6 % 2
        else:
            t = (-x3 * inverse_mod(2, p)) % p
        a = _transform(a, t=p * p * t)
        a1, a2, a3, a4, a6 = a
        if a4 % p ** 4 != 0:
            return Reduction.ADDITIVE, n - 7, 2, n, "III*", a
        if a6 % p ** 6 != 0:
            return Reduction.ADDITIVE, n - 8, 1, n, "II*", a

        logger.debug("model not minimal at %d, rescaling by u = %d", p, p)
        a = _transform(a, u=p)


@lru_cache(maxsize=CACHE_SIZE)
def local_data(E: EllipticCurveQ, ell: int) -> LocalReductionData:
    reduction, f, c, n, kodaira, model = _tate(E.ainvs, ell)
    return LocalReductionData(
        ell=ell,
        reduction=reduction,
        conductor_exponent=f,
        tamagawa=c,
        ord_min_disc=n,
        kodaira=kodaira,
        minimal_model=EllipticCurveQ(*model, label=E.label),
    )


def bad_primes(E: EllipticCurveQ) -> Tuple[int, ...]:
    """Primes of bad reduction (primes of the model discriminant that stay bad)."""
    return tuple(
        ell
        for ell in factorize(abs(E.discriminant)).primes
        if local_data(E, ell).reduction is not Reduction.GOOD
    )


def conductor(E: EllipticCurveQ) -> PrimeFactorization:
    factors = []
    value = 1
    for ell in bad_primes(E):
        f = local_data(E, ell).conductor_exponent
        factors.append((ell, f))
        value *= ell ** f
    return PrimeFactorization(value, tuple(factors))


def tamagawa_product(E: EllipticCurveQ) -> int:
    product = 1
    for ell in bad_primes(E):
        product *= local_data(E, ell).tamagawa
    return product


def tamagawa_p_part(E: EllipticCurveQ, p: int) -> int:
    """prod_ell c_ell^(p), the largest power of p dividing the Tamagawa product."""
    c = tamagawa_product(E)
    return p ** valuation(c, p)


@dataclass(frozen=True)
class TorsionEvidence:
    verdict: TorsionVerdict
    p: int
    gcd_untwisted: int
    gcd_twisted: int
    primes: Tuple[int, ...]


def torsion_p_trivial_over_K(
    E: EllipticCurveQ,
    K: "ImagQuadField",
    p: int,
    *,
    sample_size: int = TORSION_SAMPLE_SIZE,
    prime_bound: int = TORSION_PRIME_BOUND,
) -> TorsionEvidence:
    """One-sided test for E(K)[p] = 0 through E(K)[p] -> E(Q)[p] + E^(d)(Q)[p].

    The reduction map is injective on prime-to-q torsion, so p dividing
    neither gcd of #E(F_q) nor of #E^(d)(F_q) rules out p-torsion.
    """
    if p % 2 == 0:
        raise ValueError("p must be odd")
    d = K.disc
    twist = E.quadratic_twist(d)
    excluded = 6 * p * E.discriminant * d
    primes = []
    for q in primes_in_range(5, prime_bound):
        if excluded % q == 0:
            continue
        primes.append(q)
        if len(primes) == sample_size:
            break
    if len(primes) < sample_size:
        raise InsufficientPrimesError(
            f"only {len(primes)} usable primes below {prime_bound}, need {sample_size}"
        )
    g_e = g_t = 0
    for q in primes:
        g_e = math.gcd(g_e, q + 1 - trace_of_frobenius(E, q))
        g_t = math.gcd(g_t, q + 1 - trace_of_frobenius(twist, q))
    verdict = (
        TorsionVerdict.VERIFIED_TRIVIAL
        if g_e % p != 0 and g_t % p != 0
        else TorsionVerdict.INCONCLUSIVE
    )
    logger.debug("torsion gcds for %s over disc %d: %d, %d", E, d, g_e, g_t)
    return TorsionEvidence(verdict, p, g_e, g_t, tuple(primes))


def reduced_curve_p_torsion_trivial(E: EllipticCurveQ, q: int, p: int) -> bool:
    """True iff p does not divide #E~(F_q)."""
    return point_count(E, q) % p != 0
