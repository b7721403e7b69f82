"""Exact integer, modular and F_p polynomial arithmetic.

Everything here works on Python integers (arbitrary precision) and is pure:
values are immutable once built, functions have no side effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple


# Deterministic for n < 3.3 * 10**24, far past anything a conductor reaches.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_TRIAL_LIMIT = 1 << 20


class ZeroPolynomialError(ValueError):
    pass


def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed base set."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(start: int, stop: int) -> Iterator[int]:
    """Yield the primes p with start <= p < stop, ascending."""
    if stop <= 2:
        return
    sieve = bytearray([1]) * stop
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(stop - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, stop, i)))
    for n in range(max(start, 2), stop):
        if sieve[n]:
            yield n


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PrimeFactorization:
    value: int
    factors: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        product = 1
        last = 1
        for prime, exponent in self.factors:
            if prime <= last or exponent < 1 or not is_prime(prime):
                raise ValueError(f"malformed factorization of {self.value}: {self.factors}")
            product *= prime ** exponent
            last = prime
        if product != self.value:
            raise ValueError(f"factors {self.factors} do not multiply to {self.value}")

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent(self, prime: int) -> int:
        return dict(self.factors).get(prime, 0)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "·".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n.

    Brent's cycle search with the constants c = 1, 2, ... in turn, so the
    same n always splits the same way.
    """
    for c in range(1, n):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split(n: int, out: List[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.append(n)
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


def factorize(n: int) -> PrimeFactorization:
    """Trial division up to 2**20, Pollard-Brent on whatever is left."""
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    primes: List[int] = []
    m = n
    for q in (2, 3):
        while m % q == 0:
            primes.append(q)
            m //= q
    q = 5
    while q * q <= m and q < _TRIAL_LIMIT:
        for r in (q, q + 2):
            while m % r == 0:
                primes.append(r)
                m //= r
        q += 6
    if m > 1:
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
            primes.append(m)
        else:
            _split(m, primes)
    counts: dict = {}
    for prime in primes:
        counts[prime] = counts.get(prime, 0) + 1
    return PrimeFactorization(n, tuple(sorted(counts.items())))


def euler_phi(n: int) -> int:
    result = n
    for prime in factorize(n).primes:
        result -= result // prime
    return result


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for arbitrary integers a and n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    t = 1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 == 1 and a % 8 in (3, 5):
        t = -t
    if n < 0:
        n = -n
        if a < 0:
            t = -t
    # Jacobi symbol for odd positive n
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def inverse_mod(a: int, p: int) -> int:
    return pow(a % p, -1, p)


@dataclass(frozen=True)
class PolyModP:
    """Polynomial over F_p, constant term first."""

    p: int
    coeffs: Tuple[int, ...] = ()

    def __post_init__(self):
        for c in self.coeffs:
            if not 0 <= c < self.p:
                raise ValueError(f"coefficient {c} not reduced mod {self.p}")
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("trailing zero coefficient")

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], p: int) -> "PolyModP":
        reduced = [c % p for c in coeffs]
        while reduced and reduced[-1] == 0:
            reduced.pop()
        return cls(p, tuple(reduced))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def __add__(self, other: "PolyModP") -> "PolyModP":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolyModP.from_ints([x + y for x, y in zip(a, b)], self.p)

    def __mul__(self, other: "PolyModP") -> "PolyModP":
        self._check(other)
        if self.is_zero or other.is_zero:
            return PolyModP(self.p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return PolyModP.from_ints(out, self.p)

    def divide_linear(self, x0: int) -> Tuple["PolyModP", int]:
        """Synthetic division by (X - x0): returns (quotient, remainder)."""
        if self.is_zero:
            return self, 0
        x0 %= self.p
        acc = 0
        quotient = []
        for c in reversed(self.coeffs):
            acc = (acc * x0 + c) % self.p
            quotient.append(acc)
        remainder = quotient.pop()
        return PolyModP.from_ints(list(reversed(quotient)), self.p), remainder

    def _check(self, other: "PolyModP") -> None:
        if other.p != self.p:
            raise ValueError(f"mixing F_{self.p} and F_{other.p}")

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "X" if i == 1 else f"X^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms)


def root_multiplicity(f: PolyModP, x0: int) -> int:
    """Largest m with (X - x0)^m dividing f over F_p."""
    if f.is_zero:
        raise ZeroPolynomialError("root multiplicity of the zero polynomial is undefined")
    m = 0
    while True:
        quotient, remainder = f.divide_linear(x0)
        if remainder != 0:
            return m
        m += 1
        f = quotient
