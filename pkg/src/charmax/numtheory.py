"""Integer and modular arithmetic: primes, primitive roots, discrete logs, subgroups.

Discrete logarithms are stored as full tables, so every context here is
limited to desk-scale moduli (see ``MAX_TABLE_MODULUS``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ResourceLimitError

MAX_TABLE_MODULUS = 10**7

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
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
    raise ArithmeticError(f"no factor found for {n}")


def factorize(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, in increasing order.

    >>> factorize(12)
    [2, 2, 3]
    >>> factorize(1)
    []
    """
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    factors = []
    for p in (2, 3, 5):
        while n % p == 0:
            factors.append(p)
            n //= p
    # 30-wheel trial division up to a fixed bound, Pollard-Brent beyond it
    d, bound = 7, 10**5
    gaps = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n and d <= bound:
        while n % d == 0:
            factors.append(d)
            n //= d
        d += gaps[i]
        i = (i + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            factors.append(m)
        else:
            f = _pollard_brent(m)
            stack.extend((f, m // f))
    return sorted(factors)


def prime_divisors(n: int) -> list[int]:
    return sorted(set(factorize(n)))


def largest_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError("largest_prime_factor expects n >= 2")
    return factorize(n)[-1]


@dataclass(frozen=True)
class PrimePair:
    """A prime ``p`` together with a prime ``q`` dividing ``p - 1``."""

    p: int
    q: int

    def __post_init__(self):
        if not (is_prime(self.p) and is_prime(self.q)):
            raise ValueError(f"({self.p}, {self.q}) is not a pair of primes")
        if (self.p - 1) % self.q:
            raise ValueError(f"{self.q} does not divide {self.p} - 1")

    @property
    def ratio_exponent(self) -> float:
        return math.log(self.q) / math.log(self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "exponent_achieved": self.ratio_exponent}


def _as_fraction(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def power_inequality_holds(q: int, p: int, B, exponent) -> bool:
    """Exact test of ``q >= B * p**exponent`` for rational ``B`` and ``exponent``.

    Floats are read through their decimal repr, so ``0.6687`` means 6687/10000.
    A float comparison settles clear cases; ties go to big-integer arithmetic.
    """
    B, e = _as_fraction(B), _as_fraction(exponent)
    gap = math.log(q) - math.log(B) - float(e) * math.log(p)
    if abs(gap) > 1e-9 * (1.0 + math.log(p)):
        return gap > 0
    u, v = e.numerator, e.denominator
    # q^v >= B^v p^u with B = bn/bd
    return q**v * B.denominator**v >= B.numerator**v * p**u


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
    idx = np.nonzero(spf == 0)[0]
    spf[idx] = idx
    return spf


def scan_fouvry_primes(limit: int, B: float = 1.0, exponent: float = 0.6687) -> list[PrimePair]:
    """Primes ``p <= limit`` whose ``p - 1`` has a prime factor ``q >= B p**exponent``.

    Each prime is paired with ``q = P(p - 1)``, the largest prime factor.
    """
    if not 0 < exponent < 1:
        raise ValueError("exponent must lie in (0, 1)")
    if B <= 0:
        raise ValueError("B must be positive")
    if limit < 3:
        return []
    spf = _spf_sieve(limit)
    out = []
    for p in range(3, limit + 1):
        if spf[p] != p:
            continue
        m, q = p - 1, 1
        while m > 1:
            f = int(spf[m])
            q = max(q, f)
            m //= f
        if power_inequality_holds(q, p, B, exponent):
            out.append(PrimePair(p, q))
    return out


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod the prime ``p``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    cofactors = [(p - 1) // r for r in prime_divisors(p - 1)]
    for alpha in range(2, p):
        if all(pow(alpha, c, p) != 1 for c in cofactors):
            return alpha
    raise ArithmeticError("unreachable: prime modulus without a primitive root")


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    order = n - 1 if is_prime(n) else _totient(n)
    for r in prime_divisors(order) if order > 1 else []:
        while order % r == 0 and pow(a, order // r, n) == 1:
            order //= r
    return order


def _totient(n: int) -> int:
    result = n
    for r in prime_divisors(n) if n > 1 else []:
        result -= result // r
    return result


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi expects n >= 1")
    return _totient(n)


def _power_table(base: int, count: int, p: int) -> np.ndarray:
    """``base**j mod p`` for ``j = 1 .. count`` using blocked vector products."""
    out = np.empty(count, dtype=np.int64)
    block = min(count, 4096)
    cur = 1
    for j in range(block):
        cur = cur * base % p
        out[j] = cur
    step = int(out[block - 1])
    filled = block
    while filled < count:
        n = min(block, count - filled)
        out[filled : filled + n] = out[filled - block : filled - block + n] * step % p
        filled += n
    return out


@dataclass(frozen=True, eq=False)
class GroupContext:
    """``Z_p^*`` with a fixed primitive root and its full discrete-log table.

    ``nu[g]`` is the exponent in ``[1, p - 1]`` with ``alpha**nu[g] == g``;
    in particular ``nu[1] == p - 1``.  Index 0 of the table is unused.
    """

    p: int
    alpha: int
    nu: np.ndarray = field(repr=False)
    powers: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.p - 1

    def log(self, g: int) -> int:
        g %= self.p
        if g == 0:
            raise ValueError("0 has no discrete logarithm")
        return int(self.nu[g])


@lru_cache(maxsize=32)
def build_group_context(p: int) -> GroupContext:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > MAX_TABLE_MODULUS:
        raise ResourceLimitError(f"p={p} exceeds the discrete-log table budget {MAX_TABLE_MODULUS}")
    alpha = primitive_root(p)
    powers = _power_table(alpha, p - 1, p) if p > 2 else np.array([1], dtype=np.int64)
    nu = np.zeros(p, dtype=np.int64)
    nu[powers] = np.arange(1, p, dtype=np.int64)
    nu.setflags(write=False)
    powers.setflags(write=False)
    return GroupContext(p, alpha, nu, powers)


@dataclass(frozen=True, eq=False)
class SubgroupContext:
    """The order-``q`` subgroup ``A`` of ``Z_p^*`` in its natural (integer) order.

    ``elements[i]`` is ``g_{i+1}``; ``nu_A[g]`` is the exponent in ``[1, q]``
    of ``g`` with respect to ``alpha_A`` (zero for residues outside ``A``).
    """

    parent: GroupContext
    q: int
    elements: np.ndarray = field(repr=False)
    alpha_A: int
    nu_A: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.parent.p

    def position(self, g: int) -> int:
        """1-based position of ``g`` in the natural enumeration of ``A``."""
        i = int(np.searchsorted(self.elements, g))
        if i >= self.q or self.elements[i] != g:
            raise ValueError(f"{g} is not in the subgroup of order {self.q}")
        return i + 1


def build_subgroup_context(ctx: GroupContext, q: int) -> SubgroupContext:
    p = ctx.p
    if q < 1 or (p - 1) % q:
        raise ValueError(f"{q} does not divide p - 1 = {p - 1}")
    if not is_prime(q):
        raise ValueError(f"subgroup order {q} must be prime")
    cof = (p - 1) // q
    # x -> x^cof hits A exactly; alpha^(cof*j), j=1..q enumerates it without repeats
    image = ctx.powers[np.arange(cof - 1, p - 1, cof)]
    elements = np.sort(image)
    alpha_A = int(elements[1])
    nu_A = np.zeros(p, dtype=np.int64)
    nu_A[_power_table(alpha_A, q, p)] = np.arange(1, q + 1, dtype=np.int64)
    elements.setflags(write=False)
    nu_A.setflags(write=False)
    return SubgroupContext(ctx, q, elements, alpha_A, nu_A)
