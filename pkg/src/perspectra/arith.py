"""Small-integer number theory used across the package."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of ``|n|`` as sorted ``(prime, exponent)`` pairs."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for q in range(3, isqrt(n) + 1, 2):
        if n % q == 0:
            return False
    return True


def prime_power(n: int) -> tuple[int, int] | None:
    """``(p, e)`` when ``n = p**e`` with ``e >= 1``, else ``None``."""
    if n < 2:
        return None
    f = factorize(n)
    return f[0] if len(f) == 1 else None


def primes_up_to(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if is_prime(q)]


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def partitions(n: int, largest: int | None = None):
    """Integer partitions of ``n`` in non-increasing order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
