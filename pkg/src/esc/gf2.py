"""Polynomials over GF(2) encoded as integers, and GF(2^ell) arithmetic.

Bit ``i`` of the integer is the coefficient of ``x**i``; ``0b1011`` is
``x^3 + x + 1``.
"""

from __future__ import annotations

from functools import lru_cache


def degree(a: int) -> int:
    """Degree of ``a``; -1 for the zero polynomial."""
    return a.bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carry-less product."""
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def polymod(a: int, m: int) -> int:
    if m == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    dm = degree(m)
    while (da := degree(a)) >= dm:
        a ^= m << (da - dm)
    return a


def polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, polymod(a, b)
    return a


def mulmod(a: int, b: int, m: int) -> int:
    """``a * b mod m``, interleaving shifts and reductions."""
    dm = degree(m)
    top = 1 << dm
    a = polymod(a, m)
    c = 0
    while b:
        if b & 1:
            c ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= m
    return c


def powmod(a: int, e: int, m: int) -> int:
    r = polymod(1, m)
    a = polymod(a, m)
    while e:
        if e & 1:
            r = mulmod(r, a, m)
        a = mulmod(a, a, m)
        e >>= 1
    return r


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _frobenius(k: int, m: int) -> int:
    """``x^(2^k) mod m`` by k squarings."""
    r = polymod(0b10, m)
    for _ in range(k):
        r = mulmod(r, r, m)
    return r


def is_irreducible(f: int) -> bool:
    """Rabin's test."""
    d = degree(f)
    if d < 1:
        return False
    if d == 1:
        return True
    x = 0b10
    if _frobenius(d, f) != polymod(x, f):
        return False
    for p in _prime_factors(d):
        h = _frobenius(d // p, f) ^ x
        if degree(polygcd(f, h)) != 0:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(ell: int) -> int:
    """Smallest irreducible polynomial of degree ``ell`` with constant term 1.

    Candidates are scanned in increasing integer order; for ``ell == 1`` this
    gives ``x + 1``.
    """
    if ell < 1:
        raise ValueError(f"degree must be positive, got {ell}")
    for f in range((1 << ell) | 1, 1 << (ell + 1), 2):
        if is_irreducible(f):
            return f
    raise AssertionError(f"no irreducible polynomial of degree {ell}")  # unreachable
