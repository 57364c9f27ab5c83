"""The randomized padding map, its inverse and the distribution it induces."""

from __future__ import annotations

import math
import random
import secrets
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .coding import CodeTable, DecodeError, decode_prefix, encode
from .family import BitWord, FamilyKind, FamilySpec, Pmf, Prob

#: Largest padded length for which the induced table is materialized.
MAX_TABLE_BITS = 20


class RandomSource:
    """Independent unbiased bits from a seed, an explicit tape, or the OS.

    >>> RandomSource(tape=[0, 1, 1]).bits(3)
    3
    """

    def __init__(self, seed: int | None = None, tape: Iterable[int] | None = None):
        if seed is not None and tape is not None:
            raise ValueError("give a seed or a tape, not both")
        self._tape = None
        if tape is not None:
            self._tape = list(tape)
            if any(b not in (0, 1) for b in self._tape):
                raise ValueError("tape must hold bits")
            self._pos = 0
            self._rng = None
        elif seed is not None:
            self._rng = random.Random(seed)
        else:
            self._rng = secrets.SystemRandom()

    def bits(self, k: int) -> int:
        """Draw ``k`` bits, first drawn bit most significant."""
        if k == 0:
            return 0
        if self._tape is None:
            return self._rng.getrandbits(k)
        if self._pos + k > len(self._tape):
            raise ValueError("random tape exhausted")
        v = 0
        for b in self._tape[self._pos : self._pos + k]:
            v = (v << 1) | b
        self._pos += k
        return v


def phi(table: CodeTable, u: BitWord, rnd: RandomSource) -> BitWord:
    """Codeword of ``u`` followed by uniform filler up to ``n_star`` bits."""
    cw = encode(table, u)
    fill = table.n_star - cw.length
    return cw + BitWord(fill, rnd.bits(fill))


def phi_inverse(table: CodeTable, v: BitWord) -> BitWord:
    if v.length != table.n_star:
        raise DecodeError(f"padded word has {v.length} bits, expected {table.n_star}")
    return decode_prefix(table, v)[0]


def fiber(table: CodeTable, u: BitWord) -> list[BitWord]:
    """Every possible output of ``phi`` on ``u``."""
    cw = encode(table, u)
    fill = table.n_star - cw.length
    return [BitWord(table.n_star, (cw.value << fill) | r) for r in range(1 << fill)]


@dataclass(frozen=True)
class InducedPmf:
    n_star: int
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.probs) != 1 << self.n_star:
            raise ValueError("table size does not match n_star")

    def as_pmf(self) -> Pmf:
        return Pmf(self.n_star, self.probs)


def _check_support(table: CodeTable, p: Pmf) -> None:
    if p.n != table.n:
        raise ValueError(f"pmf on {p.n} bits for a code on {table.n} bits")
    for u, pu in enumerate(p.probs):
        if pu > 0 and u not in table.rank:
            raise ValueError(f"pmf puts mass on illegal plaintext {BitWord(p.n, u)}")


def induced_pmf(table: CodeTable, p: Pmf) -> InducedPmf:
    _check_support(table, p)
    ns = table.n_star
    if ns > MAX_TABLE_BITS:
        raise ValueError(f"n_star = {ns} exceeds the table limit of {MAX_TABLE_BITS} bits")
    zero = Fraction(0) if p.exact else 0.0
    out = [zero] * (1 << ns)
    for i, u in enumerate(table.order):
        fill = ns - table.lengths[i]
        mass = p.probs[u] / (1 << fill)
        base = table.codewords[i] << fill
        for r in range(1 << fill):
            out[base + r] = mass
    return InducedPmf(ns, out)


def max_induced_mass(table: CodeTable, p: Pmf) -> Prob:
    """Largest value of the induced distribution, without building the table."""
    _check_support(table, p)
    return max(p.probs[u] / (1 << (table.n_star - table.lengths[i])) for i, u in enumerate(table.order))


def min_entropy(dist: Pmf | InducedPmf) -> float:
    m = max(dist.probs)
    if m <= 0:
        raise ValueError("distribution has no mass")
    return -_log2(m)


def delta_gap_mass(table: CodeTable, family: FamilySpec) -> Prob:
    """Largest induced mass over the (enumerated) family members.

    The gap is ``n_star + log2`` of this value; keeping the mass lets callers
    compare exactly.
    """
    return max(max_induced_mass(table, p) for p in family.enumerate_members())


def delta_gap(table: CodeTable, family: FamilySpec) -> float:
    """``sup_p (n_star - h_min(pi_p))``.

    Exact for explicit families. For Bernoulli NML the sup is taken over the
    theta grid ``0, 1/grid, ..., 1``.
    """
    if family.kind not in (FamilyKind.EXPLICIT, FamilyKind.BERNOULLI_NML):
        raise ValueError(f"no enumeration strategy for {family.kind}")
    m = delta_gap_mass(table, family)
    return table.n_star + _log2(m)


def _log2(x: Prob) -> float:
    # log2 of numerator and denominator separately; exact on powers of two
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)
