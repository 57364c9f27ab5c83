"""Message distributions, distribution families and the Shtarkov model.

Words of ``{0,1}^n`` are indexed by their integer value, most significant
bit first, so the word ``01`` is index 1 and tables are laid out in the
order ``00, 01, 10, 11``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

Prob = Union[Fraction, float]

#: Tolerance on normalization when probabilities are floats.
FLOAT_TOL = 2.0**-40


@dataclass(frozen=True, order=True)
class BitWord:
    """A fixed-length binary word stored as an integer."""

    length: int
    value: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"negative word length {self.length}")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, s: str) -> BitWord:
        s = s.strip()
        if any(c not in "01" for c in s):
            raise ValueError(f"not a bit string: {s!r}")
        return cls(len(s), int(s, 2) if s else 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitWord:
        value = length = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit must be 0 or 1, got {b!r}")
            value = (value << 1) | b
            length += 1
        return cls(length, value)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.length - 1 - i)) & 1 for i in range(self.length))

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __add__(self, other: BitWord) -> BitWord:
        """Concatenation."""
        return BitWord(self.length + other.length, (self.value << other.length) | other.value)

    def __xor__(self, other: BitWord) -> BitWord:
        if self.length != other.length:
            raise ValueError("xor of words with different lengths")
        return BitWord(self.length, self.value ^ other.value)


def _is_exact(values: Iterable[Prob]) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


@dataclass(frozen=True)
class Pmf:
    """A probability mass function on ``{0,1}^n``.

    ``probs[i]`` is the probability of the word with integer value ``i``.
    Entries may be :class:`~fractions.Fraction` (exact) or ``float``.
    """

    n: int
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(self.probs))
        if self.n < 0:
            raise ValueError(f"negative word length {self.n}")
        if len(self.probs) != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} probabilities, got {len(self.probs)}")

    @property
    def exact(self) -> bool:
        return _is_exact(self.probs)

    def __getitem__(self, u: BitWord | int) -> Prob:
        if isinstance(u, BitWord):
            if u.length != self.n:
                raise ValueError(f"word of length {u.length} for a pmf on {self.n} bits")
            u = u.value
        return self.probs[u]

    def support(self) -> list[int]:
        return [i for i, p in enumerate(self.probs) if p > 0]


def uniform(n: int) -> Pmf:
    return Pmf(n, [Fraction(1, 1 << n)] * (1 << n))


def point_mass(n: int, u: int) -> Pmf:
    probs = [Fraction(0)] * (1 << n)
    probs[u] = Fraction(1)
    return Pmf(n, probs)


def bernoulli_pmf(n: int, theta: Prob) -> Pmf:
    """i.i.d. Bernoulli(theta) bits; ``theta`` is the probability of a one."""
    if not 0 <= theta <= 1:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    probs = []
    for u in range(1 << n):
        w = u.bit_count()
        probs.append(theta**w * (1 - theta) ** (n - w))
    return Pmf(n, probs)


def pmf_validate(p: Pmf) -> bool:
    """True iff ``p`` is nonnegative and sums to one (exactly, or within 2^-40)."""
    if any(x < 0 for x in p.probs):
        return False
    total = sum(p.probs)
    if p.exact:
        return total == 1
    return abs(total - 1) <= FLOAT_TOL


class FamilyKind(Enum):
    EXPLICIT = "explicit"
    BERNOULLI_NML = "bernoulli-nml"


@dataclass(frozen=True)
class FamilySpec:
    """A family of message distributions over ``{0,1}^n``.

    ``EXPLICIT`` families list their members. ``BERNOULLI_NML`` stands for
    every i.i.d. Bernoulli source on n bits; ``grid`` is the number of
    equal steps of theta used wherever members have to be enumerated.
    """

    n: int
    kind: FamilyKind
    members: tuple = ()
    grid: int = 64

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.kind is FamilyKind.EXPLICIT:
            if not self.members:
                raise ValueError("explicit family needs at least one member")
            for i, p in enumerate(self.members):
                if p.n != self.n:
                    raise ValueError(f"member {i} is defined on {p.n} bits, family on {self.n}")
        elif self.members:
            raise ValueError("Bernoulli NML family takes no explicit members")
        if self.grid < 1:
            raise ValueError("grid must be positive")

    @classmethod
    def explicit(cls, members: Sequence[Pmf]) -> FamilySpec:
        members = tuple(members)
        if not members:
            raise ValueError("explicit family needs at least one member")
        return cls(members[0].n, FamilyKind.EXPLICIT, members)

    @classmethod
    def bernoulli_nml(cls, n: int, grid: int = 64) -> FamilySpec:
        return cls(n, FamilyKind.BERNOULLI_NML, (), grid)

    def enumerate_members(self) -> tuple[Pmf, ...]:
        """Members for exhaustive checks; a theta grid for Bernoulli NML."""
        if self.kind is FamilyKind.EXPLICIT:
            return self.members
        return tuple(bernoulli_pmf(self.n, Fraction(j, self.grid)) for j in range(self.grid + 1))

    @property
    def size(self) -> int | None:
        return len(self.members) if self.kind is FamilyKind.EXPLICIT else None


def _bernoulli_max(n: int, w: int) -> Fraction:
    # sup over theta of theta^w (1-theta)^(n-w), attained at theta = w/n; 0**0 == 1
    return Fraction(w, n) ** w * Fraction(n - w, n) ** (n - w)


@dataclass(frozen=True)
class ShtarkovModel:
    """Per-word suprema over a family, their sum and the normalized distribution."""

    n: int
    p_max: tuple
    s_p: Prob
    q: Pmf
    legal: frozenset = field(default_factory=frozenset)

    def is_legal(self, u: BitWord | int) -> bool:
        if isinstance(u, BitWord):
            if u.length != self.n:
                return False
            u = u.value
        return u in self.legal


def build_shtarkov(family: FamilySpec, plaintexts: Iterable[BitWord | int] | None = None) -> ShtarkovModel:
    """Compute ``p_max``, ``S_P`` and ``q = p_max / S_P`` for ``family``.

    Words with ``p_max(u) == 0`` are not legal plaintexts. Passing them in
    ``plaintexts`` raises ``ValueError``.
    """
    n = family.n
    if family.kind is FamilyKind.BERNOULLI_NML:
        p_max = [_bernoulli_max(n, u.bit_count()) for u in range(1 << n)]
    else:
        cols = zip(*(m.probs for m in family.members))
        p_max = [max(col) for col in cols]
    s_p = sum(p_max)
    if s_p <= 0:
        raise ValueError("family assigns zero probability to every word")
    q = Pmf(n, [x / s_p for x in p_max])
    legal = frozenset(u for u, x in enumerate(p_max) if x > 0)
    if plaintexts is not None:
        for u in plaintexts:
            v = u.value if isinstance(u, BitWord) else u
            if v not in legal:
                word = u if isinstance(u, BitWord) else BitWord(n, v)
                raise ValueError(f"declared plaintext {word} has zero probability under every member")
    return ShtarkovModel(n, tuple(p_max), s_p, q, legal)


@dataclass(frozen=True)
class RatioCheck:
    ok: bool
    ratio: Prob
    argmax: int | None


def ratio_check(model: ShtarkovModel, p: Pmf) -> RatioCheck:
    """Check ``p(u) <= S_P * q(u)`` for every word and report ``max p(u)/q(u)``.

    A word with ``q(u) == 0`` and ``p(u) > 0`` fails the check and makes the
    ratio infinite.
    """
    if p.n != model.n:
        raise ValueError(f"pmf on {p.n} bits checked against a model on {model.n} bits")
    worst: Prob = 0
    argmax = None
    for u, (pu, qu) in enumerate(zip(p.probs, model.q.probs)):
        if qu == 0:
            if pu > 0:
                return RatioCheck(False, math.inf, u)
            continue
        r = pu / qu
        if r > worst:
            worst, argmax = r, u
    if _is_exact((worst, model.s_p)):
        ok = worst <= model.s_p
    else:
        ok = worst <= model.s_p * (1 + FLOAT_TOL)
    return RatioCheck(ok, worst, argmax)
