"""Small-bias XOR cipher on padded messages.

The key is a pair ``(x, y)`` of elements of GF(2^ell). It expands to the pad
whose i-th bit (i = 1..n_star) is the GF(2) inner product of ``x**i`` and
``y``. Over a uniform key every nonzero parity of the pad has bias at most
``n_star / 2**ell``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import gf2
from .coding import CodeTable
from .family import BitWord, Prob
from .padding import RandomSource, phi, phi_inverse

#: Default upper bound on the field degree chosen by the planner.
MAX_ELL = 256

_EPS = 1e-9


class Mode(Enum):
    ENTROPIC = 0
    INDIST = 1

    @property
    def slack(self) -> int:
        """Additive key-length constant for this security notion."""
        return 2 if self is Mode.ENTROPIC else 6

    @classmethod
    def parse(cls, s: str) -> Mode:
        s = s.lower()
        if s in ("entropic", "entropic-security"):
            return cls.ENTROPIC
        if s in ("indist", "indistinguishability"):
            return cls.INDIST
        raise ValueError(f"unknown mode {s!r}; expected 'entropic' or 'indist'")

    def __str__(self) -> str:
        return "entropic" if self is Mode.ENTROPIC else "indist"


def ceil_log2(x: Prob) -> int:
    """Smallest integer c with ``2**c >= x``, computed exactly."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a nonpositive number")
    c = x.numerator.bit_length() - x.denominator.bit_length() - 1
    while Fraction(2) ** c < x:
        c += 1
    return c


@dataclass(frozen=True)
class CipherParams:
    n: int
    n_star: int
    epsilon: float
    mode: Mode
    delta_hat: float
    delta_req: float
    k_theory: int
    ell: int

    @property
    def k_actual(self) -> int:
        return 2 * self.ell

    @property
    def key_slack(self) -> int:
        return self.k_actual - self.k_theory


def plan_params(
    s_p: Prob,
    n_star: int,
    epsilon: float,
    mode: Mode = Mode.ENTROPIC,
    delta_gap: float | None = None,
    *,
    n: int = 0,
    constants: str = "proof",
    max_ell: int = MAX_ELL,
) -> CipherParams:
    """Choose key length and field degree for a target leakage.

    ``delta_gap=None`` uses the bound ``ceil(log2 S_P) + 2`` on the min-entropy
    gap; passing a computed gap uses it instead. ``constants="statement"``
    drops the ``+2`` from the bound, which reproduces the shorter key lengths
    quoted without the proof's extra margin.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n_star < 1:
        raise ValueError(f"n_star must be positive, got {n_star}")
    if s_p < 1:
        raise ValueError(f"S_P must be at least 1, got {s_p}")
    if constants not in ("proof", "statement"):
        raise ValueError(f"unknown constants {constants!r}")
    bound = ceil_log2(s_p) + (2 if constants == "proof" else 0)
    if delta_gap is None:
        delta_hat = float(bound)
    else:
        if delta_gap > ceil_log2(s_p) + 2 + _EPS:
            raise ValueError(f"computed gap {delta_gap} exceeds the bound {ceil_log2(s_p) + 2}")
        delta_hat = max(float(delta_gap), 0.0)
    log_inv_eps = -math.log2(epsilon)
    k_theory = math.ceil(delta_hat + 2 * log_inv_eps - _EPS) + mode.slack
    delta_req = epsilon * 2.0 ** (-delta_hat / 2 - 1)
    ell = max(1, math.ceil(math.log2(n_star) + log_inv_eps + delta_hat / 2 + 1 - _EPS))
    while n_star / 2.0**ell > delta_req * (1 + _EPS):
        ell += 1
    if ell > max_ell:
        raise ValueError(f"field degree {ell} exceeds the limit {max_ell}")
    return CipherParams(n, n_star, float(epsilon), mode, delta_hat, delta_req, k_theory, ell)


@dataclass(frozen=True)
class SmallBiasSpace:
    ell: int
    n_star: int
    modulus: int

    def __post_init__(self):
        if gf2.degree(self.modulus) != self.ell or not gf2.is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is not irreducible of degree {self.ell}")

    @property
    def bias_bound(self) -> float:
        return self.n_star / 2.0**self.ell


def build_space(params: CipherParams | None = None, *, ell: int | None = None, n_star: int | None = None) -> SmallBiasSpace:
    """Space for ``params``, or for an explicit ``ell``/``n_star`` pair."""
    if params is not None:
        ell = params.ell if ell is None else ell
        n_star = params.n_star if n_star is None else n_star
    if ell is None or n_star is None:
        raise ValueError("need params or both ell and n_star")
    return SmallBiasSpace(ell, n_star, gf2.smallest_irreducible(ell))


@dataclass(frozen=True)
class Key:
    """``2*ell`` key bits: x in the high half, y in the low half."""

    ell: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < 1 << (2 * self.ell):
            raise ValueError(f"key does not fit in {2 * self.ell} bits")

    @classmethod
    def from_word(cls, ell: int, bits: BitWord) -> Key:
        if bits.length != 2 * ell:
            raise ValueError(f"key has {bits.length} bits, expected {2 * ell}")
        return cls(ell, bits.value)

    @classmethod
    def generate(cls, ell: int, rnd: RandomSource) -> Key:
        return cls(ell, rnd.bits(2 * ell))

    @property
    def x(self) -> int:
        return self.value >> self.ell

    @property
    def y(self) -> int:
        return self.value & ((1 << self.ell) - 1)

    @property
    def bits(self) -> BitWord:
        return BitWord(2 * self.ell, self.value)


def expand_key(space: SmallBiasSpace, key: Key) -> BitWord:
    if key.ell != space.ell:
        raise ValueError(f"key for degree {key.ell}, space has degree {space.ell}")
    x, y, m = key.x, key.y, space.modulus
    pad, power = 0, 1
    for _ in range(space.n_star):
        power = gf2.mulmod(power, x, m)
        pad = (pad << 1) | ((power & y).bit_count() & 1)
    return BitWord(space.n_star, pad)


def _pads_by_x(space: SmallBiasSpace):
    ell, ns, m = space.ell, space.n_star, space.modulus
    size = 1 << ell
    ys = np.arange(size, dtype=np.int64)
    parity = np.zeros(size, dtype=np.int64)
    for b in range(ell):
        parity ^= (ys >> b) & 1
    for x in range(size):
        pads = np.zeros(size, dtype=np.int64)
        power = 1
        for _ in range(ns):
            power = gf2.mulmod(power, x, m)
            pads = (pads << 1) | parity[power & ys]
        yield pads


def pad_table(space: SmallBiasSpace) -> np.ndarray:
    """Pads of every key as integers, indexed by key value ``(x << ell) | y``."""
    return np.concatenate(list(_pads_by_x(space)))


def pad_counts(space: SmallBiasSpace) -> np.ndarray:
    """Number of keys producing each of the ``2**n_star`` pads."""
    counts = np.zeros(1 << space.n_star, dtype=np.int64)
    for pads in _pads_by_x(space):
        counts += np.bincount(pads, minlength=1 << space.n_star)
    return counts


class HeaderMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Ciphertext:
    """Header fields plus the masked payload."""

    n: int
    n_star: int
    mode: Mode
    epsilon: float
    ell: int
    modulus: int
    fingerprint: bytes
    payload: BitWord
    version: int = 1


def encrypt(
    table: CodeTable,
    params: CipherParams,
    space: SmallBiasSpace,
    key: Key,
    m: BitWord,
    rnd: RandomSource,
    fingerprint: bytes = bytes(32),
) -> Ciphertext:
    _check_consistent(table, params, space)
    padded = phi(table, m, rnd)
    return Ciphertext(
        n=table.n,
        n_star=table.n_star,
        mode=params.mode,
        epsilon=params.epsilon,
        ell=space.ell,
        modulus=space.modulus,
        fingerprint=fingerprint,
        payload=padded ^ expand_key(space, key),
    )


def decrypt(
    table: CodeTable,
    params: CipherParams,
    space: SmallBiasSpace,
    key: Key,
    c: Ciphertext,
    fingerprint: bytes | None = None,
) -> BitWord:
    """Unmask and decode. Raises ``DecodeError`` when no codeword fits."""
    _check_consistent(table, params, space)
    if c.version != 1:
        raise HeaderMismatch(f"unsupported format version {c.version}")
    expected = {
        "n": table.n,
        "n_star": table.n_star,
        "mode": params.mode,
        "epsilon": params.epsilon,
        "ell": space.ell,
        "modulus": space.modulus,
    }
    for name, want in expected.items():
        got = getattr(c, name)
        if got != want:
            raise HeaderMismatch(f"header field {name} is {got}, expected {want}")
    if fingerprint is not None and c.fingerprint != fingerprint:
        raise HeaderMismatch("family fingerprint does not match")
    if c.payload.length != table.n_star:
        raise HeaderMismatch(f"payload has {c.payload.length} bits, expected {table.n_star}")
    return phi_inverse(table, c.payload ^ expand_key(space, key))


def _check_consistent(table: CodeTable, params: CipherParams, space: SmallBiasSpace) -> None:
    if params.n_star != table.n_star or space.n_star != table.n_star:
        raise ValueError("code table, parameters and space disagree on n_star")
    if params.n and params.n != table.n:
        raise ValueError("code table and parameters disagree on n")
